"""Link-budget tests: path loss, SNR, shadowing statistics, and power sizing."""

import numpy as np
import pytest

from cpzsim import propagation as prop
from cpzsim.mimo import RateModelParams, per_ue_rate


BUDGET = prop.LinkBudget()  # G=1, r0=100 m, alpha=3.7, N0=2e-14 W, B=5 MHz, R=1000 m


def test_budget_defaults():
    assert BUDGET.path_gain_g == 1.0
    assert BUDGET.r0 == 100.0
    assert BUDGET.alpha == 3.7
    assert BUDGET.shadow_sigma_db == 8.0
    assert BUDGET.cell_radius_r == 1000.0


@pytest.mark.parametrize("kwargs", [
    {"r0": 0.0},
    {"alpha": -1.0},
    {"noise_n0": 0.0},
    {"bandwidth": 0.0},
    {"cell_radius_r": 50.0},  # smaller than r0
])
def test_budget_validation(kwargs):
    with pytest.raises(ValueError):
        prop.LinkBudget(**kwargs)


# ---------------------------------------------------------------------------
# received_power / snr_rho


def test_received_power_at_reference_distance():
    assert prop.received_power(1.0, 1, 100.0, BUDGET) == pytest.approx(1.0)


def test_received_power_cell_edge():
    # (1000/100)^-3.7 = 10^-3.7
    p = prop.received_power(1.0, 1, 1000.0, BUDGET)
    assert p == pytest.approx(10.0 ** -3.7, rel=1e-12)
    assert p == pytest.approx(1.9953e-4, rel=1e-4)


def test_received_power_doubling_distance():
    p1 = prop.received_power(1.0, 1, 200.0, BUDGET)
    p2 = prop.received_power(1.0, 1, 400.0, BUDGET)
    assert p2 / p1 == pytest.approx(2.0 ** -3.7, rel=1e-12)


def test_received_power_strictly_decreasing():
    radii = np.linspace(100.0, 1000.0, 40)
    powers = [prop.received_power(1.0, 1, float(r), BUDGET) for r in radii]
    assert all(a > b for a, b in zip(powers, powers[1:]))


def test_received_power_splits_over_users():
    full = prop.received_power(1.0, 1, 500.0, BUDGET)
    split = prop.received_power(1.0, 10, 500.0, BUDGET)
    assert split == pytest.approx(full / 10)


def test_received_power_near_field_error():
    with pytest.raises(ValueError):
        prop.received_power(1.0, 1, 99.9, BUDGET)


def test_received_power_rejects_zero_users():
    with pytest.raises(ValueError):
        prop.received_power(1.0, 0, 500.0, BUDGET)


def test_snr_unit_point():
    p_bs = BUDGET.noise_n0 * 4
    assert prop.snr_rho(p_bs, 4, 100.0, BUDGET) == pytest.approx(1.0)


def test_snr_linear_in_power():
    r1 = prop.snr_rho(1.0, 10, 700.0, BUDGET)
    r2 = prop.snr_rho(2.0, 10, 700.0, BUDGET)
    assert r2 == pytest.approx(2 * r1, rel=1e-12)


def test_snr_cell_edge_value():
    rho = prop.snr_rho(1.0, 10, 1000.0, BUDGET)
    assert rho == pytest.approx(10.0 ** -3.7 / (10 * 2.0e-14), rel=1e-12)
    assert rho == pytest.approx(9.977e8, rel=1e-3)


# ---------------------------------------------------------------------------
# required_bs_power


def test_required_snr_peak_rate():
    # 20 Mb/s over 5 MHz with 190 spatial degrees: (2^4 - 1)/190
    assert prop.required_snr(20e6, 5e6, 10, 200) == pytest.approx(15.0 / 190.0, rel=1e-12)


def test_required_power_at_reference_distance():
    p = prop.required_bs_power(100.0, 20e6, 10, 200, BUDGET)
    assert p == pytest.approx((15.0 / 190.0) * 10 * 2.0e-14, rel=1e-12)


def test_required_power_distance_scaling():
    p1 = prop.required_bs_power(300.0, 20e6, 10, 200, BUDGET)
    p2 = prop.required_bs_power(600.0, 20e6, 10, 200, BUDGET)
    assert p2 / p1 == pytest.approx(2.0 ** 3.7, rel=1e-12)


def test_required_power_strictly_increasing_in_distance():
    dists = np.linspace(100.0, 1000.0, 40)
    powers = [prop.required_bs_power(float(d), 20e6, 10, 200, BUDGET) for d in dists]
    assert all(a < b for a, b in zip(powers, powers[1:]))


def test_required_power_increasing_in_target():
    p1 = prop.required_bs_power(800.0, 10e6, 10, 200, BUDGET)
    p2 = prop.required_bs_power(800.0, 20e6, 10, 200, BUDGET)
    assert p1 < p2


@pytest.mark.parametrize("d", [99.0, 1000.5])
def test_required_power_range_error(d):
    with pytest.raises(ValueError):
        prop.required_bs_power(d, 20e6, 10, 200, BUDGET)


def test_round_trip_power_to_rate():
    # Sizing power for distance d and rate R_t, then pushing the resulting SNR
    # back through the rate model, must reproduce R_t.
    rng = np.random.default_rng(2024)
    for _ in range(50):
        d = float(rng.uniform(BUDGET.r0, BUDGET.cell_radius_r))
        target = float(rng.uniform(1e6, 60e6))
        p = prop.required_bs_power(d, target, 10, 200, BUDGET)
        rho = prop.snr_rho(p, 10, d, BUDGET)
        rate = per_ue_rate(RateModelParams(BUDGET.bandwidth, rho), rho * (200 - 10))
        assert rate == pytest.approx(target, rel=1e-9)


# ---------------------------------------------------------------------------
# Shadowing


def test_unit_shadowing_is_one():
    draws = prop.DeterministicUnitShadowing().psi(5, trial_index=3)
    np.testing.assert_array_equal(draws, np.ones(5))


def test_lognormal_shadowing_statistics():
    mode = prop.LognormalShadowing(sigma_db=8.0, seed=99)
    draws = mode.psi(100_000)
    db = 10.0 * np.log10(draws)
    assert abs(db.std() - 8.0) / 8.0 < 0.02
    assert abs(db.mean()) < 0.1


def test_lognormal_shadowing_deterministic_per_trial():
    mode = prop.LognormalShadowing(sigma_db=8.0, seed=5)
    a = mode.psi(10, trial_index=2)
    b = mode.psi(10, trial_index=2)
    c = mode.psi(10, trial_index=3)
    np.testing.assert_array_equal(a, b)
    assert np.any(a != c)


def test_lognormal_shadowing_rejects_negative_sigma():
    with pytest.raises(ValueError):
        prop.LognormalShadowing(sigma_db=-1.0)


def test_shadowing_factor_scales_snr():
    base = prop.snr_rho(1.0, 10, 500.0, BUDGET, psi=1.0)
    shadowed = prop.snr_rho(1.0, 10, 500.0, BUDGET, psi=0.25)
    assert shadowed == pytest.approx(base / 4)
    with pytest.raises(ValueError):
        prop.snr_rho(1.0, 10, 500.0, BUDGET, psi=0.0)
