"""The three power-allocation schemes and their energy-efficiency reports.

always_max radiates enough to serve the cell edge whether anyone is there
or not. zooming shrinks the full-circle coverage radius to the farthest
active user (sleeping when the cell is empty). cpz additionally powers
only the occupied sectors, each zoomed to its own farthest occupant and
charged the angular fraction of the corresponding full-circle power.

A user in a powered region sees the link of a full-circle transmission at
that region's dimensioning power, so per-user rates follow from the SNR at
the user's own distance; the region edge gets exactly the target rate and
everyone closer gets more.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Mapping

from .mimo import RateModelParams, per_ue_rate
from .partition import CpzState
from .propagation import LinkBudget, required_bs_power, snr_rho


class SchemeKind(Enum):
    ALWAYS_MAX = "always_max"
    ZOOMING = "zooming"
    CPZ = "cpz"


# Canonical report order for comparisons and emitted rows.
SCHEME_ORDER = (SchemeKind.ALWAYS_MAX, SchemeKind.ZOOMING, SchemeKind.CPZ)


@dataclass(frozen=True)
class SchemeReport:
    """Outcome of one scheme on one scenario; ee is None when nothing is radiated."""

    scheme: SchemeKind
    total_power: float
    sum_rate: float
    ee: float | None
    n_active_sectors: int


def power_always_max(budget: LinkBudget, rate_target: float, k_users: int,
                     m_antennas: int) -> float:
    """Edge-dimensioned power, independent of occupancy."""
    return required_bs_power(budget.cell_radius_r, rate_target, k_users, m_antennas, budget)


def power_zooming(state: CpzState, budget: LinkBudget, rate_target: float,
                  k_users: int, m_antennas: int) -> float:
    """Full-circle power zoomed to the farthest active user; 0 when the cell is empty."""
    d_global = state.max_zoom()
    if d_global is None:
        return 0.0
    return required_bs_power(d_global, rate_target, k_users, m_antennas, budget)


def power_cpz(state: CpzState, budget: LinkBudget, rate_target: float,
              k_users: int, m_antennas: int) -> float:
    """Sum over occupied sectors of the angular fraction of each sector's zoom power."""
    coverage = state.coverage_requirements()
    if not coverage:
        return 0.0
    d_global = max(c.zoom_distance for c in coverage)
    full = required_bs_power(d_global, rate_target, k_users, m_antennas, budget)
    # Accumulate fractions of the zooming power (each <= 1) and divide once:
    # rounding then cannot lift the total above the zooming power, keeping the
    # scheme ordering exact without tolerances.
    fractions = math.fsum(
        required_bs_power(c.zoom_distance, rate_target, k_users, m_antennas, budget) / full
        for c in coverage
    )
    return full * (fractions / state.grid.n_sectors)


def energy_efficiency(sum_rate: float, total_power: float) -> float | None:
    """Delivered bits per joule, or None for the zero-power sleep state."""
    if sum_rate < 0:
        raise ValueError("sum_rate must be nonnegative")
    if total_power < 0:
        raise ValueError("total_power must be nonnegative")
    if total_power == 0:
        return None
    return sum_rate / total_power


def ue_effective_powers(kind: SchemeKind, state: CpzState, budget: LinkBudget,
                        rate_target: float, k_users: int,
                        m_antennas: int) -> dict[Hashable, float]:
    """Full-circle-equivalent power dimensioning each user's region.

    This is the power that enters each user's SNR: the whole-cell power for
    always_max, the zoomed power for zooming, and the per-sector zoom power
    for cpz (a sector spends only its angular fraction of that amount).
    """
    if kind is SchemeKind.ALWAYS_MAX:
        p = power_always_max(budget, rate_target, k_users, m_antennas)
        return {ue_id: p for ue_id in state.ue_positions()}
    if kind is SchemeKind.ZOOMING:
        d_global = state.max_zoom()
        if d_global is None:
            return {}
        p = required_bs_power(d_global, rate_target, k_users, m_antennas, budget)
        return {ue_id: p for ue_id in state.ue_positions()}
    if kind is SchemeKind.CPZ:
        sector_power = {
            c.sector: required_bs_power(c.zoom_distance, rate_target, k_users, m_antennas, budget)
            for c in state.coverage_requirements()
        }
        return {ue_id: sector_power[state.sector_of(ue_id)]
                for ue_id in state.ue_positions()}
    raise ValueError(f"unknown scheme {kind!r}")


def per_ue_rates(kind: SchemeKind, state: CpzState, budget: LinkBudget,
                 rate_target: float, k_users: int, m_antennas: int,
                 psi: Mapping[Hashable, float] | None = None) -> dict[Hashable, float]:
    """Modeled rate of every served user at the scheme's granted power.

    psi maps ue_id to a slow-fading factor; omit it for the deterministic
    unit-shadowing mode in which every rate is at least the target.
    """
    effective = ue_effective_powers(kind, state, budget, rate_target, k_users, m_antennas)
    rates: dict[Hashable, float] = {}
    for ue_id, pos in state.ue_positions().items():
        fading = 1.0 if psi is None else psi[ue_id]
        rho = snr_rho(effective[ue_id], k_users, pos.r, budget, fading)
        params = RateModelParams(bandwidth_b_ccs=budget.bandwidth, rho=rho)
        rates[ue_id] = per_ue_rate(params, rho * (m_antennas - k_users))
    return rates


def _total_power(kind: SchemeKind, state: CpzState, budget: LinkBudget,
                 rate_target: float, k_users: int, m_antennas: int) -> float:
    if kind is SchemeKind.ALWAYS_MAX:
        return power_always_max(budget, rate_target, k_users, m_antennas)
    if kind is SchemeKind.ZOOMING:
        return power_zooming(state, budget, rate_target, k_users, m_antennas)
    if kind is SchemeKind.CPZ:
        return power_cpz(state, budget, rate_target, k_users, m_antennas)
    raise ValueError(f"unknown scheme {kind!r}")


def _active_sectors(kind: SchemeKind, state: CpzState) -> int:
    if kind is SchemeKind.ALWAYS_MAX:
        return state.grid.n_sectors
    if kind is SchemeKind.ZOOMING:
        return state.grid.n_sectors if len(state) else 0
    return len(state.per_sector_zoom)


def evaluate_scheme(kind: SchemeKind, state: CpzState, budget: LinkBudget,
                    rate_target: float, k_users: int, m_antennas: int,
                    psi: Mapping[Hashable, float] | None = None) -> SchemeReport:
    """Evaluate one scheme on a scenario snapshot.

    The report carries the scheme's total radiated power, the sum of the
    served users' modeled rates, and the resulting energy efficiency. The
    total can never exceed the always-max budget; that bound is re-checked
    here as a guard against regressions in the power construction.
    """
    total = _total_power(kind, state, budget, rate_target, k_users, m_antennas)
    p_max = power_always_max(budget, rate_target, k_users, m_antennas)
    if total > p_max:
        raise RuntimeError(f"{kind.value} power {total} exceeds the always-max budget {p_max}")
    rates = per_ue_rates(kind, state, budget, rate_target, k_users, m_antennas, psi)
    sum_rate = math.fsum(rates.values())
    return SchemeReport(
        scheme=kind,
        total_power=total,
        sum_rate=sum_rate,
        ee=energy_efficiency(sum_rate, total),
        n_active_sectors=_active_sectors(kind, state),
    )
