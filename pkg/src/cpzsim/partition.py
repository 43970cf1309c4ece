"""Polar partition of the cell disk and the occupancy state behind partition zooming.

The disk is cut into n_annuli equal-width rings and n_sectors equal wedges.
CpzState tracks which cells hold users and, per sector, how far coverage
must reach: the outer radius of the highest occupied ring in that sector.
Sectors with no users need no power at all.
"""

import math
from dataclasses import dataclass
from typing import Hashable, NamedTuple

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PartitionGrid:
    """Annulus-by-sector decomposition of a disk of radius cell_radius."""

    n_annuli: int = 3
    n_sectors: int = 18
    cell_radius: float = 1000.0

    def __post_init__(self):
        if self.n_annuli < 1:
            raise ValueError("n_annuli must be at least 1")
        if self.n_sectors < 1:
            raise ValueError("n_sectors must be at least 1")
        if self.cell_radius <= 0:
            raise ValueError("cell_radius must be positive")

    def annulus_outer_radius(self, annulus: int) -> float:
        """Outer boundary of ring `annulus`; the last ring ends exactly at the cell edge."""
        if not 0 <= annulus < self.n_annuli:
            raise ValueError(f"annulus {annulus} outside [0, {self.n_annuli})")
        if annulus == self.n_annuli - 1:
            return self.cell_radius
        return (annulus + 1) * self.cell_radius / self.n_annuli

    def sector_width(self) -> float:
        return TWO_PI / self.n_sectors


@dataclass(frozen=True)
class UePosition:
    """Polar position of one user; the angle is normalized into [0, 2*pi)."""

    ue_id: Hashable
    r: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.phi)):
            raise ValueError("position coordinates must be finite")
        if self.r < 0:
            raise ValueError("distance r must be nonnegative")
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "r", float(self.r))


class CellIndex(NamedTuple):
    annulus: int
    sector: int


class SectorCoverage(NamedTuple):
    sector: int
    theta: float
    zoom_distance: float


def locate(pos: UePosition, grid: PartitionGrid) -> CellIndex:
    """Map a position to its partition cell.

    Intervals are half-open toward larger indices, with the outermost ring
    and last wedge closed, so every in-cell position has exactly one index.
    """
    if pos.r > grid.cell_radius:
        raise ValueError(f"position at r={pos.r} m lies outside the cell radius {grid.cell_radius} m")
    annulus = min(math.floor(pos.r * grid.n_annuli / grid.cell_radius), grid.n_annuli - 1)
    sector = min(math.floor(pos.phi * grid.n_sectors / TWO_PI), grid.n_sectors - 1)
    return CellIndex(annulus, sector)


class CpzState:
    """Occupancy bookkeeping for partition zooming.

    Tracks the users in each grid cell and, per active sector, the zoom
    distance: the outer radius of the highest occupied annulus. Joins only
    ever extend a sector's zoom; departures recompute it from the remaining
    occupants, so coverage can shrink again. Single writer per scenario;
    reads are safe to share.
    """

    def __init__(self, grid: PartitionGrid):
        self.grid = grid
        self.occupants: dict[CellIndex, set[Hashable]] = {}
        self.per_sector_zoom: dict[int, float] = {}
        self._cells: dict[Hashable, CellIndex] = {}
        self._positions: dict[Hashable, UePosition] = {}

    def __len__(self) -> int:
        return len(self._cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CpzState):
            return NotImplemented
        return (self.grid == other.grid
                and self.occupants == other.occupants
                and self.per_sector_zoom == other.per_sector_zoom
                and self._positions == other._positions)

    def join(self, pos: UePosition) -> None:
        """Insert a user; the sector's zoom grows to its annulus boundary if needed."""
        if pos.ue_id in self._cells:
            raise ValueError(f"ue_id {pos.ue_id!r} already present")
        cell = locate(pos, self.grid)
        self.occupants.setdefault(cell, set()).add(pos.ue_id)
        self._cells[pos.ue_id] = cell
        self._positions[pos.ue_id] = pos
        zoom = self.grid.annulus_outer_radius(cell.annulus)
        current = self.per_sector_zoom.get(cell.sector)
        if current is None or zoom > current:
            self.per_sector_zoom[cell.sector] = zoom

    def leave(self, ue_id: Hashable) -> None:
        """Remove a user and shrink or drop its sector's zoom accordingly."""
        if ue_id not in self._cells:
            raise KeyError(f"ue_id {ue_id!r} not present")
        cell = self._cells.pop(ue_id)
        del self._positions[ue_id]
        members = self.occupants[cell]
        members.discard(ue_id)
        if not members:
            del self.occupants[cell]
        remaining = [c.annulus for c in self.occupants if c.sector == cell.sector]
        if remaining:
            self.per_sector_zoom[cell.sector] = self.grid.annulus_outer_radius(max(remaining))
        else:
            del self.per_sector_zoom[cell.sector]

    def coverage_requirements(self) -> list[SectorCoverage]:
        """Per active sector: its index, angular width, and zoom distance.

        Empty when the cell holds no users, which is the base station's cue
        to sleep.
        """
        theta = self.grid.sector_width()
        return [SectorCoverage(sector, theta, zoom)
                for sector, zoom in sorted(self.per_sector_zoom.items())]

    def max_zoom(self) -> float | None:
        """Largest per-sector zoom distance, or None when the cell is empty."""
        if not self.per_sector_zoom:
            return None
        return max(self.per_sector_zoom.values())

    def sector_of(self, ue_id: Hashable) -> int:
        return self._cells[ue_id].sector

    def ue_positions(self) -> dict[Hashable, UePosition]:
        """Snapshot of all tracked users keyed by ue_id (join order preserved)."""
        return dict(self._positions)
