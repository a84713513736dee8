"""Rectangular workspace partition, membership tests, and labeling.

The workspace is a single layer of equally sized cubic cells of side
``D = 2*(reach + tube)``, where ``reach`` bounds the distance from the object
center to any physical point of the coupled system and ``tube`` is the
tracking-tube radius. Cells are half-open boxes (lower face included), so the
cover is disjoint. Indices are 1-based and serpentine over the x-y grid:
row 0 runs +x, row 1 runs -x, and so on, which makes consecutive indices
face-adjacent along the walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig


@dataclass(frozen=True)
class PartitionConfig:
    reach: float  # upper bound on system extent from the object center (m)
    tube: float  # tracking tube radius l0 (m)
    nx: int
    ny: int
    origin_center: np.ndarray  # center of region 1 (m)
    nz: int = 1

    def __post_init__(self):
        object.__setattr__(
            self, "origin_center", np.asarray(self.origin_center, dtype=float).reshape(3)
        )

    @property
    def side(self) -> float:
        return 2.0 * (self.reach + self.tube)


@dataclass(frozen=True)
class Region:
    index: int  # 1-based serpentine index
    center: np.ndarray
    grid: tuple  # (ix, iy) grid coordinates
    labels: frozenset = frozenset()


class Partition:
    """Immutable grid of regions with serpentine indexing."""

    def __init__(self, cfg: PartitionConfig, labeling: dict | None = None):
        if cfg.reach <= 0.0 or cfg.tube <= 0.0:
            raise InvalidConfig("reach and tube must be positive")
        if cfg.nx < 1 or cfg.ny < 1:
            raise InvalidConfig("grid extents must be at least 1x1")
        if cfg.nz != 1:
            raise InvalidConfig("only single-layer partitions are supported")
        self.cfg = cfg
        labeling = labeling or {}
        regions = []
        for j in range(1, cfg.nx * cfg.ny + 1):
            ix, iy = self._grid_of_index(j, cfg.nx)
            center = cfg.origin_center + np.array([ix * cfg.side, iy * cfg.side, 0.0])
            regions.append(
                Region(j, center, (ix, iy), frozenset(labeling.get(j, frozenset())))
            )
        self.regions = tuple(regions)
        self._index_by_grid = {r.grid: r.index for r in regions}

    @staticmethod
    def _grid_of_index(j: int, nx: int):
        iy, k = divmod(j - 1, nx)
        ix = k if iy % 2 == 0 else nx - 1 - k
        return ix, iy

    def __len__(self) -> int:
        return len(self.regions)

    def region(self, j: int) -> Region:
        if not 1 <= j <= len(self.regions):
            raise KeyError(f"region index {j} out of range")
        return self.regions[j - 1]

    def center(self, j: int) -> np.ndarray:
        return self.region(j).center

    def labels(self, j: int) -> frozenset:
        return self.region(j).labels

    def box(self, j: int):
        """(lo, hi) corners of the half-open box of region j."""
        c = self.center(j)
        h = self.cfg.reach + self.cfg.tube
        return c - h, c + h

    def contains(self, j: int, p: np.ndarray) -> bool:
        """Half-open membership: lower face included, upper excluded."""
        lo, hi = self.box(j)
        p = np.asarray(p, dtype=float).reshape(3)
        return bool(np.all(p >= lo) and np.all(p < hi))

    def region_of(self, p: np.ndarray):
        """Index of the region containing p, or None outside the workspace.

        Index arithmetic gives the candidate; the exact half-open comparison
        confirms it (guarding against float rounding on the shared faces).
        """
        p = np.asarray(p, dtype=float).reshape(3)
        h = self.cfg.reach + self.cfg.tube
        rel = (p - self.cfg.origin_center + h) / self.cfg.side
        if p[2] - self.cfg.origin_center[2] < -h or p[2] - self.cfg.origin_center[2] >= h:
            return None
        base = np.floor(rel[:2]).astype(int)
        for dx in (0, -1, 1):
            for dy in (0, -1, 1):
                ix, iy = base[0] + dx, base[1] + dy
                if 0 <= ix < self.cfg.nx and 0 <= iy < self.cfg.ny:
                    j = self._index_by_grid[(ix, iy)]
                    if self.contains(j, p):
                        return j
        return None

    def neighbors(self, j: int) -> frozenset:
        """Face-adjacent regions (centers at distance exactly one side)."""
        ix, iy = self.region(j).grid
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            g = (ix + dx, iy + dy)
            if g in self._index_by_grid:
                out.append(self._index_by_grid[g])
        return frozenset(out)

    def union_closure_box(self, j: int, j2: int):
        """Closed bounding box of two equal or face-adjacent cells.

        For a face-adjacent pair the union is itself a box, so the bounding
        box adds nothing; taking the closure resolves the fact that a closed
        ball of radius reach+tube touches the excluded upper faces exactly.
        """
        lo1, hi1 = self.box(j)
        lo2, hi2 = self.box(j2)
        return np.minimum(lo1, lo2), np.maximum(hi1, hi2)


def build_partition(cfg: PartitionConfig, labeling: dict | None = None) -> Partition:
    return Partition(cfg, labeling)


def system_in_region(
    p_obj: np.ndarray, body_points: np.ndarray, j: int, partition: Partition
) -> bool:
    """Membership per the two-part definition: every body point inside the
    cell and the object center strictly within the tube radius of the cell
    center."""
    p_obj = np.asarray(p_obj, dtype=float).reshape(3)
    center = partition.center(j)
    if np.linalg.norm(p_obj - center) >= partition.cfg.tube:
        return False
    pts = np.atleast_2d(np.asarray(body_points, dtype=float))
    return all(partition.contains(j, p) for p in pts)


def ball_in_box(p: np.ndarray, radius: float, lo: np.ndarray, hi: np.ndarray, slack: float = 0.0) -> bool:
    """Closed ball inside a closed box, with optional numerical slack."""
    p = np.asarray(p, dtype=float).reshape(3)
    return bool(np.all(p - radius >= lo - slack) and np.all(p + radius <= hi + slack))
