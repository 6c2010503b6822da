"""Local discrepancies and exact star discrepancy by grid enumeration.

The star discrepancy of a finite set is attained on the finite grid built
from the per-coordinate value sets (each augmented with 1), so an exact
evaluation needs at most (n+1)^d corner visits.  The enumerator below
walks that grid depth-first, filtering the point list per fixed-coordinate
prefix and skipping subtrees whose best possible value cannot beat the
running maximum; both shortcuts leave the returned maximum bit-identical
to full enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .sequence import PointSet

EXACT = "exact"
LOWER_BOUND = "lower_bound"

DEFAULT_CELL_BUDGET = 10**9


class BudgetExceededError(Exception):
    """Exact enumeration refused: the grid is larger than the cell budget."""

    def __init__(self, estimated_cells: int, budget: int):
        self.estimated_cells = estimated_cells
        self.budget = budget
        super().__init__(
            f"exact enumeration needs {estimated_cells} cells, budget is {budget}"
        )


@dataclass(frozen=True)
class DiscrepancyBound:
    """A discrepancy value tagged exact or lower-bound, with run metadata."""

    value: float
    kind: str
    evaluations: int = 0
    runs: int | None = None
    seed: int | tuple | None = None

    def __post_init__(self):
        if self.kind not in (EXACT, LOWER_BOUND):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"discrepancy value {self.value} outside [0, 1]")


@dataclass(frozen=True)
class Grid:
    """Per-coordinate sorted candidate corners: point values plus 1."""

    axes: tuple[np.ndarray, ...]

    @classmethod
    def from_points(cls, points: PointSet) -> "Grid":
        axes = []
        for j in range(points.d):
            values = np.unique(points.coords[:, j])
            if values.size == 0 or values[-1] != 1.0:
                values = np.append(values, 1.0)
            axes.append(values)
        return cls(tuple(axes))

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def cell_count(self) -> int:
        return math.prod(axis.size for axis in self.axes)

    def point(self, indices: Sequence[int]) -> "GridPoint":
        if len(indices) != self.d:
            raise ValueError("index count does not match grid dimension")
        y = np.array([self.axes[j][i] for j, i in enumerate(indices)])
        return GridPoint(tuple(int(i) for i in indices), y)


@dataclass(frozen=True)
class GridPoint:
    indices: tuple[int, ...]
    y: np.ndarray


def _as_point(y) -> np.ndarray:
    if isinstance(y, GridPoint):
        return y.y
    return np.asarray(y, dtype=np.float64)


def box_counts(y, points: PointSet) -> tuple[int, int]:
    """Open and closed box counts: points below y strictly / weakly in every axis."""
    y = _as_point(y)
    if y.shape != (points.d,):
        raise ValueError(f"test point has shape {y.shape}, expected ({points.d},)")
    open_count = int(np.all(points.coords < y, axis=1).sum())
    closed_count = int(np.all(points.coords <= y, axis=1).sum())
    return open_count, closed_count


def local_discrepancy(y, points: PointSet) -> float:
    """Absolute gap between the box volume at y and the open-box point fraction."""
    y = _as_point(y)
    open_count, _ = box_counts(y, points)
    volume = math.prod(y.tolist())
    return abs(volume - open_count / points.n)


def grid_local_value(y, points: PointSet) -> float:
    """Two-sided grid objective: max of the open-box and closed-box gaps.

    Not clamped at 0; only the grid-wide maximum is meaningful.
    """
    y = _as_point(y)
    open_count, closed_count = box_counts(y, points)
    volume = math.prod(y.tolist())
    n = points.n
    return max(volume - open_count / n, closed_count / n - volume)


@njit(cache=True)
def _sweep_last_axis(xs_weak, nw, xs_strict, ns, axis, axis_len, prefix_vol, nf, best):
    pw = 0
    ps = 0
    for t in range(axis_len):
        y = axis[t]
        while pw < nw and xs_weak[pw] <= y:
            pw += 1
        while ps < ns and xs_strict[ps] < y:
            ps += 1
        volume = prefix_vol * y
        t1 = volume - ps / nf
        t2 = pw / nf - volume
        value = t1 if t1 > t2 else t2
        if value > best:
            best = value
    return best


@njit(cache=True)
def _enumerate_max(coords, axes, axis_len):
    n, d = coords.shape
    nf = float(n)
    best = -1.0e300
    cells = 0

    if d == 1:
        xs = np.sort(coords[:, 0])
        best = _sweep_last_axis(xs, n, xs, n, axes[0], axis_len[0], 1.0, nf, best)
        return best, axis_len[0]

    cand = np.empty((d, n), np.int64)
    strict = np.empty((d, n), np.bool_)
    cnt = np.empty(d, np.int64)
    vol = np.empty(d, np.float64)
    pos = np.empty(d, np.int64)
    xs_weak = np.empty(n, np.float64)
    xs_strict = np.empty(n, np.float64)

    for i in range(n):
        cand[0, i] = i
        strict[0, i] = True
    cnt[0] = n
    vol[0] = 1.0

    depth = 0
    pos[0] = axis_len[0] - 1
    while True:
        t = pos[depth]
        if t < 0:
            if depth == 0:
                break
            depth -= 1
            pos[depth] -= 1
            continue
        y = axes[depth, t]
        newvol = vol[depth] * y
        # Largest value any corner below this prefix can reach.
        bound = cnt[depth] / nf
        if newvol > bound:
            bound = newvol
        if bound <= best:
            # Smaller axis values only shrink the bound: drop the whole level.
            pos[depth] = -1
            continue
        m = 0
        for c in range(cnt[depth]):
            pid = cand[depth, c]
            x = coords[pid, depth]
            if x <= y:
                cand[depth + 1, m] = pid
                strict[depth + 1, m] = strict[depth, c] and (x < y)
                m += 1
        bound = m / nf
        if newvol > bound:
            bound = newvol
        if bound <= best:
            pos[depth] = -1
            continue
        if depth == d - 2:
            nw = 0
            ns = 0
            for c in range(m):
                x = coords[cand[depth + 1, c], d - 1]
                xs_weak[nw] = x
                nw += 1
                if strict[depth + 1, c]:
                    xs_strict[ns] = x
                    ns += 1
            xs_weak[:nw].sort()
            xs_strict[:ns].sort()
            best = _sweep_last_axis(
                xs_weak, nw, xs_strict, ns, axes[d - 1], axis_len[d - 1], newvol, nf, best
            )
            cells += axis_len[d - 1]
            pos[depth] -= 1
        else:
            cnt[depth + 1] = m
            vol[depth + 1] = newvol
            depth += 1
            pos[depth] = axis_len[depth] - 1
    return best, cells


def padded_axes(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Pack variable-length axes into a rectangular array for the kernels."""
    lens = np.array([axis.size for axis in grid.axes], dtype=np.int64)
    packed = np.zeros((grid.d, int(lens.max())), dtype=np.float64)
    for j, axis in enumerate(grid.axes):
        packed[j, : axis.size] = axis
    return packed, lens


def exact_star_discrepancy(
    points: PointSet, cost_budget: int = DEFAULT_CELL_BUDGET
) -> DiscrepancyBound:
    """Exact star discrepancy via full grid enumeration.

    Raises :class:`BudgetExceededError` when the grid holds more than
    ``cost_budget`` corners; callers then fall back to the TA estimator.
    """
    grid = Grid.from_points(points)
    estimated = grid.cell_count
    if estimated > cost_budget:
        raise BudgetExceededError(estimated, cost_budget)
    axes, lens = padded_axes(grid)
    value, cells = _enumerate_max(points.coords, axes, lens)
    return DiscrepancyBound(value=float(value), kind=EXACT, evaluations=int(cells))
