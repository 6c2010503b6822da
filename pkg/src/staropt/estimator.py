"""Threshold-accepting lower bounds for the star discrepancy.

A (1+1) random walk on the evaluation grid keeps a move when the objective
drops by no more than a threshold that decays linearly to 0; the largest
value ever visited is a valid lower bound because every grid corner's
two-sided local value is one.  A final greedy climb guarantees the reported
corner is a local maximum of the grid objective.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .discrepancy import LOWER_BOUND, DiscrepancyBound, Grid, padded_axes
from .sequence import PointSet

CALIBRATION_PAIRS = 100
DRAWS_PER_MOVE = 7


@dataclass(frozen=True)
class TAConfig:
    """Search-effort knobs for the threshold-accepting estimator.

    The seed may be a plain integer or a tuple of non-negative integers;
    run r draws from a private stream keyed by (seed..., r).
    """

    iterations: int = 4000
    runs: int = 10
    seed: int | tuple = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        parts = self.seed if isinstance(self.seed, tuple) else (self.seed,)
        if any(int(part) < 0 for part in parts):
            raise ValueError("seed entries must be >= 0")

    def run_entropy(self, run_index: int) -> tuple:
        parts = self.seed if isinstance(self.seed, tuple) else (self.seed,)
        return parts + (run_index,)


@dataclass(frozen=True)
class TARunResult:
    value: float
    indices: tuple[int, ...]
    evaluations: int


@njit(cache=True)
def _corner_value(coords, axes, idx):
    n, d = coords.shape
    volume = 1.0
    for j in range(d):
        volume *= axes[j, idx[j]]
    open_count = 0
    closed_count = 0
    for i in range(n):
        strict = True
        inside = True
        for j in range(d):
            x = coords[i, j]
            y = axes[j, idx[j]]
            if x > y:
                inside = False
                break
            if x >= y:
                strict = False
        if inside:
            closed_count += 1
            if strict:
                open_count += 1
    t1 = volume - open_count / float(n)
    t2 = closed_count / float(n) - volume
    return t1 if t1 > t2 else t2


@njit(cache=True)
def _perturb(idx, u, pos, lens, d, kmax, radius):
    """Move 1..kmax axis indices by up to +-radius; always eats 7 draws."""
    k = 1 + int(u[pos] * kmax)
    pos += 1
    for s in range(3):
        axis_u = u[pos]
        pos += 1
        step_u = u[pos]
        pos += 1
        if s < k:
            j = int(axis_u * d)
            v = 2.0 * step_u - 1.0
            if v >= 0.0:
                step = 1 + int(v * radius)
            else:
                step = -(1 + int(-v * radius))
            t = idx[j] + step
            if t < 0:
                t = 0
            if t >= lens[j]:
                t = lens[j] - 1
            idx[j] = t
    return pos


@njit(cache=True)
def _ta_search(coords, axes, lens, u, iterations):
    n, d = coords.shape
    kmax = min(d, 3)
    r0 = (n + 1 + 7) // 8
    if r0 < 1:
        r0 = 1
    pos = 0
    evals = 0

    idx = np.empty(d, np.int64)
    for j in range(d):
        idx[j] = int(u[pos] * lens[j])
        pos += 1
    cur = _corner_value(coords, axes, idx)
    evals += 1
    best = cur
    best_idx = idx.copy()

    # Threshold scale from the local objective roughness around random corners.
    gaps = np.empty(CALIBRATION_PAIRS, np.float64)
    probe = np.empty(d, np.int64)
    for c in range(CALIBRATION_PAIRS):
        for j in range(d):
            probe[j] = int(u[pos] * lens[j])
            pos += 1
        base = _corner_value(coords, axes, probe)
        evals += 1
        if base > best:
            best = base
            best_idx = probe.copy()
        pos = _perturb(probe, u, pos, lens, d, kmax, r0)
        moved = _corner_value(coords, axes, probe)
        evals += 1
        if moved > best:
            best = moved
            best_idx = probe.copy()
        gaps[c] = abs(moved - base)
    t0 = -np.median(gaps)

    span = iterations - 1
    if span < 1:
        span = 1
    cand = np.empty(d, np.int64)
    for i in range(iterations):
        threshold = t0 * (1.0 - i / iterations)
        radius = 1 + int((r0 - 1) * (span - i) / span)
        if radius < 1:
            radius = 1
        for j in range(d):
            cand[j] = idx[j]
        pos = _perturb(cand, u, pos, lens, d, kmax, radius)
        value = _corner_value(coords, axes, cand)
        evals += 1
        if value > best:
            best = value
            best_idx = cand.copy()
        if value - cur >= threshold:
            for j in range(d):
                idx[j] = cand[j]
            cur = value

    # Greedy ascent from the best corner seen: ends at a grid-local maximum.
    improved = True
    while improved:
        improved = False
        for j in range(d):
            for step in (-1, 1):
                t = best_idx[j] + step
                if t < 0 or t >= lens[j]:
                    continue
                old = best_idx[j]
                best_idx[j] = t
                value = _corner_value(coords, axes, best_idx)
                evals += 1
                if value > best:
                    best = value
                    improved = True
                else:
                    best_idx[j] = old
    return best, best_idx, evals


def draw_budget(d: int, iterations: int) -> int:
    return d + CALIBRATION_PAIRS * (d + DRAWS_PER_MOVE) + iterations * DRAWS_PER_MOVE


def ta_run(points: PointSet, config: TAConfig, run_index: int = 0) -> TARunResult:
    """One threshold-accepting walk; returns the best corner it can certify."""
    if run_index < 0:
        raise ValueError("run_index must be >= 0")
    grid = Grid.from_points(points)
    axes, lens = padded_axes(grid)
    rng = np.random.default_rng(np.random.SeedSequence(config.run_entropy(run_index)))
    u = rng.random(draw_budget(points.d, config.iterations))
    value, idx, evals = _ta_search(points.coords, axes, lens, u, config.iterations)
    return TARunResult(
        value=float(value),
        indices=tuple(int(i) for i in idx),
        evaluations=int(evals),
    )


def ta_best_of(points: PointSet, config: TAConfig) -> DiscrepancyBound:
    """Best lower bound over independent restarts; the usual fitness call."""
    best = 0.0
    total = 0
    for run_index in range(config.runs):
        result = ta_run(points, config, run_index)
        total += result.evaluations
        if result.value > best:
            best = result.value
    return DiscrepancyBound(
        value=best,
        kind=LOWER_BOUND,
        evaluations=total,
        runs=config.runs,
        seed=config.seed,
    )
