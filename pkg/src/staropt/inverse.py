"""Smallest point counts reaching a target star discrepancy.

For a fixed genotype the smallest admissible n in [n_min, n_max] is found
by bisection on the discrepancy-at-n predicate; a multi-objective
evolutionary loop then trades off point count against discrepancy across
genotypes, keeping every nondominated (n, discrepancy) pair in an archive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discrepancy import (
    DEFAULT_CELL_BUDGET,
    DiscrepancyBound,
    exact_star_discrepancy,
)
from .estimator import TAConfig, ta_best_of
from .optimizer import (
    EXACT_MODE,
    TA_MODE,
    Individual,
    default_generations,
    final_evaluation,
    genotype_digest,
    make_offspring,
)
from .sequence import Genotype, generate, genotype_to_vector, random_genotype

INFEASIBLE = float("inf")


@dataclass(frozen=True)
class InverseProblem:
    """Find minimal n in [n_min, n_max] with discrepancy at most epsilon."""

    dimension: int
    epsilon: float
    n_min: int
    n_max: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")


@dataclass(frozen=True)
class InverseConfig:
    problem: InverseProblem
    mu: int = 25
    lam: int = 100
    crossover_prob: float = 0.7
    mutation_prob: float = 0.3
    shuffle_prob: float = 0.05
    generations: int | None = None
    mode: str = TA_MODE
    ta_runs: int = 10
    ta_iterations: int = 4000
    final_ta_runs: int = 50
    cost_budget: int = DEFAULT_CELL_BUDGET
    seed: int = 0

    def __post_init__(self):
        if self.mu < 1 or self.lam < 1:
            raise ValueError("population sizes must be >= 1")
        if abs(self.crossover_prob + self.mutation_prob - 1.0) > 1e-9:
            raise ValueError("crossover_prob and mutation_prob must sum to 1")
        if not 0.0 <= self.shuffle_prob <= 1.0:
            raise ValueError("shuffle_prob must lie in [0, 1]")
        if self.mode not in (EXACT_MODE, TA_MODE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.generations is not None and self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")

    @property
    def run_generations(self) -> int:
        if self.generations is not None:
            return self.generations
        return default_generations(self.problem.dimension)


def dominates(a: tuple[float, float], b: tuple[float, float]) -> bool:
    """Pareto dominance for minimization: no worse anywhere, better somewhere."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


@dataclass(frozen=True)
class ParetoEntry:
    genotype: Genotype
    n: int
    discrepancy: DiscrepancyBound
    digest: int

    @property
    def objectives(self) -> tuple[float, float]:
        return (float(self.n), self.discrepancy.value)


class ParetoArchive:
    """All mutually nondominated (n, discrepancy) pairs seen so far."""

    def __init__(self):
        self._entries: list[ParetoEntry] = []

    def add(self, entry: ParetoEntry) -> bool:
        for k, held in enumerate(self._entries):
            if held.digest == entry.digest and held.n == entry.n:
                # Same point re-scored: keep the sharper lower bound.
                if entry.discrepancy.value > held.discrepancy.value:
                    self._entries[k] = entry
                return False
        obj = entry.objectives
        for held in self._entries:
            held_obj = held.objectives
            if dominates(held_obj, obj) or held_obj == obj:
                return False
        self._entries = [
            held for held in self._entries if not dominates(obj, held.objectives)
        ]
        self._entries.append(entry)
        return True

    def entries(self) -> list[ParetoEntry]:
        return sorted(self._entries, key=lambda e: (e.n, e.discrepancy.value))

    def assert_nondominated(self) -> None:
        for a in self._entries:
            for b in self._entries:
                if a is not b and dominates(a.objectives, b.objectives):
                    raise RuntimeError(f"archive holds dominated pair {b.objectives}")

    def __len__(self) -> int:
        return len(self._entries)


def bisection_calls(n_min: int, n_max: int) -> int:
    """Worst-case predicate evaluations of :func:`bisection_evaluate`."""
    return int(math.floor(math.log2(n_max - n_min + 1))) + 1


def bisection_evaluate(
    genotype: Genotype, problem: InverseProblem, evaluator
) -> tuple[int, DiscrepancyBound] | None:
    """Smallest n in the bounds with evaluator(genotype, n) at most epsilon.

    Assumes the discrepancy-at-n predicate is monotone over the bounds;
    evaluator(genotype, n) returns a DiscrepancyBound and must be
    deterministic per (genotype, n).  Returns None when even n_max fails;
    that failure is always observed directly, never inferred.
    """
    lo, hi = problem.n_min, problem.n_max + 1
    probed: dict[int, DiscrepancyBound] = {}
    while lo < hi:
        mid = (lo + hi) // 2
        bound = evaluator(genotype, mid)
        probed[mid] = bound
        if bound.value <= problem.epsilon:
            hi = mid
        else:
            lo = mid + 1
    if lo > problem.n_max:
        return None
    return lo, probed[lo]


def crowding_distance(objectives: list[tuple[float, float]]) -> list[float]:
    """Spacing score per point; boundary points get infinity."""
    count = len(objectives)
    distance = [0.0] * count
    if count <= 2:
        return [INFEASIBLE] * count
    for axis in range(2):
        order = sorted(range(count), key=lambda i: objectives[i][axis])
        distance[order[0]] = INFEASIBLE
        distance[order[-1]] = INFEASIBLE
        lowest = objectives[order[0]][axis]
        highest = objectives[order[-1]][axis]
        spread = highest - lowest
        if spread <= 0 or not math.isfinite(spread):
            continue
        for k in range(1, count - 1):
            i = order[k]
            if distance[i] == INFEASIBLE:
                continue
            gap = objectives[order[k + 1]][axis] - objectives[order[k - 1]][axis]
            distance[i] += gap / spread
    return distance


def fast_nondominated_sort(objectives: list[tuple[float, float]]) -> list[list[int]]:
    count = len(objectives)
    dominated_by: list[list[int]] = [[] for _ in range(count)]
    counts = [0] * count
    fronts: list[list[int]] = [[]]
    for i in range(count):
        for j in range(count):
            if i == j:
                continue
            if dominates(objectives[i], objectives[j]):
                dominated_by[i].append(j)
            elif dominates(objectives[j], objectives[i]):
                counts[i] += 1
        if counts[i] == 0:
            fronts[0].append(i)
    current = 0
    while fronts[current]:
        nxt: list[int] = []
        for i in fronts[current]:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        current += 1
        fronts.append(nxt)
    fronts.pop()
    return fronts


def nsga2_select(pop, count: int) -> list:
    """count survivors: front rank, then crowding distance, then list order.

    Each member of pop must expose an `objectives` pair to minimize.
    """
    if count > len(pop):
        raise ValueError("cannot select more individuals than offered")
    objectives = [m.objectives for m in pop]
    chosen: list[int] = []
    for front in fast_nondominated_sort(objectives):
        if len(chosen) + len(front) <= count:
            chosen.extend(front)
            if len(chosen) == count:
                break
            continue
        spacing = crowding_distance([objectives[i] for i in front])
        ranked = sorted(
            range(len(front)), key=lambda k: (-spacing[k], front[k])
        )
        chosen.extend(front[k] for k in ranked[: count - len(chosen)])
        break
    return [pop[i] for i in chosen]


@dataclass(frozen=True)
class InverseMember:
    """Population slot: a genotype with its bisection outcome.

    Infeasible members carry no bound and rank behind every feasible one
    through the sentinel objectives (n_max + 1, inf).
    """

    genotype: Genotype
    digest: int
    n: int | None
    discrepancy: DiscrepancyBound | None
    objectives: tuple[float, float]

    @property
    def feasible(self) -> bool:
        return self.n is not None


@dataclass(frozen=True)
class RescoredEntry:
    """Archive entry after the final high-effort re-evaluation."""

    entry: ParetoEntry
    final: DiscrepancyBound
    meets_epsilon: bool
    previous_value: float | None
    minimal: bool


@dataclass(frozen=True)
class InverseHistoryRow:
    generation: int
    feasible: int
    best_n: int | None
    best_value: float | None
    evaluations: int


@dataclass(frozen=True)
class InverseResult:
    archive: list[ParetoEntry]
    rescored: list[RescoredEntry]
    history: list[InverseHistoryRow]
    population: list[InverseMember]
    evaluations: int


def run_inverse(config: InverseConfig, progress=None) -> InverseResult:
    """Multi-objective search for small feasible point counts."""
    problem = config.problem
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0)))
    archive = ParetoArchive()
    memo: dict[tuple[int, int], DiscrepancyBound] = {}
    evaluations = 0

    def disc_at(genotype: Genotype, n: int) -> DiscrepancyBound:
        nonlocal evaluations
        digest = genotype_digest(genotype)
        key = (digest, n)
        if key in memo:
            return memo[key]
        points = generate(n, genotype_to_vector(genotype))
        if config.mode == EXACT_MODE:
            bound = exact_star_discrepancy(points, cost_budget=config.cost_budget)
        else:
            # Seeds fixed per (genotype, n): repeat queries cannot drift.
            ta = TAConfig(
                iterations=config.ta_iterations,
                runs=config.ta_runs,
                seed=(config.seed, digest, n),
            )
            bound = ta_best_of(points, ta)
        evaluations += 1
        memo[key] = bound
        return bound

    def assess(genotype: Genotype) -> InverseMember:
        digest = genotype_digest(genotype)
        located = bisection_evaluate(genotype, problem, disc_at)
        if located is None:
            sentinel = (float(problem.n_max + 1), INFEASIBLE)
            return InverseMember(genotype, digest, None, None, sentinel)
        n, bound = located
        archive.add(ParetoEntry(genotype, n, bound, digest))
        return InverseMember(genotype, digest, n, bound, (float(n), bound.value))

    population = [
        assess(random_genotype(problem.dimension, rng)) for _ in range(config.mu)
    ]
    history: list[InverseHistoryRow] = []

    def as_parent(member: InverseMember) -> Individual:
        return Individual(member.genotype, None, member.digest)

    for generation in range(1, config.run_generations + 1):
        parents = [as_parent(m) for m in population]
        offspring = [
            assess(make_offspring(parents, config, rng))
            for _ in range(config.lam)
        ]
        population = nsga2_select(population + offspring, config.mu)
        archive.assert_nondominated()

        feasible = [m for m in population if m.feasible]
        lead = min(feasible, key=lambda m: m.objectives) if feasible else None
        history.append(
            InverseHistoryRow(
                generation=generation,
                feasible=len(feasible),
                best_n=lead.n if lead else None,
                best_value=lead.discrepancy.value if lead else None,
                evaluations=evaluations,
            )
        )
        if progress is not None:
            progress(history[-1])

    rescored = []
    for entry in archive.entries():
        final = final_evaluation(
            entry.genotype,
            entry.n,
            config.seed,
            final_ta_runs=config.final_ta_runs,
            ta_iterations=config.ta_iterations,
            cost_budget=config.cost_budget,
        )
        previous = None
        minimal = True
        if entry.n > problem.n_min:
            previous = disc_at(entry.genotype, entry.n - 1).value
            minimal = previous > problem.epsilon
        rescored.append(
            RescoredEntry(
                entry=entry,
                final=final,
                meets_epsilon=final.value <= problem.epsilon,
                previous_value=previous,
                minimal=minimal,
            )
        )
    return InverseResult(
        archive=archive.entries(),
        rescored=rescored,
        history=history,
        population=population,
        evaluations=evaluations,
    )
