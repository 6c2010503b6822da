"""Evolutionary search over digit-permutation genotypes.

A (mu + lambda) scheme minimizes the star discrepancy of the point set a
genotype induces.  Each offspring is produced by exactly one variation
operator: partially matched crossover of two uniformly chosen parents, or
a partial uniform reshuffle of one.  Survivors come from tournaments over
parents plus offspring, with the incumbent best always retained.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from .discrepancy import (
    DEFAULT_CELL_BUDGET,
    BudgetExceededError,
    DiscrepancyBound,
    exact_star_discrepancy,
)
from .estimator import TAConfig, ta_best_of
from .sequence import Genotype, PointSet, generate, genotype_to_vector, random_genotype

EXACT_MODE = "exact"
TA_MODE = "ta"

# Seed-stream tags keeping every random decision on its own reproducible lane.
VARIATION_STREAM = 0
OFFSPRING_STREAM = 1
REEVAL_STREAM = 2
FINAL_STREAM = 3


def genotype_digest(genotype: Genotype) -> int:
    """Stable 64-bit fingerprint of the reduced permutations."""
    h = hashlib.sha256()
    h.update(np.int64(genotype.dimension).tobytes())
    for perm in genotype.reduced:
        h.update(np.asarray(perm, dtype=np.int64).tobytes())
    return int.from_bytes(h.digest()[:8], "little")


@dataclass(frozen=True)
class Individual:
    """A genotype with its scored discrepancy bound; fitness None until scored."""

    genotype: Genotype
    fitness: DiscrepancyBound | None
    digest: int

    @classmethod
    def scored(cls, genotype: Genotype, fitness: DiscrepancyBound) -> "Individual":
        return cls(genotype=genotype, fitness=fitness, digest=genotype_digest(genotype))

    @property
    def value(self) -> float:
        if self.fitness is None:
            raise ValueError("individual has not been evaluated")
        return self.fitness.value


def default_generations(dimension: int) -> int:
    if dimension <= 10:
        return 50
    if dimension <= 25:
        return 100
    return 200


@dataclass(frozen=True)
class GAConfig:
    """Run parameters; defaults follow the reference configuration."""

    dimension: int
    n_points: int
    mu: int = 25
    lam: int = 100
    crossover_prob: float = 0.7
    mutation_prob: float = 0.3
    shuffle_prob: float = 0.05
    tournament_size: int = 3
    generations: int | None = None
    mode: str = TA_MODE
    ta_runs: int = 10
    ta_iterations: int = 4000
    final_ta_runs: int = 50
    archive_size: int = 25
    cost_budget: int = DEFAULT_CELL_BUDGET
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.mu < 1 or self.lam < 1:
            raise ValueError("population sizes must be >= 1")
        if abs(self.crossover_prob + self.mutation_prob - 1.0) > 1e-9:
            raise ValueError("crossover_prob and mutation_prob must sum to 1")
        if not 0.0 <= self.shuffle_prob <= 1.0:
            raise ValueError("shuffle_prob must lie in [0, 1]")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
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
        return default_generations(self.dimension)


@dataclass(frozen=True)
class HistoryRow:
    generation: int
    best: float
    mean: float
    evaluations: int


class Archive:
    """Lowest-fitness genotypes seen so far, deduplicated by digest.

    A repeat sighting of a genotype keeps the larger fitness: estimates are
    lower bounds, so the maximum is the sharpest information available.
    """

    def __init__(self, size: int):
        if size < 1:
            raise ValueError("archive size must be >= 1")
        self.size = size
        self._items: dict[int, Individual] = {}

    def update(self, individuals) -> None:
        for ind in individuals:
            held = self._items.get(ind.digest)
            if held is None or ind.value > held.value:
                self._items[ind.digest] = ind
        if len(self._items) > self.size:
            ranked = sorted(self._items.values(), key=lambda i: i.value)
            self._items = {ind.digest: ind for ind in ranked[: self.size]}

    def best(self) -> Individual:
        if not self._items:
            raise ValueError("archive is empty")
        return min(self._items.values(), key=lambda i: i.value)

    def entries(self) -> list[Individual]:
        return sorted(self._items.values(), key=lambda i: i.value)

    def __len__(self) -> int:
        return len(self._items)


def pmx(a: np.ndarray, b: np.ndarray, cut1: int, cut2: int) -> np.ndarray:
    """Partially matched crossover: b's segment, the rest remapped from a."""
    size = a.size
    if not 0 <= cut1 <= cut2 <= size:
        raise ValueError("cut points out of range")
    child = np.empty(size, dtype=a.dtype)
    child[cut1:cut2] = b[cut1:cut2]
    to_parent = {int(b[k]): int(a[k]) for k in range(cut1, cut2)}
    segment = set(int(v) for v in b[cut1:cut2])
    for i in list(range(cut1)) + list(range(cut2, size)):
        v = int(a[i])
        while v in segment:
            v = to_parent[v]
        child[i] = v
    return child


def mutate_permutation(perm: np.ndarray, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Reshuffle a random subset of positions, each picked with prob."""
    out = perm.copy()
    picked = np.flatnonzero(rng.random(perm.size) < prob)
    if picked.size > 1:
        out[picked] = out[rng.permutation(picked)]
    return out


def crossover_genotypes(
    a: Genotype, b: Genotype, rng: np.random.Generator
) -> Genotype:
    reduced = []
    for pa, pb in zip(a.reduced, b.reduced):
        pa = np.asarray(pa, dtype=np.int64)
        pb = np.asarray(pb, dtype=np.int64)
        cut1 = int(rng.integers(0, pa.size + 1))
        cut2 = int(rng.integers(0, pa.size + 1))
        if cut1 > cut2:
            cut1, cut2 = cut2, cut1
        reduced.append(pmx(pa, pb, cut1, cut2))
    return Genotype(tuple(tuple(int(v) for v in perm) for perm in reduced))


def mutate_genotype(
    g: Genotype, prob: float, rng: np.random.Generator
) -> Genotype:
    reduced = []
    for perm in g.reduced:
        perm = np.asarray(perm, dtype=np.int64)
        reduced.append(mutate_permutation(perm, prob, rng))
    return Genotype(tuple(tuple(int(v) for v in perm) for perm in reduced))


def make_offspring(
    parents: list[Individual], config: GAConfig, rng: np.random.Generator
) -> Genotype:
    """One child by exactly one operator: crossover or mutation."""
    if rng.random() < config.crossover_prob:
        i = int(rng.integers(0, len(parents)))
        j = int(rng.integers(0, len(parents)))
        while len(parents) > 1 and j == i:
            j = int(rng.integers(0, len(parents)))
        return crossover_genotypes(parents[i].genotype, parents[j].genotype, rng)
    i = int(rng.integers(0, len(parents)))
    return mutate_genotype(parents[i].genotype, config.shuffle_prob, rng)


def tournament_select(
    pool: list[Individual], size: int, rng: np.random.Generator
) -> Individual:
    """Winner of one size-`size` tournament drawn with replacement.

    Ties keep the earliest draw, so a repeated sample cannot displace it.
    """
    winner = None
    for c in rng.integers(0, len(pool), size=size):
        ind = pool[int(c)]
        if ind.fitness is None:
            raise ValueError("tournament over unevaluated individuals")
        if winner is None or ind.value < winner.value:
            winner = ind
    return winner


def genotype_points(genotype: Genotype, n_points: int) -> PointSet:
    return generate(n_points, genotype_to_vector(genotype))


def evaluate_fitness(
    genotype: Genotype,
    config: GAConfig,
    stream: int = OFFSPRING_STREAM,
    generation: int = 0,
) -> DiscrepancyBound:
    """Score one genotype; TA seeds depend on (run, stage, genotype)."""
    points = genotype_points(genotype, config.n_points)
    if config.mode == EXACT_MODE:
        return exact_star_discrepancy(points, cost_budget=config.cost_budget)
    ta = TAConfig(
        iterations=config.ta_iterations,
        runs=config.ta_runs,
        seed=(config.seed, stream, generation, genotype_digest(genotype)),
    )
    return ta_best_of(points, ta)


def reevaluate_parents(
    parents: list[Individual], config: GAConfig, generation: int
) -> list[Individual]:
    """Fresh estimates for survivors; each keeps the larger of old and new.

    Estimates are lower bounds, so a parent's fitness never decreases here;
    lucky overestimates cannot survive generations unchallenged.
    """
    rescored = []
    for ind in parents:
        fresh = evaluate_fitness(ind.genotype, config, REEVAL_STREAM, generation)
        rescored.append(ind if fresh.value <= ind.value else replace(ind, fitness=fresh))
    return rescored


def final_evaluation(
    genotype: Genotype,
    n_points: int,
    seed: int,
    final_ta_runs: int = 50,
    ta_iterations: int = 4000,
    cost_budget: int = DEFAULT_CELL_BUDGET,
) -> DiscrepancyBound:
    """Exact value when the grid fits the budget, else a 50-run TA bound."""
    points = genotype_points(genotype, n_points)
    try:
        return exact_star_discrepancy(points, cost_budget=cost_budget)
    except BudgetExceededError:
        ta = TAConfig(
            iterations=ta_iterations,
            runs=final_ta_runs,
            seed=(seed, FINAL_STREAM, genotype_digest(genotype)),
        )
        return ta_best_of(points, ta)


@dataclass(frozen=True)
class GAResult:
    best: Individual
    final: DiscrepancyBound
    archive: list[Individual]
    history: list[HistoryRow]
    population: list[Individual]
    evaluations: int


def run_ga(config: GAConfig, progress=None) -> GAResult:
    """Full evolutionary run; deterministic for a fixed config."""
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, VARIATION_STREAM)))
    evaluations = 0

    def score(genotype: Genotype, stream: int, generation: int) -> Individual:
        nonlocal evaluations
        fitness = evaluate_fitness(genotype, config, stream, generation)
        evaluations += 1
        return Individual.scored(genotype, fitness)

    parents = [
        score(random_genotype(config.dimension, rng), OFFSPRING_STREAM, 0)
        for _ in range(config.mu)
    ]
    archive = Archive(config.archive_size)
    archive.update(parents)
    history: list[HistoryRow] = []

    for generation in range(1, config.run_generations + 1):
        offspring = [
            score(make_offspring(parents, config, rng), OFFSPRING_STREAM, generation)
            for _ in range(config.lam)
        ]
        if config.mode == TA_MODE:
            parents = reevaluate_parents(parents, config, generation)
            evaluations += len(parents)

        pool = parents + offspring
        incumbent = min(pool, key=lambda i: i.value)
        selected = [
            tournament_select(pool, config.tournament_size, rng)
            for _ in range(config.mu)
        ]
        if all(ind is not incumbent for ind in selected):
            worst = max(range(len(selected)), key=lambda k: selected[k].value)
            selected[worst] = incumbent

        previous_best = min(parents, key=lambda i: i.value).value
        parents = selected
        new_best = min(parents, key=lambda i: i.value).value
        if config.mode == EXACT_MODE and new_best > previous_best:
            raise RuntimeError(
                f"selection lost the incumbent: {new_best} > {previous_best}"
            )

        archive.update(pool)
        mean = float(np.mean([ind.value for ind in parents]))
        history.append(HistoryRow(generation, new_best, mean, evaluations))
        if progress is not None:
            progress(history[-1])

    best = archive.best()
    final = final_evaluation(
        best.genotype,
        config.n_points,
        config.seed,
        final_ta_runs=config.final_ta_runs,
        ta_iterations=config.ta_iterations,
        cost_budget=config.cost_budget,
    )
    return GAResult(
        best=best,
        final=final,
        archive=archive.entries(),
        history=history,
        population=parents,
        evaluations=evaluations,
    )
