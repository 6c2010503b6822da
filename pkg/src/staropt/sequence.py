"""Generalized Halton point sets from permutation generating vectors.

A point set is fully determined by one digit-scrambling permutation per
prime base.  The first coordinate uses base 2, the second base 3, and so
on through the first d primes.  Every permutation fixes 0, so generated
coordinates are never exactly 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

MAX_DIMENSION = 200


def first_primes(d: int) -> list[int]:
    """Return the first ``d`` primes in increasing order (trial division)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d > MAX_DIMENSION:
        raise ValueError(f"dimension {d} exceeds the configured cap of {MAX_DIMENSION}")
    primes: list[int] = []
    candidate = 2
    while len(primes) < d:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


@dataclass(frozen=True)
class Permutation:
    """A base-``b`` digit permutation with the fixpoint ``map[0] == 0``."""

    base: int
    map: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        if len(m) != self.base or sorted(m) != list(range(self.base)):
            raise ValueError(f"map {m} is not a permutation of 0..{self.base - 1}")
        if m[0] != 0:
            raise ValueError("permutation must fix 0")

    @classmethod
    def identity(cls, base: int) -> "Permutation":
        return cls(base, tuple(range(base)))


@dataclass(frozen=True)
class GeneratingVector:
    """Per-prime permutations defining a generalized Halton point set."""

    perms: tuple[Permutation, ...]

    def __post_init__(self):
        perms = tuple(self.perms)
        object.__setattr__(self, "perms", perms)
        if not perms:
            raise ValueError("need at least one permutation")
        bases = [p.base for p in perms]
        if bases != first_primes(len(perms)):
            raise ValueError(f"bases {bases} are not the first {len(perms)} primes")

    @property
    def dimension(self) -> int:
        return len(self.perms)

    @classmethod
    def identity(cls, d: int) -> "GeneratingVector":
        return cls(tuple(Permutation.identity(p) for p in first_primes(d)))


@dataclass(frozen=True)
class Genotype:
    """Optimizer representation: the per-base permutations with the 0 removed.

    ``reduced[j]`` permutes {1, .., p-1} for the (j+2)-th prime; the base-2
    permutation is omitted entirely because the fixpoint forces it to be
    the identity.  A d-dimensional problem therefore has d-1 entries.
    """

    reduced: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        reduced = tuple(tuple(int(v) for v in perm) for perm in self.reduced)
        object.__setattr__(self, "reduced", reduced)
        primes = first_primes(len(reduced) + 1)
        for j, perm in enumerate(reduced):
            p = primes[j + 1]
            if sorted(perm) != list(range(1, p)):
                raise ValueError(
                    f"reduced[{j}] = {perm} is not a permutation of 1..{p - 1}"
                )

    @property
    def dimension(self) -> int:
        return len(self.reduced) + 1


@dataclass(frozen=True)
class PointSet:
    """``n`` points in [0,1)^d, stored as an (n, d) float64 array."""

    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ValueError("coords must be a nonempty 2-d array")
        if np.any(coords < 0.0) or np.any(coords >= 1.0):
            raise ValueError("all coordinates must lie in [0, 1)")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def radical_inverse(i: int, perm: Permutation) -> float:
    """Scrambled radical inverse of ``i >= 1`` in the permutation's base.

    Digits of ``i`` are remapped through the permutation and mirrored
    around the radix point.  Accumulation runs from the deepest digit up
    so the largest term is added last.
    """
    if i < 1:
        raise ValueError("index must be >= 1")
    p = perm.base
    digits = []
    while i > 0:
        i, dig = divmod(i, p)
        digits.append(dig)
    value = 0.0
    for dig in reversed(digits):
        value = (value + perm.map[dig]) / p
    return value


def halton_point(i: int, gv: GeneratingVector) -> np.ndarray:
    """The ``i``-th point (i >= 1) of the generalized Halton set."""
    return np.array([radical_inverse(i, perm) for perm in gv.perms])


@njit(cache=True)
def _halton_block(n, bases, perm_table):
    d = bases.shape[0]
    out = np.empty((n, d))
    digits = np.empty(64, np.int64)
    for j in range(d):
        p = bases[j]
        for i in range(1, n + 1):
            k = 0
            rest = i
            while rest > 0:
                digits[k] = rest % p
                rest //= p
                k += 1
            value = 0.0
            for l in range(k - 1, -1, -1):
                value = (value + perm_table[j, digits[l]]) / p
            out[i - 1, j] = value
    return out


def generate(n: int, gv: GeneratingVector) -> PointSet:
    """First ``n`` points of the set, for indices i = 1..n."""
    if n < 1:
        raise ValueError("point count must be >= 1")
    bases = np.array([perm.base for perm in gv.perms], dtype=np.int64)
    table = np.zeros((gv.dimension, int(bases.max())), dtype=np.int64)
    for j, perm in enumerate(gv.perms):
        table[j, : perm.base] = perm.map
    return PointSet(_halton_block(n, bases, table))


def genotype_to_vector(g: Genotype) -> GeneratingVector:
    """Prepend the forced base-2 identity and restore the 0 fixpoint."""
    primes = first_primes(g.dimension)
    perms = [Permutation.identity(2)]
    for j, reduced in enumerate(g.reduced):
        perms.append(Permutation(primes[j + 1], (0,) + reduced))
    return GeneratingVector(tuple(perms))


def vector_to_genotype(gv: GeneratingVector) -> Genotype:
    """Drop the base-2 permutation and the leading 0 of every other one."""
    return Genotype(tuple(perm.map[1:] for perm in gv.perms[1:]))


def random_genotype(d: int, rng: np.random.Generator) -> Genotype:
    """Uniform genotype: an independent shuffle of 1..p-1 per base."""
    primes = first_primes(d)
    reduced = tuple(
        tuple(int(v) for v in rng.permutation(np.arange(1, p)))
        for p in primes[1:]
    )
    return Genotype(reduced)
