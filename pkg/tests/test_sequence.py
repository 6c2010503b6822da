import numpy as np
import pytest

from staropt.sequence import (
    MAX_DIMENSION,
    GeneratingVector,
    Genotype,
    Permutation,
    PointSet,
    first_primes,
    generate,
    genotype_to_vector,
    halton_point,
    radical_inverse,
    random_genotype,
    vector_to_genotype,
)

from oracles import naive_radical_inverse


def test_first_primes_match_sieve():
    limit = 8000
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    all_primes = np.flatnonzero(sieve)
    for d in (1, 2, 5, 30, 200):
        assert first_primes(d) == all_primes[:d].tolist()


def test_first_primes_bounds():
    with pytest.raises(ValueError):
        first_primes(0)
    with pytest.raises(ValueError):
        first_primes(MAX_DIMENSION + 1)


def test_radical_inverse_known_values():
    ident2 = Permutation.identity(2)
    assert [radical_inverse(i, ident2) for i in (1, 2, 3, 4)] == [
        0.5,
        0.25,
        0.75,
        0.125,
    ]
    ident3 = Permutation.identity(3)
    assert radical_inverse(1, ident3) == 1 / 3
    assert radical_inverse(2, ident3) == 2 / 3
    assert radical_inverse(3, ident3) == pytest.approx(1 / 9, abs=1e-16)
    with pytest.raises(ValueError):
        radical_inverse(0, ident2)


def test_frozen_reference_values():
    assert radical_inverse(6, Permutation.identity(2)) == 0.375
    scrambled = Permutation(3, (0, 2, 1))
    assert radical_inverse(5, scrambled) == pytest.approx(5 / 9, abs=1e-15)
    assert first_primes(25)[-1] == 97
    fourth = halton_point(4, GeneratingVector.identity(2))
    assert fourth[0] == 0.125
    assert fourth[1] == pytest.approx(4 / 9, abs=1e-15)


def test_generate_prefix_property():
    gv = genotype_to_vector(random_genotype(3, np.random.default_rng(14)))
    long = generate(40, gv)
    for n in (1, 7, 39):
        np.testing.assert_array_equal(generate(n, gv).coords, long.coords[:n])


def test_genotype_expands_with_fixed_zero():
    gv = genotype_to_vector(Genotype(((2, 1),)))
    assert tuple(p.map for p in gv.perms) == ((0, 1), (0, 2, 1))


def test_radical_inverse_scrambled_against_digit_sum():
    rng = np.random.default_rng(42)
    for base in (2, 3, 5, 7, 11):
        for _ in range(20):
            mapping = (0,) + tuple(
                int(v) for v in rng.permutation(np.arange(1, base))
            )
            perm = Permutation(base, mapping)
            i = int(rng.integers(1, 5000))
            got = radical_inverse(i, perm)
            want = naive_radical_inverse(i, base, mapping)
            assert abs(got - want) < 1e-14


def test_generate_matches_scalar_radical_inverse():
    gv = GeneratingVector.identity(4)
    points = generate(30, gv)
    for i in range(1, 31):
        for j, perm in enumerate(gv.perms):
            assert points.coords[i - 1, j] == radical_inverse(i, perm)


def test_generate_scrambled_matches_scalar():
    rng = np.random.default_rng(7)
    genotype = random_genotype(5, rng)
    gv = genotype_to_vector(genotype)
    points = generate(25, gv)
    for i in (1, 7, 25):
        np.testing.assert_array_equal(points.coords[i - 1], halton_point(i, gv))


def test_generate_validation():
    gv = GeneratingVector.identity(2)
    with pytest.raises(ValueError):
        generate(0, gv)


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation(3, (0, 1))
    with pytest.raises(ValueError):
        Permutation(3, (1, 0, 2))
    with pytest.raises(ValueError):
        Permutation(3, (0, 1, 1))
    with pytest.raises(ValueError):
        Permutation(1, (0,))


def test_generating_vector_requires_prime_bases_in_order():
    good = GeneratingVector.identity(3)
    assert [p.base for p in good.perms] == [2, 3, 5]
    with pytest.raises(ValueError):
        GeneratingVector((Permutation.identity(3), Permutation.identity(2)))


def test_genotype_roundtrip():
    rng = np.random.default_rng(3)
    for d in (1, 2, 3, 8):
        genotype = random_genotype(d, rng)
        gv = genotype_to_vector(genotype)
        assert gv.dimension == d
        assert gv.perms[0].map == (0, 1)
        for perm in gv.perms:
            assert perm.map[0] == 0
        back = vector_to_genotype(gv)
        assert back == genotype


def test_genotype_validation():
    with pytest.raises(ValueError):
        Genotype(((1, 1),))
    with pytest.raises(ValueError):
        Genotype(((0, 1),))


def test_random_genotype_deterministic():
    a = random_genotype(6, np.random.default_rng(9))
    b = random_genotype(6, np.random.default_rng(9))
    assert a == b


def test_point_set_validation():
    with pytest.raises(ValueError):
        PointSet(np.array([[0.5, 1.0]]))
    with pytest.raises(ValueError):
        PointSet(np.array([[-0.1, 0.2]]))
    with pytest.raises(ValueError):
        PointSet(np.zeros((0, 2)))
    ps = PointSet(np.array([[0.5, 0.25], [0.0, 0.75]]))
    assert ps.n == 2 and ps.d == 2


def test_high_dimension_generation():
    points = generate(4, GeneratingVector.identity(MAX_DIMENSION))
    assert points.d == MAX_DIMENSION
    assert np.all((points.coords >= 0) & (points.coords < 1))
    assert points.coords[0, -1] == 1 / 1223
