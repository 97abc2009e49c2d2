import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from plancherel.partitions import (
    EMPTY, NotDecreasing, Partition, PartitionError, TooLarge, burnside_sum, conjugate,
    count_frobenius_at_least, dimension, dimension_bruteforce, enumerate_partitions,
    format_partition, frobenius_points, log_dimension, make_partition, parse_partition,
    plancherel_pmf, profile_eval,
)


@st.composite
def partitions(draw, max_weight=30):
    n = draw(st.integers(0, max_weight))
    parts = []
    remaining = n
    largest = n
    while remaining:
        p = draw(st.integers(1, min(remaining, largest)))
        parts.append(p)
        remaining -= p
        largest = p
    return Partition(tuple(parts))


def test_make_partition_examples():
    lam = make_partition([3, 1])
    assert lam.parts == (3, 1) and lam.weight == 4
    assert make_partition([]) == EMPTY and EMPTY.weight == 0
    with pytest.raises(NotDecreasing):
        make_partition([1, 3])
    assert make_partition([1, 3], sort=True).parts == (3, 1)


@pytest.mark.parametrize("bad", [[2, 0], [3, -1], [0]])
def test_make_partition_rejects_nonpositive(bad):
    with pytest.raises(PartitionError):
        make_partition(bad)


def test_text_format_round_trip():
    assert format_partition(make_partition([3, 1, 1])) == "3,1,1"
    assert parse_partition("") == EMPTY
    assert parse_partition("4,2") == Partition((4, 2))


def test_conjugate_examples():
    assert conjugate(Partition((3, 1))) == Partition((2, 1, 1))
    assert conjugate(EMPTY) == EMPTY
    assert conjugate(Partition((2, 2))) == Partition((2, 2))


@given(partitions())
def test_conjugate_is_an_involution_preserving_weight(lam):
    mu = conjugate(lam)
    assert mu.weight == lam.weight
    assert conjugate(mu) == lam
    for j in range(1, lam.part(1) + 1):
        assert mu.part(j) == sum(1 for p in lam.parts if p >= j)


def test_profile_eval_examples():
    lam = Partition((3, 1))
    assert [profile_eval(lam, x) for x in (0.5, 1.0, 1.2, 2.1)] == [3, 3, 1, 0]
    assert profile_eval(lam, 0) == 3
    assert profile_eval(EMPTY, 0.7) == 0
    with pytest.raises(ValueError):
        profile_eval(lam, -0.1)


@given(partitions(), st.floats(0.001, 40.0))
def test_profile_is_left_continuous_step(lam, x):
    k = math.ceil(x)
    assert profile_eval(lam, x) == profile_eval(lam, k) == lam.part(k)


def test_dimension_examples():
    assert log_dimension(Partition((2, 1))).exact == 2
    assert log_dimension(Partition((3, 1))).exact == 3
    assert log_dimension(Partition((7,))).exact == 1
    assert log_dimension(EMPTY).exact == 1
    assert dimension_bruteforce(Partition((2, 1))) == 2
    assert dimension_bruteforce(Partition((3, 1))) == 3


def test_bruteforce_examples():
    assert dimension_bruteforce(Partition((2, 2))) == 2
    assert dimension_bruteforce(Partition((1, 1, 1))) == 1
    assert dimension_bruteforce(Partition((2, 1, 1))) == 3
    with pytest.raises(TooLarge):
        dimension_bruteforce(Partition((13,)))


def test_log_dimension_beyond_exact_range():
    lam = Partition((11, 10))
    d = log_dimension(lam)
    assert d.exact is None
    # hook formula for two rows: d = C(21,10) - C(21,9)
    assert d.log == pytest.approx(math.log(math.comb(21, 10) - math.comb(21, 9)), rel=1e-12)
    with pytest.raises(TooLarge):
        dimension(lam)


def test_conjugation_preserves_dimension():
    for n in range(13):
        for lam in enumerate_partitions(n):
            assert dimension(lam) == dimension(conjugate(lam))


def test_enumerate_partitions_examples():
    assert enumerate_partitions(3) == [Partition((3,)), Partition((2, 1)), Partition((1, 1, 1))]
    assert enumerate_partitions(0) == [EMPTY]
    assert len(enumerate_partitions(4)) == 5
    with pytest.raises(TooLarge):
        enumerate_partitions(41)


def test_partition_counts_match_euler_recurrence():
    # p(n) by the pentagonal number recurrence, independent of the generator
    p = [1]
    for n in range(1, 31):
        total, k = 0, 1
        while True:
            g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * (p[n - g1] + (p[n - g2] if g2 <= n else 0))
            k += 1
        p.append(total)
    for n in range(31):
        parts = enumerate_partitions(n)
        assert len(parts) == len(set(parts)) == p[n]
        assert all(lam.weight == n for lam in parts)


def test_plancherel_pmf_examples():
    pmf3 = plancherel_pmf(3)
    assert pmf3[Partition((2, 1))] == Fraction(4, 6)
    assert sum(dimension(lam) ** 2 for lam in plancherel_pmf(4)) == 24
    assert plancherel_pmf(0) == {EMPTY: 1}
    assert sum(plancherel_pmf(10).values()) == 1
    with pytest.raises(TooLarge):
        plancherel_pmf(21)


def test_burnside_small():
    assert burnside_sum(12) == math.factorial(12)


def test_frobenius_examples():
    f = frobenius_points(Partition((3, 1)))
    assert f.explicit_points == (2, -1) and f.tail_start == -3
    e = frobenius_points(EMPTY)
    assert e.explicit_points == () and e.tail_start == -1
    g = frobenius_points(Partition((2, 2)))
    assert g.explicit_points == (1, 0) and g.tail_start == -3


def test_count_examples():
    assert count_frobenius_at_least(Partition((3, 1)), -3) == 3
    assert count_frobenius_at_least(Partition((2, 1)), 0) == 1
    assert count_frobenius_at_least(EMPTY, 0) == 0


@given(partitions(), st.integers(-40, 40))
def test_count_matches_direct_enumeration(lam, a):
    # D(lambda) ∩ [a, inf) with the zero parts written out far enough
    depth = max(len(lam), -a) + 2
    points = [lam.part(i) - i for i in range(1, depth + 1)]
    assert count_frobenius_at_least(lam, a) == sum(1 for p in points if p >= a)


def test_counting_equivalence_random_triples():
    rng = random.Random(7)
    all_parts = [lam for n in range(16) for lam in enumerate_partitions(n)]
    for _ in range(1000):
        lam = rng.choice(all_parts)
        a = rng.randint(-20, 20)
        k = rng.randint(1, 25)
        assert (count_frobenius_at_least(lam, a) < k) == (lam.part(k) - k < a)


@settings(max_examples=50)
@given(st.integers(1, 9))
def test_frobenius_map_injective(n):
    sets = {frobenius_points(lam).explicit_points for lam in enumerate_partitions(n)}
    assert len(sets) == len(enumerate_partitions(n))
