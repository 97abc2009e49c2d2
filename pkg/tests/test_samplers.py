import bisect
import csv
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plancherel import _kernels
from plancherel.partitions import EMPTY, Partition, dimension, enumerate_partitions, parse_partition
from plancherel.samplers import (
    SampleBatch, SeededStream, lis_length, rsk_shape, sample_batch, sample_longest_increasing,
    sample_plancherel_growth, sample_plancherel_rsk, sample_poissonized, sample_uniform_permutation,
)


def naive_rsk(seq):
    """Row insertion with linear scans, no shortcuts."""
    rows = []
    for v in seq:
        for row in rows:
            bigger = [j for j, w in enumerate(row) if w > v]
            if not bigger:
                row.append(v)
                break
            j = bigger[0]
            row[j], v = v, row[j]
        else:
            rows.append([v])
    return tuple(len(r) for r in rows)


def patience(seq):
    tops = []
    for v in seq:
        j = bisect.bisect_left(tops, v)
        if j == len(tops):
            tops.append(v)
        else:
            tops[j] = v
    return len(tops)


def test_permutation_basics():
    assert sample_uniform_permutation(1, SeededStream(3, 0)).tolist() == [1]
    a = sample_uniform_permutation(3, SeededStream(11, 2))
    b = sample_uniform_permutation(3, SeededStream(11, 2))
    assert a.tolist() == b.tolist() and sorted(a.tolist()) == [1, 2, 3]
    with pytest.raises(ValueError):
        sample_uniform_permutation(0, SeededStream(1, 0))


def test_permutation_uniform_on_s4():
    rng = SeededStream(2024, 0).generator()
    draws = 100_000
    counts = {}
    for _ in range(draws):
        key = tuple(sample_uniform_permutation(4, rng).tolist())
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 24
    p = 1 / 24
    sd = math.sqrt(draws * p * (1 - p))
    assert all(abs(c - draws * p) <= 5 * sd for c in counts.values())


def test_rsk_examples():
    assert rsk_shape([2, 1, 3]) == (Partition((2, 1)), 2)
    n = 50
    assert rsk_shape(list(range(1, n + 1))) == (Partition((n,)), n)
    assert rsk_shape(list(range(n, 0, -1))) == (Partition((1,) * n), 1)
    assert rsk_shape([]) == (EMPTY, 0)


@pytest.mark.parametrize("bad", [[1, 1, 2], [0, 1], [1, 3], [[1, 2]]])
def test_rsk_rejects_non_permutations(bad):
    with pytest.raises(ValueError):
        rsk_shape(bad)


@settings(max_examples=200)
@given(st.permutations(list(range(1, 41))))
def test_rsk_matches_naive_insertion(perm):
    shape, lis = rsk_shape(perm)
    assert shape.parts == naive_rsk(perm)
    assert lis == patience(perm) == lis_length(np.array(perm))


def test_rsk_all_permutations_of_six_give_plancherel_counts():
    counts = {}
    for perm in itertools.permutations(range(1, 7)):
        shape = rsk_shape(perm).shape
        counts[shape] = counts.get(shape, 0) + 1
    assert counts == {lam: dimension(lam) ** 2 for lam in enumerate_partitions(6)}


def test_rsk_fallback_path_agrees():
    from plancherel.samplers import _rsk_rows, _rsk_rows_python
    rng = np.random.default_rng(5)
    perm = rng.permutation(3000).astype(np.int32)
    assert _rsk_rows(perm).tolist() == _rsk_rows_python(perm)


def test_growth_transition_probabilities_are_dimension_ratios():
    # from every lambda |- k <= 10, corner weights equal d(lambda+box) / ((k+1) d(lambda))
    for k in range(11):
        for lam in enumerate_partitions(k):
            rows = np.zeros(k + 3, dtype=np.int64)
            cols = np.zeros(k + 3, dtype=np.int64)
            rows[: len(lam)] = lam.parts
            conj = [sum(1 for p in lam.parts if p > j) for j in range(k + 2)]
            cols[: len(conj)] = conj
            corner_rows, probs = _kernels.growth_step_weights(rows, cols, len(lam))
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)
            for r, p in zip(corner_rows, probs):
                parts = list(lam.parts) + [0]
                parts[r] += 1
                bigger = Partition(tuple(v for v in parts if v))
                expected = dimension(bigger) / ((k + 1) * dimension(lam))
                assert p == pytest.approx(expected, rel=1e-12)


def test_growth_first_steps():
    assert sample_plancherel_growth(1, SeededStream(0, 0)) == Partition((1,))
    draws = [sample_plancherel_growth(2, SeededStream(9, i)) for i in range(4000)]
    frac = sum(lam == Partition((2,)) for lam in draws) / len(draws)
    assert abs(frac - 0.5) <= 5 * math.sqrt(0.25 / len(draws))


def test_samplers_handle_zero():
    assert sample_plancherel_rsk(0, SeededStream(1, 0)) == EMPTY
    assert sample_plancherel_growth(0, SeededStream(1, 0)) == EMPTY
    assert sample_longest_increasing(0, SeededStream(1, 0)) == 0


def test_rsk_three_frequency():
    batch = sample_batch("rsk", 3, 20_000, 77, threads=1)
    frac = sum(lam == Partition((2, 1)) for lam in batch.draws) / len(batch)
    assert abs(frac - 2 / 3) <= 5 * math.sqrt(2 / 9 / len(batch))


def test_longest_increasing_matches_rsk_first_part():
    for i in range(20):
        s = SeededStream(31, i)
        assert sample_longest_increasing(500, s) == sample_plancherel_rsk(500, s).part(1)


@pytest.fixture(scope="module")
def poisson_t1():
    return sample_batch("poissonized", 1.0, 100_000, 4242, threads=1)


def test_poissonized_empty_frequency(poisson_t1):
    p = math.exp(-1.0)
    freq = sum(lam == EMPTY for lam in poisson_t1.draws)
    assert abs(freq - p * len(poisson_t1)) <= 5 * math.sqrt(len(poisson_t1) * p * (1 - p))


def test_poissonized_low_weight_frequencies(poisson_t1):
    draws = len(poisson_t1)
    counts = {}
    for lam in poisson_t1.draws:
        counts[lam] = counts.get(lam, 0) + 1
    for n in range(5):
        for lam in enumerate_partitions(n):
            p = math.exp(-1.0) * (dimension(lam) / math.factorial(n)) ** 2
            sd = math.sqrt(draws * p * (1 - p))
            assert abs(counts.get(lam, 0) - draws * p) <= 5 * sd, lam
    assert poisson_t1.sizes == [lam.weight for lam in poisson_t1.draws]


def test_poissonized_small_t():
    t = 0.01
    batch = sample_batch("poissonized", t, 50_000, 99, threads=1)
    p = t * math.exp(-t)
    freq = sum(lam == Partition((1,)) for lam in batch.draws)
    assert abs(freq - p * len(batch)) <= 5 * math.sqrt(len(batch) * p * (1 - p))
    with pytest.raises(ValueError):
        sample_poissonized(0.0, SeededStream(1, 0))


def test_batches_are_deterministic_and_seed_isolated():
    a = sample_batch("rsk", 200, 12, 5, threads=1)
    b = sample_batch("rsk", 200, 12, 5, threads=3)
    c = sample_batch("rsk", 200, 20, 5, threads=2)
    assert a.draws == b.draws == c.draws[:12]
    assert a.replica_indices == list(range(12))
    d = sample_batch("rsk", 200, 8, 5, start=12, threads=1)
    assert d.draws == c.draws[12:]


def test_batch_csv_and_npz(tmp_path):
    batch = sample_batch("growth", 30, 5, 1, threads=1)
    path = tmp_path / "b.csv"
    batch.write_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["replica_index", "n", "lambda", "lambda1", "num_parts"]
    for row, lam in zip(rows, batch.draws):
        assert parse_partition(row["lambda"]) == lam
        assert int(row["lambda1"]) == lam.part(1) and int(row["num_parts"]) == len(lam)
    batch.save_npz(tmp_path / "b.npz")
    back = SampleBatch.load_npz(tmp_path / "b.npz")
    assert back.draws == batch.draws and back.seeds == batch.seeds and back.sizes == batch.sizes


def test_stream_validation():
    with pytest.raises(ValueError):
        SeededStream(-1, 0)
    with pytest.raises(ValueError):
        SeededStream(1, -2)
    with pytest.raises(ValueError):
        sample_batch("mcmc", 5, 1, 0)
