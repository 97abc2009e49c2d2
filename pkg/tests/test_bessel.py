import math

import numpy as np
import pytest
from scipy import integrate, special

from plancherel.bessel import (
    bessel_table, correlation_rho, count_variance, count_variance_direct, interval_start,
    kernel_diagonal, kernel_matrix, kernel_value, predict_counts,
)
from plancherel.partitions import dimension, enumerate_partitions, frobenius_points


def jv_integral(m, z):
    val, _ = integrate.quad(lambda tau: math.cos(m * tau - z * math.sin(tau)), 0, math.pi,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / math.pi


@pytest.mark.parametrize("t", [1.0, 1e2, 1e6])
def test_normalization_residual(t):
    table = bessel_table(t, 50)
    assert table.normalization_residual() <= 1e-10
    assert np.all(np.abs(table.values) <= 1.0)


@pytest.mark.parametrize("z", [0.5, 2.0, 10.0])
def test_against_integral_representation(z):
    table = bessel_table(z * z / 4, 20)
    for m in range(21):
        assert abs(table(m) - jv_integral(m, z)) <= 1e-9


def test_against_scipy_at_large_argument():
    for t in (1e4, 1e6):
        table = bessel_table(t, int(2 * math.sqrt(t)) + 200)
        m = np.arange(0, table.max_order + 1, 37)
        ref = special.jv(m, table.z)
        big = np.abs(ref) > 1e-200
        assert np.max(np.abs(table.values[m][big] - ref[big]) / np.abs(ref[big])) <= 1e-9


def test_small_argument_series():
    z = 1e-3
    table = bessel_table(z * z / 4, 5)
    series = z / 2 - z**3 / 16 + z**5 / 384
    assert abs(table(1) - series) <= 1e-12


def test_reflection_and_bounds():
    table = bessel_table(30.0, 40)
    for m in range(1, 40):
        assert table(-m) == (-1) ** m * table(m)
    with pytest.raises(IndexError):
        table(41)
    with pytest.raises(ValueError):
        bessel_table(0.0, 3)


def kernel_by_sum(x, y, table):
    # sum_{s >= 1} J_{x+s} J_{y+s}, truncated at the table end (far past the decay point)
    top = table.max_order - max(x, y)
    return math.fsum(table(x + s) * table(y + s) for s in range(1, top + 1))


@pytest.mark.parametrize("t", [1.0, 1e2, 1e4, 1e6])
def test_ratio_formula_matches_sum_representation(t):
    rng = np.random.default_rng(int(t))
    edge = int(2 * math.sqrt(t))
    terms = int(10 * t ** (1 / 3)) + 120
    table = bessel_table(t, edge + 2 * terms + 100)
    for _ in range(50):
        x, y = rng.integers(-edge - 20, edge + 20, 2)
        if x == y:
            continue
        assert abs(kernel_value(int(x), int(y), table) - kernel_by_sum(int(x), int(y), table)) <= 1e-8


def test_kernel_symmetry_and_small_t():
    table = bessel_table(100.0, 200)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x, y = (int(v) for v in rng.integers(-30, 30, 2))
        assert kernel_value(x, y, table) == kernel_value(y, x, table)
    tiny = bessel_table(1e-10, 20)
    for x in range(0, 5):
        for y in range(0, 5):
            assert abs(kernel_value(x, y, tiny)) <= 1e-9


def poissonized_point_probability(t, x, max_weight=8):
    total = 0.0
    for n in range(max_weight + 1):
        for lam in enumerate_partitions(n):
            if x in frobenius_points(lam):
                total += math.exp(-t) * t**n * (dimension(lam) / math.factorial(n)) ** 2
    return total


def test_diagonal_matches_small_t_enumeration():
    t = 0.01
    table = bessel_table(t, 30)
    for x in (-2, -1, 0, 1, 2):
        # the enumeration truncated at weight 8 misses mass of order t^9
        assert kernel_diagonal(x, table) == pytest.approx(poissonized_point_probability(t, x), abs=1e-12)


def test_diagonal_in_unit_interval():
    rng = np.random.default_rng(11)
    for _ in range(100):
        t = float(10 ** rng.uniform(-2, 4))
        table = bessel_table(t, int(2 * math.sqrt(t)) + 100)
        for x in rng.integers(-table.max_order + 1, table.max_order - 1, 10):
            assert 0.0 <= kernel_diagonal(int(x), table) <= 1.0


def test_diagonal_decreases_across_the_edge():
    t = 1e4
    table = bessel_table(t, 400)
    xs = np.arange(-100, 300)
    diag = np.array([kernel_diagonal(int(x), table) for x in xs])
    assert np.all(np.diff(diag) <= 1e-15)
    # density (1/pi) arccos(x / (2 sqrt t)) in the bulk
    assert diag[xs == -100][0] == pytest.approx(math.acos(-100 / 200) / math.pi, abs=0.01)
    assert diag[-1] < 1e-12


def test_correlation_functions():
    table = bessel_table(400.0, 200)
    assert correlation_rho([5], table) == pytest.approx(kernel_diagonal(5, table))
    rng = np.random.default_rng(2)
    for _ in range(100):
        x, y = (int(v) for v in rng.choice(np.arange(-60, 60), 2, replace=False))
        assert correlation_rho([x, y], table) <= kernel_diagonal(x, table) * kernel_diagonal(y, table) + 1e-15
        assert correlation_rho([x, y], table) >= -1e-15
    with pytest.raises(ValueError):
        correlation_rho([3, 3], table)


def test_kernel_matrix_matches_pointwise():
    table = bessel_table(50.0, 100)
    xs, ys = np.arange(0, 6), np.arange(-8, -2)
    mat = kernel_matrix(xs, ys, table)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert mat[i, j] == kernel_value(int(x), int(y), table)


@pytest.mark.parametrize("t", [100.0, 400.0])
def test_projection_and_direct_variance_agree(t):
    pred = predict_counts(t, 1.0, 0.0)
    table = bessel_table(t, pred.cutoff + 200)
    direct = count_variance_direct(pred.lower, pred.cutoff, table)
    assert pred.variance == pytest.approx(direct, abs=1e-10)
    assert count_variance(pred.lower, pred.cutoff, table) == pytest.approx(pred.variance, abs=1e-14)


def test_prediction_invariants_and_leading_order_values():
    pred = predict_counts(1e6, 1.0, 0.0)
    assert pred.leading_mean == pytest.approx(1000.0)
    assert pred.leading_variance == pytest.approx(math.log(1e6) / (4 * math.pi**2))
    assert pred.leading_variance == pytest.approx(0.34996, abs=2e-5)
    assert 0 <= pred.variance <= pred.mean
    assert pred.tail_bound < 1e-12
    assert set(pred.to_json()) == {"t", "x", "z", "mean_kernel", "var_kernel", "mean_lemma1",
                                   "var_lemma1", "cutoff", "tail_bound"}
    with pytest.raises(ValueError):
        predict_counts(1.0, 1.0, 0.0)


def test_mean_equals_sum_of_diagonal():
    t = 400.0
    pred = predict_counts(t, 0.7, 0.3)
    table = bessel_table(t, pred.cutoff + 200)
    direct = math.fsum(kernel_diagonal(m, table) for m in range(pred.lower, pred.cutoff + 1))
    assert pred.mean == pytest.approx(direct, abs=1e-10)
    assert pred.lower == interval_start(t, 0.7, 0.3)


def test_two_point_function_against_monte_carlo(poisson_batches):
    t = 400.0
    batch = poisson_batches[t]
    table = bessel_table(t, 200)
    sets = [set(frobenius_points(lam).explicit_points) for lam in batch.draws]
    tails = [frobenius_points(lam).tail_start for lam in batch.draws]
    for x, y in [(0, 5), (-10, 10), (20, 25), (-30, -29), (30, 36)]:
        hits = sum(1 for s, tail in zip(sets, tails)
                   if (x in s or x <= tail) and (y in s or y <= tail))
        p = hits / len(sets)
        rho = correlation_rho([x, y], table)
        se = math.sqrt(max(rho * (1 - rho), 1e-12) / len(sets))
        assert abs(p - rho) <= 3 * se, (x, y, p, rho)
