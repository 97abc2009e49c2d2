"""Goodness-of-fit and moment statistics used by the experiments."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import optimize, stats

P_FLOOR = 1e-3


def normal_cdf(z):
    """Standard normal distribution function through erfc (no cancellation in either tail)."""
    if np.ndim(z) == 0:
        return 0.5 * math.erfc(-float(z) / math.sqrt(2.0))
    from scipy.special import erfc
    return 0.5 * erfc(-np.asarray(z, dtype=float) / math.sqrt(2.0))


def ks_statistic(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """sup_x |F_n(x) - F(x)| for a right-continuous F, ties and atoms allowed.

    Both one-sided parts are evaluated at the distinct sample values, the lower
    one against the left limit F(x-) so that step CDFs are handled exactly.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("ks_statistic needs at least one sample")
    values, counts = np.unique(x, return_counts=True)
    upto = np.cumsum(counts)
    below = upto - counts
    f_at = np.array([cdf(v) for v in values], dtype=float)
    f_left = np.array([cdf(np.nextafter(v, -np.inf)) for v in values], dtype=float)
    d_plus = np.max(upto / n - f_at)
    d_minus = np.max(f_left - below / n)
    return float(max(d_plus, d_minus, 0.0))


@dataclass(frozen=True)
class Chi2Result:
    statistic: float
    p_value: float
    dof: int
    cells: int


def _pool(observed: np.ndarray, expected: np.ndarray, min_expected: float):
    """Merge adjacent cells left to right until each expected count reaches ``min_expected``."""
    obs_out, exp_out = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp_out:
            obs_out[-1] += acc_o
            exp_out[-1] += acc_e
        else:
            obs_out.append(acc_o)
            exp_out.append(acc_e)
    return np.array(obs_out), np.array(exp_out)


def chi2_gof(observed: Sequence[float], expected: Sequence[float], *, fitted_params: int = 0,
             min_expected: float = 5.0) -> Chi2Result:
    """Pearson chi-square of cell counts against cell probabilities.

    Cells with expected count below ``min_expected`` are pooled with their
    neighbours; the p-value is the upper chi-square tail with
    cells - 1 - fitted_params degrees of freedom.
    """
    obs = np.asarray(observed, dtype=float)
    prob = np.asarray(expected, dtype=float)
    if obs.shape != prob.shape or obs.ndim != 1:
        raise ValueError("observed and expected must be matching 1-d sequences")
    if np.any(prob < 0) or abs(prob.sum() - 1.0) > 1e-10:
        raise ValueError("expected probabilities must be nonnegative and sum to 1")
    total = obs.sum()
    o, e = _pool(obs, prob * total, min_expected)
    dof = o.size - 1 - fitted_params
    if o.size < 2 or dof < 1:
        raise ValueError("too few cells after pooling for a chi-square test")
    statistic = float(np.sum((o - e) ** 2 / e))
    return Chi2Result(statistic, float(stats.chi2.sf(statistic, dof)), dof, int(o.size))


def pmf_chi2(samples: Sequence, pmf: Mapping) -> Chi2Result:
    """Chi-square of categorical samples against an exact pmf (keys must cover the samples)."""
    keys = list(pmf)
    index = {k: i for i, k in enumerate(keys)}
    counts = np.zeros(len(keys))
    for s in samples:
        if s not in index:
            raise ValueError(f"sample {s!r} has zero probability")
        counts[index[s]] += 1
    prob = np.array([float(pmf[k]) for k in keys])
    order = np.argsort(-prob, kind="stable")
    return chi2_gof(counts[order], prob[order] / prob.sum())


@dataclass(frozen=True)
class CovEstimate:
    estimate: float
    stderr: float
    count: int


def empirical_cov(x: Sequence[float], y: Sequence[float]) -> CovEstimate:
    """Unbiased covariance with a leave-one-out jackknife standard error."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    n = a.size
    if b.size != n:
        raise ValueError("x and y must have equal length")
    if n < 10:
        raise ValueError("empirical_cov needs at least 10 pairs")
    d = a - a.mean()
    e = b - b.mean()
    s = float(np.dot(d, e))
    est = s / (n - 1)
    # removing pair i changes the centred cross product by n/(n-1) d_i e_i
    loo = (s - n / (n - 1) * d * e) / (n - 2)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return CovEstimate(est, se, n)


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def variance_stderr(values: Sequence[float]) -> tuple[float, float]:
    """Sample variance and its standard error from the fourth central moment."""
    v = np.asarray(values, dtype=float)
    n = v.size
    var = float(v.var(ddof=1))
    m4 = float(np.mean((v - v.mean()) ** 4))
    return var, math.sqrt(max(m4 - var**2 * (n - 3) / (n - 1), 0.0) / n)


@dataclass(frozen=True)
class LatticeNormalFit:
    mean: float
    sd: float
    chi2: Chi2Result
    support: tuple[int, int]
    cell_counts: tuple[int, ...]


def _cell_masses(lo: int, hi: int, m: float, s: float) -> np.ndarray:
    edges = np.arange(lo, hi + 2) - 0.5
    cdf = normal_cdf((edges - m) / s)
    cdf[0], cdf[-1] = 0.0, 1.0  # tails folded into the end cells
    return np.diff(cdf)


def lattice_normal_test(values: Sequence[int]) -> LatticeNormalFit:
    """Chi-square test that integer data come from a discretised normal law.

    Cell c carries Phi((c + 1/2 - m)/s) - Phi((c - 1/2 - m)/s); m and s are
    fitted by maximum likelihood of that discrete model, costing two degrees
    of freedom.
    """
    v = np.asarray(values)
    if not np.all(v == np.round(v)):
        raise ValueError("lattice_normal_test expects integer-valued data")
    v = v.astype(np.int64)
    lo, hi = int(v.min()), int(v.max())
    counts = np.bincount(v - lo, minlength=hi - lo + 1)

    def nll(params):
        m, log_s = params
        p = _cell_masses(lo, hi, m, math.exp(log_s))
        return -float(np.sum(counts * np.log(np.maximum(p, 1e-300))))

    start = np.array([v.mean(), math.log(max(v.std(), 0.3))])
    res = optimize.minimize(nll, start, method="Nelder-Mead",
                            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000})
    m, s = float(res.x[0]), math.exp(float(res.x[1]))
    result = chi2_gof(counts, _cell_masses(lo, hi, m, s), fitted_params=2)
    return LatticeNormalFit(m, s, result, (lo, hi), tuple(int(c) for c in counts))


def two_sample_discrete(a: Sequence[int], b: Sequence[int], min_expected: float = 5.0) -> Chi2Result:
    """Chi-square homogeneity test for two integer samples, sparse values pooled."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo = int(min(a.min(), b.min()))
    width = int(max(a.max(), b.max())) - lo + 1
    ca = np.bincount(a - lo, minlength=width).astype(float)
    cb = np.bincount(b - lo, minlength=width).astype(float)
    # pool adjacent values until the smaller sample expects min_expected
    frac = min(a.size, b.size) / (a.size + b.size)
    pa, pb = [], []
    acc_a = acc_b = 0.0
    for x, y in zip(ca, cb):
        acc_a += x
        acc_b += y
        if (acc_a + acc_b) * frac >= min_expected:
            pa.append(acc_a)
            pb.append(acc_b)
            acc_a = acc_b = 0.0
    if acc_a or acc_b:
        if pa:
            pa[-1] += acc_a
            pb[-1] += acc_b
        else:
            pa.append(acc_a)
            pb.append(acc_b)
    if len(pa) < 2:
        raise ValueError("samples occupy a single pooled cell")
    stat, p, dof, _ = stats.chi2_contingency(np.array([pa, pb]), correction=False)
    return Chi2Result(float(stat), float(p), int(dof), len(pa))


def two_sample_ks(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    res = stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return float(res.statistic), float(res.pvalue)


def majority_pass(p_values: Sequence[float], needed: int, floor: float = P_FLOOR) -> bool:
    return sum(p > floor for p in p_values) >= needed


def strictly_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class StatSummary:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    ks_statistic: float | None
    chi2_statistic: float | None
    chi2_p: float | None
    count: int

    def as_dict(self) -> dict:
        return asdict(self)


def summarize(values: Sequence[float], *, cdf: Callable[[float], float] | None = None,
              lattice: Sequence[int] | None = None) -> StatSummary:
    """Moments of ``values``; optional KS against ``cdf`` and lattice normality of ``lattice``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("summarize needs at least one value")
    var = float(v.var(ddof=1)) if v.size > 1 else 0.0
    skew = float(stats.skew(v)) if v.size > 2 and var > 0 else 0.0
    kurt = float(stats.kurtosis(v)) if v.size > 3 and var > 0 else 0.0
    ks = ks_statistic(v, cdf) if cdf is not None else None
    chi_stat = chi_p = None
    if lattice is not None:
        fit = lattice_normal_test(lattice)
        chi_stat, chi_p = fit.chi2.statistic, fit.chi2.p_value
    return StatSummary(float(v.mean()), var, skew, kurt, ks, chi_stat, chi_p, int(v.size))
