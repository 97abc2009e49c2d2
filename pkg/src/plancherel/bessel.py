"""Discrete Bessel kernel numerics for the poissonized Plancherel measure.

Under the poissonized measure with parameter t the points {lambda_i - i} form
a determinantal process on the integers whose kernel is built from
J_m = J_m(2 sqrt t):

    K(x, y) = sqrt(t) (J_x J_{y+1} - J_{x+1} J_y) / (x - y),   x != y,
    K(x, x) = sum_{s >= 1} J_{x+s}^2.

K is an orthogonal projection on l^2(Z), which gives the count variance of a
set I as sum_{x in I, y not in I} K(x, y)^2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .limit_shape import theta_of_x

MAX_TABLE_ORDER = 50_000_000
_RESCALE_AT = 1e250


@dataclass(frozen=True)
class BesselTable:
    """J_m(2 sqrt t) for m = 0..max_order; negative orders by reflection.

    ``values`` holds the whole normalised recurrence, which extends past
    ``max_order``; only orders up to ``max_order`` carry the accuracy guarantee.
    """

    t: float
    max_order: int
    values: np.ndarray

    @property
    def z(self) -> float:
        return 2.0 * math.sqrt(self.t)

    def __call__(self, m: int) -> float:
        m = int(m)
        if abs(m) > self.max_order:
            raise IndexError(f"order {m} outside table (max {self.max_order})")
        v = float(self.values[abs(m)])
        return -v if (m < 0 and m % 2) else v

    def orders(self, lo: int, hi: int) -> np.ndarray:
        """J_m for m = lo..hi inclusive."""
        if max(abs(lo), abs(hi)) > self.max_order:
            raise IndexError(f"orders [{lo}, {hi}] outside table (max {self.max_order})")
        m = np.arange(lo, hi + 1)
        vals = self.values[np.abs(m)]
        return np.where((m < 0) & (m % 2 == 1), -vals, vals)

    def normalization_residual(self) -> float:
        """|J_0 + 2 sum_k J_2k - 1|."""
        v = self.values
        return abs(math.fsum([v[0]] + (2.0 * v[2::2]).tolist()) - 1.0)

    @cached_property
    def _tail_squares(self) -> np.ndarray:
        # tail[m] = sum_{j >= m} J_j^2 over the full recurrence; extended precision
        sq = self.values.astype(np.longdouble) ** 2
        return np.cumsum(sq[::-1])[::-1].astype(float)

    def square_sum_from(self, m: int) -> float:
        """sum_{j >= m} J_j^2, any integer m >= -max_order."""
        if m > self.max_order:
            return 0.0
        if m >= 0:
            return float(self._tail_squares[m])
        # sum over j in [m, -1] of J_{|j|}^2 plus the nonnegative tail
        head = self.values[1 : -m + 1] ** 2
        return math.fsum(head.tolist()) + float(self._tail_squares[0])


def miller_start(z: float, m_max: int) -> int:
    return max(m_max, math.ceil(z)) + math.ceil(10.0 * z ** (1.0 / 3.0)) + 50


def bessel_table(t: float, m_max: int) -> BesselTable:
    """J_0..J_{m_max} at z = 2 sqrt t by Miller's backward recurrence.

    Recurrence J_{m-1} = (2m/z) J_m - J_{m+1} from a start order well above
    both m_max and z, normalised with J_0 + 2 sum_k J_{2k} = 1.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    z = 2.0 * math.sqrt(t)
    start = miller_start(z, m_max)
    if start > MAX_TABLE_ORDER:
        raise MemoryError(f"Bessel table of order {start} exceeds the configured budget")
    f = np.zeros(start + 2)
    f[start] = 1e-300
    two_over_z = 2.0 / z
    nxt, cur = 0.0, 1e-300
    for m in range(start, 0, -1):
        prev = m * two_over_z * cur - nxt
        f[m - 1] = prev
        nxt, cur = cur, prev
        if abs(prev) > _RESCALE_AT:
            f[m - 1 :] /= _RESCALE_AT
            nxt /= _RESCALE_AT
            cur /= _RESCALE_AT
    norm = math.fsum([f[0]] + (2.0 * f[2::2]).tolist())
    values = f[: start + 1] / norm
    return BesselTable(t=float(t), max_order=m_max, values=values)


def kernel_value(x: int, y: int, table: BesselTable) -> float:
    if x == y:
        return kernel_diagonal(x, table)
    jx, jx1, jy, jy1 = table(x), table(x + 1), table(y), table(y + 1)
    return math.sqrt(table.t) * (jx * jy1 - jx1 * jy) / (x - y)


def kernel_diagonal(x: int, table: BesselTable) -> float:
    """K(x, x) = sum_{s >= 1} J_{x+s}^2, i.e. P(x is a point)."""
    return min(1.0, table.square_sum_from(int(x) + 1))


def kernel_matrix(xs, ys, table: BesselTable) -> np.ndarray:
    """K(x, y) on the grid xs x ys (no coincident points allowed)."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    lo = int(min(xs.min(), ys.min()))
    hi = int(max(xs.max(), ys.max())) + 1
    j = table.orders(lo, hi)
    jx, jx1 = j[xs - lo], j[xs + 1 - lo]
    jy, jy1 = j[ys - lo], j[ys + 1 - lo]
    diff = (xs[:, None] - ys[None, :]).astype(float)
    if np.any(diff == 0):
        raise ValueError("kernel_matrix needs disjoint point sets")
    return math.sqrt(table.t) * (np.outer(jx, jy1) - np.outer(jx1, jy)) / diff


def correlation_rho(points, table: BesselTable) -> float:
    """k-point correlation det[K(x_i, x_j)] (LU with partial pivoting)."""
    pts = [int(p) for p in points]
    if len(set(pts)) != len(pts):
        raise ValueError("correlation points must be distinct")
    k = len(pts)
    mat = np.empty((k, k))
    for a in range(k):
        for b in range(a, k):
            mat[a, b] = mat[b, a] = kernel_value(pts[a], pts[b], table)
    return float(np.linalg.det(mat))


@dataclass(frozen=True)
class KernelPrediction:
    t: float
    x: float
    z: float
    mean: float
    variance: float
    leading_mean: float
    leading_variance: float
    lower: int
    cutoff: int
    tail_bound: float

    def to_json(self) -> dict:
        return {
            "t": self.t, "x": self.x, "z": self.z,
            "mean_kernel": self.mean, "var_kernel": self.variance,
            "mean_lemma1": self.leading_mean, "var_lemma1": self.leading_variance,
            "cutoff": self.cutoff, "tail_bound": self.tail_bound,
        }

    def as_dict(self) -> dict:
        return asdict(self)


def interval_start(t: float, x: float, z: float) -> int:
    """Smallest integer of I_t = [2 sqrt(t) cos(theta_x) + z sqrt(log t), inf)."""
    return math.ceil(2.0 * math.sqrt(t) * math.cos(theta_of_x(x)) + z * math.sqrt(math.log(t)))


def default_cutoff(t: float) -> int:
    return math.ceil(2.0 * math.sqrt(t)) + math.ceil(10.0 * t ** (1.0 / 6.0)) + 50


def leading_order_moments(t: float, x: float, z: float) -> tuple[float, float]:
    """Leading-order mean and variance of #I_t."""
    theta = theta_of_x(x)
    log_t = math.log(t)
    mean = math.sqrt(t) * x - z * theta / math.pi * math.sqrt(log_t)
    return mean, log_t / (4.0 * math.pi**2)


def count_mean(a: int, cutoff: int, table: BesselTable) -> tuple[float, float]:
    """sum_{m=a}^{cutoff} K(m, m) and a bound on the dropped tail m > cutoff.

    sum_{m >= a} sum_{j > m} J_j^2 = sum_{j > a} (j - a) J_j^2, evaluated with
    fsum; the tail bound is the same sum restricted to j > cutoff.
    """
    top = table.values.size - 1
    j = np.arange(a + 1, top + 1)
    m = np.abs(j)
    sq = table.values[m] ** 2
    inside = j <= cutoff
    weights = (j - a).astype(float)
    mean = math.fsum((weights[inside] * sq[inside]).tolist()) \
        + (cutoff + 1 - a) * math.fsum(sq[~inside].tolist())
    tail = math.fsum(((j[~inside] - cutoff) * sq[~inside]).tolist())
    return mean, tail


def count_variance(a: int, cutoff: int, table: BesselTable, block: int = 256) -> float:
    """Var #([a, inf)) as sum_{x >= a} sum_{y < a} K(x, y)^2 over the window.

    Uses the projection property of K; all terms are positive, so there is no
    cancellation between the mean and the double sum.
    """
    xs = np.arange(a, cutoff + 1)
    ys = np.arange(-cutoff, a)
    if ys.size == 0:
        return 0.0
    partial = []
    for start in range(0, xs.size, block):
        k = kernel_matrix(xs[start : start + block], ys, table)
        partial.append(float(np.sum(k * k)))
    return math.fsum(partial)


def count_variance_direct(a: int, cutoff: int, table: BesselTable) -> float:
    """Var #I = sum_{x in I} K(x,x) - sum_{x,y in I} K(x,y)^2 (quadratic in the window)."""
    xs = np.arange(a, cutoff + 1)
    diag = np.array([kernel_diagonal(int(x), table) for x in xs])
    off = 0.0
    for i in range(xs.size - 1):
        row = kernel_matrix(xs[i : i + 1], xs[i + 1 :], table)[0]
        off += float(np.dot(row, row))
    return math.fsum(diag.tolist()) - math.fsum((diag**2).tolist()) - 2.0 * off


def predict_counts(t: float, x: float, z: float, *, max_widenings: int = 6) -> KernelPrediction:
    """Kernel mean and variance of #I_t under the poissonized measure."""
    if t < 2:
        raise ValueError("predict_counts requires t >= 2")
    if not 0 < x < 2:
        raise ValueError("x must lie in (0, 2)")
    a = interval_start(t, x, z)
    cutoff = default_cutoff(t)
    margin = math.ceil(10.0 * t ** (1.0 / 6.0)) + 50
    for _ in range(max_widenings):
        table = bessel_table(t, max(cutoff, abs(a)) + margin + 2)
        if a > cutoff:
            mean, tail = 0.0, 0.0
            break
        mean, tail = count_mean(a, cutoff, table)
        if tail < 1e-12:
            break
        cutoff += margin
        margin *= 2
    else:
        raise RuntimeError(f"tail bound {tail:.3g} not below 1e-12 after widening")
    variance = count_variance(a, cutoff, table) if a <= cutoff else 0.0
    lm, lv = leading_order_moments(t, x, z)
    return KernelPrediction(
        t=float(t), x=float(x), z=float(z), mean=mean, variance=variance,
        leading_mean=lm, leading_variance=lv, lower=a, cutoff=cutoff, tail_bound=tail,
    )
