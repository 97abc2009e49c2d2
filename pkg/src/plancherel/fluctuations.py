"""Fluctuations of a Young diagram around the limit shape.

Vertical deviation:  Delta_n(x) = lambda(sqrt(n) x) - sqrt(n) omega(x),
normalised:          Y_n(x) = 2 theta_x Delta_n(x) / sqrt(log n).
Rotated deviation:   Delta~_n(u) = sqrt(n) (lambda~_n(u) - Omega(u)),
normalised:          Y~_n(u) = pi Delta~_n(u) / sqrt(log n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np
from scipy import integrate

from .bessel import interval_start
from .limit_shape import RotatedProfile, omega, omega_rotated, theta_of_x
from .partitions import Partition, count_frobenius_at_least, profile_eval


@dataclass(frozen=True)
class FluctuationSample:
    n: float
    point: float
    delta: float
    y: float
    kind: Literal["vertical", "rotated"]


def _check_log_scale(n: float) -> None:
    if n < 3:
        raise ValueError("normalisation by sqrt(log n) needs n >= 3")


def column_index(n: int, x: float) -> int:
    """ceil(sqrt(n) x) with the lambda(0) = lambda_1 convention; exact at x = 2.

    A product within 1e-9 (relative) of an integer k is read as k, so that
    x = k / sqrt(n) lands on column k despite rounding in x.
    """
    if x == 2:
        return math.isqrt(4 * n - 1) + 1 if n > 0 else 1
    pos = math.sqrt(n) * x
    near = round(pos)
    if abs(pos - near) <= 1e-9 * max(1.0, pos):
        pos = near
    return max(1, math.ceil(pos))


def delta_vertical(lam: Partition, n: int, x: float) -> float:
    if not 0 <= x <= 2:
        raise ValueError("x must lie in [0, 2]")
    if n < 1:
        raise ValueError("n must be positive")
    return lam.part(column_index(n, x)) - math.sqrt(n) * omega(x)


def y_vertical(lam: Partition, n: int, x: float) -> float:
    if not 0 < x < 2:
        raise ValueError("x must lie in (0, 2)")
    _check_log_scale(n)
    return 2.0 * theta_of_x(x) * delta_vertical(lam, n, x) / math.sqrt(math.log(n))


def delta_vertical_many(draws: Sequence[Partition], n: int, x: float) -> np.ndarray:
    k = column_index(n, x)
    heights = np.array([lam.part(k) for lam in draws], dtype=float)
    return heights - math.sqrt(n) * omega(x)


def y_vertical_many(draws: Sequence[Partition], n: int, x: float) -> np.ndarray:
    _check_log_scale(n)
    return 2.0 * theta_of_x(x) * delta_vertical_many(draws, n, x) / math.sqrt(math.log(n))


def delta_rotated(profile: RotatedProfile, n: float, u):
    """sqrt(n) (lambda~(u) - Omega(u)), evaluated from the unscaled vertices."""
    root = math.sqrt(n)
    u = np.asarray(u, dtype=float)
    raw = np.asarray(profile.raw_value(u * profile.scale))
    out = (root / profile.scale) * raw - root * np.asarray(omega_rotated(u))
    # beyond both supports the profile and Omega coincide with |u|
    outside = (np.abs(u) >= 2) & ((u * profile.scale < profile.raw_u[0]) | (u * profile.scale > profile.raw_u[-1]))
    out = np.where(outside, 0.0, out)
    return float(out) if out.ndim == 0 else out


def y_rotated(profile: RotatedProfile, n: float, u):
    _check_log_scale(n)
    out = math.pi * np.asarray(delta_rotated(profile, n, u)) / math.sqrt(math.log(n))
    return float(out) if out.ndim == 0 else out


def _chebyshev_poly(k: int, u):
    """U_k by the three-term recurrence, valid for any real u."""
    u = np.asarray(u, dtype=float)
    prev = np.ones_like(u)
    if k == 0:
        return prev
    cur = u.copy()
    for _ in range(k - 1):
        prev, cur = cur, u * cur - prev
    return cur


def chebyshev_U(k: int, u):
    """Modified Chebyshev polynomial of the second kind, U_k(2 cos t) = sin((k+1)t)/sin t."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    arr = np.asarray(u, dtype=float)
    if np.any(np.abs(arr) > 2):
        raise ValueError("chebyshev_U is used on [-2, 2]")
    out = _chebyshev_poly(k, arr)
    return float(out) if out.ndim == 0 else out


def _omega_rotated_theta(theta: float) -> float:
    # Omega(2 cos t) with arcsin(cos t) = pi/2 - t
    return (4.0 / math.pi) * (math.cos(theta) * (math.pi / 2 - theta) + math.sin(theta))


def _abs_moment(k: int) -> float:
    """integral_{-2}^{2} |u| U_{k-1}(u) du, exact by Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(k // 2 + 2)
    half = 1.0 + nodes  # map to [0, 2]
    right = float(np.sum(weights * half * _chebyshev_poly(k - 1, half)))
    left = float(np.sum(weights * half * _chebyshev_poly(k - 1, -half)))
    return right + left


@lru_cache(maxsize=None)
def omega_excess_moment(k: int) -> float:
    """integral_{-2}^{2} (Omega(u) - |u|) U_{k-1}(u) du.

    The Omega part is 2 int_0^pi Omega(2 cos t) sin(k t) dt by adaptive
    Gauss-Kronrod; the |u| part is a polynomial integral.
    """
    val, err = integrate.quad(
        lambda th: 2.0 * _omega_rotated_theta(th) * math.sin(k * th),
        0.0, math.pi, epsabs=1e-13, epsrel=1e-13, limit=400,
    )
    if err > 1e-10:
        raise ArithmeticError(f"quadrature error {err:.2g} above 1e-10 for k={k}")
    return val - _abs_moment(k)


def profile_excess_moment(profile: RotatedProfile, k: int) -> float:
    """integral (lambda~(u) - |u|) U_{k-1}(u) du, exact segment by segment."""
    U = profile.raw_u.astype(float)
    excess = (profile.raw_v - np.abs(profile.raw_u)).astype(float)
    if U.size < 2:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(k // 2 + 2)
    t = 0.5 * (nodes + 1.0)  # on [0, 1]
    w = 0.5 * weights
    # each unit segment [U_i, U_i + 1]; excess is linear on it
    pts = U[:-1, None] + t[None, :]
    vals = excess[:-1, None] * (1.0 - t[None, :]) + excess[1:, None] * t[None, :]
    poly = _chebyshev_poly(k - 1, pts / profile.scale)
    return float(np.sum(vals * poly * w[None, :])) / profile.scale**2


def kerov_functional(profile: RotatedProfile, n: float, k: int) -> float:
    """integral Delta~_n(u) U_{k-1}(u) du."""
    if k < 1:
        raise ValueError("k must be >= 1")
    root = math.sqrt(n)
    return root * (profile_excess_moment(profile, k) - omega_excess_moment(k))


def count_interval(lam: Partition, t: float, x: float, z: float) -> int:
    """#(D(lambda) ∩ I_t) with I_t = [2 sqrt(t) cos(theta_x) + z sqrt(log t), inf)."""
    if not 0 < x < 2:
        raise ValueError("x must lie in (0, 2)")
    if t < 1:
        raise ValueError("t must be >= 1")
    return count_frobenius_at_least(lam, interval_start(t, x, z))


def is_on_lattice(delta: float, n: int, x: float, tol: float = 1e-9) -> bool:
    """Delta_n(x) + sqrt(n) omega(x) is an integer."""
    shifted = delta + math.sqrt(n) * omega(x)
    return abs(shifted - round(shifted)) <= tol


def vertical_sample(lam: Partition, n: int, x: float) -> FluctuationSample:
    d = delta_vertical(lam, n, x)
    return FluctuationSample(n, x, d, 2.0 * theta_of_x(x) * d / math.sqrt(math.log(n)), "vertical")


def rotated_sample(profile: RotatedProfile, n: int, u: float) -> FluctuationSample:
    d = delta_rotated(profile, n, u)
    return FluctuationSample(n, u, d, math.pi * d / math.sqrt(math.log(n)), "rotated")


def profile_eval_scaled(lam: Partition, n: int, x: float) -> float:
    """lambda_bar_n(x) = lambda(sqrt(n) x) / sqrt(n)."""
    return profile_eval(lam, math.sqrt(n) * x) / math.sqrt(n)
