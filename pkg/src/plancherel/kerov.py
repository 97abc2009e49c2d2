"""Gaussian limit objects: Chebyshev-harmonic partial sums and the min-covariance vector.

The partial sum S_m(2 cos t) = (2/pi) sum_{k=2}^m X_k sin(k t)/sqrt(k), with iid
standard normal X_k, emulates the rotated deviation of a diagram of size
n with m of order sqrt(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .samplers import RngLike, as_generator


@dataclass(frozen=True)
class GaussianVectorSpec:
    """Centered Gaussian vector with K(s, s) = 1 and K(s, s') = min(s, s') otherwise."""

    s_values: tuple[float, ...]

    def __post_init__(self) -> None:
        s = np.asarray(self.s_values, dtype=float)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("s_values must be a nonempty sequence")
        if np.any((s < 0) | (s > 1)):
            raise ValueError("s values must lie in [0, 1]")
        object.__setattr__(self, "s_values", tuple(float(v) for v in s))

    @property
    def covariance(self) -> np.ndarray:
        s = np.asarray(self.s_values)
        cov = np.minimum.outer(s, s)
        np.fill_diagonal(cov, 1.0)
        return cov

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.covariance).min())

    def is_psd(self, tol: float = 1e-10) -> bool:
        return self.min_eigenvalue() >= -tol


@dataclass(frozen=True)
class SeriesState:
    """Coefficients X_2..X_m of one path of the series."""

    m: int
    coefficients: np.ndarray

    def values(self, thetas) -> np.ndarray:
        return _evaluate(self.coefficients[None, :], self.m, np.asarray(thetas, dtype=float))[0]


def _check_thetas(thetas) -> np.ndarray:
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any((th <= 0) | (th >= math.pi)):
        raise ValueError("theta values must lie in (0, pi)")
    return th


def _evaluate(coeffs: np.ndarray, m: int, thetas: np.ndarray) -> np.ndarray:
    """(2/pi) sum_k X_k sin(k t)/sqrt(k) for coefficient rows ``coeffs``."""
    if m < 2:
        return np.zeros((coeffs.shape[0], thetas.size))
    k = np.arange(2, m + 1, dtype=float)
    basis = np.sin(np.outer(k, thetas)) / np.sqrt(k)[:, None]
    return (2.0 / math.pi) * coeffs @ basis


def draw_series(m: int, stream: RngLike) -> SeriesState:
    if m < 2:
        raise ValueError("m must be >= 2")
    return SeriesState(m, as_generator(stream).standard_normal(m - 1))


def sample_partial_sum(m: int, thetas: Sequence[float], stream: RngLike) -> np.ndarray:
    """One path S_m evaluated at every theta, sharing the coefficient vector."""
    th = _check_thetas(thetas)
    return draw_series(m, stream).values(th)


def sample_partial_sums(m: int, thetas: Sequence[float], replicas: int, stream: RngLike,
                        chunk: int = 1024) -> np.ndarray:
    """``replicas`` independent paths; returns an array of shape (replicas, len(thetas))."""
    if m < 2:
        raise ValueError("m must be >= 2")
    th = _check_thetas(thetas)
    rng = as_generator(stream)
    out = np.empty((replicas, th.size))
    for start in range(0, replicas, chunk):
        stop = min(replicas, start + chunk)
        out[start:stop] = _evaluate(rng.standard_normal((stop - start, m - 1)), m, th)
    return out


def cov_partial_sum(theta: float, theta_prime: float, m: int) -> float:
    """(4/pi^2) sum_{k=2}^m sin(k t) sin(k t') / k."""
    if m < 2:
        return 0.0
    k = np.arange(2, m + 1, dtype=float)
    terms = np.sin(k * theta) * np.sin(k * theta_prime) / k
    return 4.0 / math.pi**2 * math.fsum(terms.tolist())


def sample_limit_vector(spec: GaussianVectorSpec, stream: RngLike, size: int | None = None) -> np.ndarray:
    """Z_s = W_s + zeta_s sqrt(1 - s) with W a Brownian path on the sorted s grid.

    Returns shape (len(s),) or (size, len(s)) when ``size`` is given.
    """
    s = np.asarray(spec.s_values)
    if np.any(np.diff(s) < 0):
        raise ValueError("s_values must be sorted ascending")
    rng = as_generator(stream)
    rows = 1 if size is None else size
    steps = np.diff(np.concatenate([[0.0], s]))
    w = np.cumsum(rng.standard_normal((rows, s.size)) * np.sqrt(steps), axis=1)
    zeta = rng.standard_normal((rows, s.size))
    z = w + zeta * np.sqrt(1.0 - s)
    return z[0] if size is None else z


def degrees_of_freedom(n: int) -> int:
    """ceil(sqrt(n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = math.isqrt(n)
    return r if r * r == n else r + 1
