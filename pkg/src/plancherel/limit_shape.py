"""The Vershik-Kerov / Logan-Shepp limit shape and rotated diagram profiles.

``omega`` is the limit curve in the original coordinates (x along columns,
y = column height), given parametrically by

    x = (2/pi)(sin t - t cos t),   y = x + 2 cos t,   0 <= t <= pi.

``omega_rotated`` is the same curve after (u, v) = (x - y, x + y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .partitions import Partition

THETA_TOL = 1e-12


def _parametric_x(theta):
    return (2.0 / np.pi) * (np.sin(theta) - theta * np.cos(theta))


def theta_of_x(x):
    """Invert the parametrisation: the theta in [0, pi] with x(theta) = x.

    Bisection to absolute tolerance 1e-12; x(theta) is increasing but flat at
    theta = 0, which rules out Newton near the edge. Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > 2) or np.any(np.isnan(arr)):
        raise ValueError("theta_of_x requires 0 <= x <= 2")
    lo = np.zeros_like(arr)
    hi = np.full_like(arr, np.pi)
    while np.max(hi - lo, initial=0.0) > THETA_TOL:
        mid = 0.5 * (lo + hi)
        below = _parametric_x(mid) < arr
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    theta = 0.5 * (lo + hi)
    theta = np.where(arr == 0, 0.0, np.where(arr == 2, np.pi, theta))
    return float(theta) if theta.ndim == 0 else theta


def omega(x):
    """Limit shape y = omega(x); zero for x > 2."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("omega is defined for x >= 0")
    inside = np.clip(arr, 0.0, 2.0)
    theta = np.asarray(theta_of_x(inside))
    y = np.where(arr >= 2, 0.0, inside + 2.0 * np.cos(theta))
    y = np.maximum(y, 0.0)
    return float(y) if y.ndim == 0 else y


def omega_rotated(u):
    """Limit shape in rotated coordinates, |u| outside [-2, 2]."""
    arr = np.asarray(u, dtype=float)
    a = np.clip(np.abs(arr), 0.0, 2.0)
    # sqrt((2-a)(2+a)) avoids the cancellation in 4 - a^2 near the edge
    inner = (2.0 / np.pi) * (a * np.arcsin(a / 2.0) + np.sqrt((2.0 - a) * (2.0 + a)))
    v = np.where(np.abs(arr) >= 2, np.abs(arr), inner)
    return float(v) if v.ndim == 0 else v


def theta_of_u(u):
    arr = np.asarray(u, dtype=float)
    if np.any(np.abs(arr) > 2):
        raise ValueError("theta_of_u requires |u| <= 2")
    theta = np.arccos(arr / 2.0)
    return float(theta) if theta.ndim == 0 else theta


@dataclass(frozen=True)
class RotatedProfile:
    """Boundary of a Young diagram in rotated coordinates.

    ``raw_u`` / ``raw_v`` are the integer vertices of the unscaled boundary,
    one per unit step; the scaled profile is (raw_u, raw_v) / scale. Outside
    ``[raw_u[0], raw_u[-1]]`` the profile equals |u|.
    """

    raw_u: np.ndarray
    raw_v: np.ndarray
    scale: float

    @property
    def breakpoints(self) -> np.ndarray:
        return np.column_stack([self.raw_u, self.raw_v]) / self.scale

    @property
    def support(self) -> tuple[float, float]:
        return self.raw_u[0] / self.scale, self.raw_u[-1] / self.scale

    def raw_value(self, big_u):
        """Unscaled profile at unscaled abscissa."""
        big_u = np.asarray(big_u, dtype=float)
        inside = np.interp(big_u, self.raw_u, self.raw_v)
        out = np.where((big_u < self.raw_u[0]) | (big_u > self.raw_u[-1]), np.abs(big_u), inside)
        return float(out) if out.ndim == 0 else out

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.asarray(self.raw_value(u * self.scale)) / self.scale
        return float(out) if out.ndim == 0 else out

    def raw_area(self) -> int:
        """Integer area between the unscaled profile and |u| (twice the cell count)."""
        excess = self.raw_v - np.abs(self.raw_u)
        return int((excess[:-1] + excess[1:]).sum()) // 2

    def area(self) -> float:
        return self.raw_area() / self.scale**2


def rotate_profile(lam: Partition, scale: float = 1.0) -> RotatedProfile:
    if not scale > 0:
        raise ValueError("scale must be positive")
    parts = np.asarray(lam.parts, dtype=np.int64)
    if parts.size == 0:
        return RotatedProfile(np.array([0], dtype=np.int64), np.array([0], dtype=np.int64), float(scale))
    # walk from (0, lambda_1): each column is one step right (+1) followed by
    # lambda_i - lambda_{i+1} steps down (-1)
    drops = parts - np.append(parts[1:], 0)
    moves = np.ones(parts.size + int(parts[0]), dtype=np.int64)
    right_at = np.arange(parts.size) + np.concatenate([[0], np.cumsum(drops)[:-1]])
    down = np.ones_like(moves, dtype=bool)
    down[right_at] = False
    moves[down] = -1
    lam1 = int(parts[0])
    raw_u = np.arange(-lam1, -lam1 + moves.size + 1, dtype=np.int64)
    raw_v = lam1 + np.concatenate([[0], np.cumsum(moves)])
    return RotatedProfile(raw_u, raw_v, float(scale))


def sup_distance(lam: Partition, n: int) -> float:
    """sup_{x >= 0} |lambda(sqrt(n) x)/sqrt(n) - omega(x)|.

    On ((i-1)/sqrt(n), i/sqrt(n)] the scaled profile is the constant
    lambda_i/sqrt(n) and omega is monotone, so the extremes sit at the step
    points and their left limits.
    """
    if n < 1:
        raise ValueError("n must be positive")
    root = math.sqrt(n)
    cols = max(len(lam), math.ceil(2 * root)) + 1
    i = np.arange(1, cols + 1)
    heights = np.zeros(cols)
    heights[: len(lam)] = np.asarray(lam.parts, dtype=float)
    heights /= root
    left = np.abs(heights - omega(np.minimum((i - 1) / root, 2.0)))
    right = np.abs(heights - omega(np.minimum(i / root, 2.0)))
    at_zero = abs(lam.part(1) / root - 2.0)
    return float(max(left.max(), right.max(), at_zero))


def shape_comparison(lam: Partition, n: int, points: int = 401) -> np.ndarray:
    """Rows (x, lambda_bar, omega, diff) on a uniform grid of [0, 2.5]."""
    root = math.sqrt(n)
    xs = np.linspace(0.0, 2.5, points)
    ks = np.maximum(1, np.ceil(xs * root - 1e-12).astype(np.int64))
    parts = np.asarray(lam.parts + (0,), dtype=float)
    idx = np.minimum(ks - 1, len(lam.parts))
    lam_bar = parts[idx] / root
    om = omega(xs)
    return np.column_stack([xs, lam_bar, om, lam_bar - om])
