"""Kernel weights with boundary correction, and the rule-of-thumb bandwidth.

Time indices ``t`` and ``r`` are 1-based throughout (1..T), matching the
estimation displays the weights feed into.  Weights are returned unsquared;
callers that scale data rows take the square root themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateWindowError

FAMILIES = ("epanechnikov", "uniform")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, bandwidth (fraction of unit time) and boundary mode."""

    family: str = "epanechnikov"
    bandwidth: float = 0.2
    boundary_correction: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError(f"unknown kernel family {self.family!r}")
        if not (self.bandwidth > 0.0 and math.isfinite(self.bandwidth)):
            raise ArgumentError(f"bandwidth must be positive, got {self.bandwidth}")


def silverman_bandwidth(T: int, N: int) -> float:
    """Rule-of-thumb bandwidth (2.35/sqrt(12)) * T^(-1/5) * N^(-1/10)."""
    if T < 3:
        raise ArgumentError(f"need T >= 3, got {T}")
    if N < 2:
        raise ArgumentError(f"need N >= 2, got {N}")
    return (2.35 / math.sqrt(12.0)) * T ** (-1.0 / 5.0) * N ** (-1.0 / 10.0)


def kernel_value(u: float, family: str) -> float:
    if family == "epanechnikov":
        return 0.75 * (1.0 - u * u) if abs(u) <= 1.0 else 0.0
    # uniform
    return 0.5 if abs(u) <= 1.0 else 0.0


def kernel_integral(a: float, b: float, family: str) -> float:
    """Integral of the kernel density over [a, b], clipped to the support."""
    a = min(max(a, -1.0), 1.0)
    b = min(max(b, -1.0), 1.0)
    if b <= a:
        return 0.0
    if family == "epanechnikov":
        # antiderivative 0.75u - 0.25u^3
        fa = 0.75 * a - 0.25 * a**3
        fb = 0.75 * b - 0.25 * b**3
        return fb - fa
    return 0.5 * (b - a)


def boundary_weight(t: int, r: int, T: int, spec: KernelSpec) -> float:
    """Kernel weight of observation t for a fit localized at r.

    The plain weight is h^-1 K((t-r)/(Th)).  With boundary correction on,
    it is renormalized by the kernel mass that falls inside the sample:
    near the left edge (r <= floor(Th)) by the integral from -r/(Th) to 1,
    near the right edge (r > T - floor(Th)) by the integral from -1 to
    (1 - r/T)/h.  Interior points are untouched.
    """
    if not (1 <= t <= T) or not (1 <= r <= T):
        raise ArgumentError(f"indices must lie in 1..{T}, got t={t}, r={r}")
    h = spec.bandwidth
    base = kernel_value((t - r) / (T * h), spec.family) / h
    if not spec.boundary_correction or base == 0.0:
        return base
    th_floor = math.floor(T * h)
    if r <= th_floor:
        denom = kernel_integral(-r / (T * h), 1.0, spec.family)
    elif r > T - th_floor:
        denom = kernel_integral(-1.0, (1.0 - r / T) / h, spec.family)
    else:
        return base
    return base / denom


def weight_vector(r: int, T: int, spec: KernelSpec, min_positive: int = 2) -> np.ndarray:
    """All T weights for a fit localized at r (t = 1..T).

    Raises DegenerateWindowError when fewer than ``min_positive`` weights are
    strictly positive, i.e. the bandwidth cannot support the factor count.
    """
    w = np.array([boundary_weight(t, r, T, spec) for t in range(1, T + 1)])
    n_pos = int(np.count_nonzero(w > 0.0))
    if n_pos < min_positive:
        raise DegenerateWindowError(
            f"window at r={r} has {n_pos} positive weights, "
            f"need at least {min_positive}; increase the bandwidth"
        )
    return w


def weight_matrix(T: int, spec: KernelSpec, min_positive: int = 2) -> np.ndarray:
    """Stack of weight_vector(r) for r = 1..T, shape (T, T)."""
    return np.vstack([weight_vector(r, T, spec, min_positive) for r in range(1, T + 1)])
