"""Local linear regression for extrapolating loading paths.

At each target point the straight line alpha + beta*t is fitted by weighted
least squares with kernel weights K((t - target)/window); multi-step
forecasts append each extrapolated value to the path before the next step,
so the window slides forward with the forecasts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, LocalWindowError
from ..kernels import kernel_value

_DET_TOL = 1e-12


@dataclass(frozen=True)
class LocalLinearSpec:
    """Window width (support radius, in time-index units) and kernel family."""

    window: float
    family: str = "epanechnikov"

    def __post_init__(self):
        if not (self.window > 0.0 and np.isfinite(self.window)):
            raise ArgumentError(f"window must be positive, got {self.window}")
        if self.family not in ("epanechnikov", "uniform"):
            raise ArgumentError(f"unknown kernel family {self.family!r}")


def _projector(length: int, target: float, spec: LocalLinearSpec) -> np.ndarray:
    """Row vector c with fitted-value-at-target = path @ c."""
    t = np.arange(1.0, length + 1.0)
    w = np.array([kernel_value((ti - target) / spec.window, spec.family) for ti in t])
    pos = w > 0.0
    if np.unique(t[pos]).size < 2:
        raise LocalWindowError(
            f"fewer than 2 in-window observations at target {target}; "
            "increase the window"
        )
    s0 = float(w.sum())
    s1 = float(w @ t)
    s2 = float(w @ (t * t))
    det = s0 * s2 - s1 * s1
    if not np.isfinite(det) or det <= _DET_TOL * max(s0 * s2, 1.0):
        raise LocalWindowError(f"singular local design at target {target}")
    # (X'WX)^-1 [1, target] applied to X'W
    a = (s2 - target * s1) / det
    b = (target * s0 - s1) / det
    return w * (a + b * t)


def local_linear_extrapolate(path, target: float, spec: LocalLinearSpec) -> float:
    """Weighted straight-line fit over the path, evaluated at the target."""
    values = np.asarray(path, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ArgumentError("path must be one-dimensional with >= 2 points")
    c = _projector(values.size, float(target), spec)
    return float(values @ c)


def extrapolate_paths(paths, horizon: int, spec: LocalLinearSpec) -> np.ndarray:
    """Recursive multi-step extrapolation of each row of (N, T) paths.

    Step h targets T + h with the h-1 previous forecasts appended, so every
    row shares one design solve per step.  Returns (N, horizon).
    """
    arr = np.asarray(paths, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if horizon < 1:
        raise ArgumentError(f"horizon must be >= 1, got {horizon}")
    n, T = arr.shape
    out = np.empty((n, horizon))
    cur = arr
    for h in range(horizon):
        length = T + h
        c = _projector(length, float(length + 1), spec)
        out[:, h] = cur @ c
        cur = np.hstack([cur, out[:, h : h + 1]])
    return out


def select_lambda(paths, v: int | None = None, grid=None) -> float:
    """Window width minimizing held-out extrapolation error.

    The last ``v`` points of every path are held out (default min(10, T/5));
    each grid width recursively extrapolates them from the remaining prefix
    and the pooled mean squared error decides.  Ties keep the smallest width.
    """
    arr = np.asarray(paths, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    T = arr.shape[1]
    if v is None:
        v = min(10, max(1, T // 5))
    v = int(v)
    if v < 1:
        raise ArgumentError(f"validation window must be >= 1, got {v}")
    if v >= T:
        raise ArgumentError(f"validation window {v} must be smaller than the path length {T}")
    if grid is None:
        grid = [0.05 * (i + 1) * T for i in range(10)]
    grid = [float(g) for g in grid]
    if not grid:
        raise ArgumentError("empty window grid")
    train = arr[:, : T - v]
    held = arr[:, T - v :]
    best = None
    best_err = np.inf
    for lam in grid:
        try:
            ext = extrapolate_paths(train, v, LocalLinearSpec(lam))
        except LocalWindowError:
            continue
        err = float(np.mean((ext - held) ** 2))
        if np.isfinite(err) and err < best_err:
            best, best_err = lam, err
    if best is None:
        raise LocalWindowError("no feasible window width in the grid")
    return best
