"""Time-varying-loadings factor model estimated by localized PCA.

Stage 1 solves a kernel-weighted PCA at every period r: rows of the centered
panel are scaled by the square roots of the localization weights, the top-R
eigenvectors of the weighted Gram matrix give the factors, and loadings
follow by projection.  Stage 2 re-estimates the factor at each period by
ordinary least squares against that period's loadings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _accel
from .dataio import MortalityPanel
from .errors import ArgumentError, DegenerateWindowError, RankError
from .factor_classic import select_num_factors
from .kernels import KernelSpec, silverman_bandwidth, weight_matrix, weight_vector

_SUM_TOL = 1e-10
_ALIGN_TOL = 1e-12


@dataclass(frozen=True)
class TvFit:
    """Per-period loadings B_t (T x N x R), stage-2 factors K (T x R)."""

    R: int
    loadings: np.ndarray
    factors: np.ndarray
    a_x: np.ndarray
    kernel: KernelSpec
    eigen_shares_at_center: np.ndarray
    ages: np.ndarray
    years: np.ndarray
    norm_fallback: np.ndarray  # (T, R) flags where unit-norm fallback used

    @property
    def n_ages(self) -> int:
        return self.ages.size

    @property
    def n_years(self) -> int:
        return self.years.size

    def loading_paths(self, col: int = 0) -> np.ndarray:
        """Loading trajectories for one factor, shape (N, T)."""
        return self.loadings[:, :, col].T.copy()

    def reconstruction(self) -> np.ndarray:
        """Fitted centered panel, shape (N, T)."""
        return np.einsum("tnr,tr->nt", self.loadings, self.factors)


@dataclass(frozen=True)
class LocalPca:
    """Stage-1 output at a single period."""

    loadings: np.ndarray  # (N, R), aligned and normalized
    factors_weighted: np.ndarray  # (T, R), scaled consistently with loadings
    eigenvalues: np.ndarray  # (T,), descending, zero-padded


def _support_bounds(weights: np.ndarray):
    pos = np.nonzero(weights > 0.0)[0]
    lo, hi = int(pos[0]), int(pos[-1]) + 1
    if hi - lo != pos.size:
        raise ArgumentError("kernel support must be contiguous")
    return lo, hi


def _bounds_arrays(sw_rows: np.ndarray):
    nr = sw_rows.shape[0]
    lo = np.empty(nr, dtype=np.int64)
    hi = np.empty(nr, dtype=np.int64)
    for i in range(nr):
        lo[i], hi[i] = _support_bounds(sw_rows[i])
    return lo, hi


def _alignment_signs(loading_seq: np.ndarray) -> np.ndarray:
    """Per-period, per-column signs (+-1) that align a stage-1 sequence.

    A column's sign makes its sum over ages positive; when the sum is within
    1e-12 of zero it follows the correlation with the previous period's
    aligned column, or makes the largest entry positive at the first period.
    """
    B = np.asarray(loading_seq, dtype=float)
    T, _, R = B.shape
    signs = np.ones((T, R))
    for j in range(R):
        for r in range(T):
            col = B[r, :, j]
            s = float(col.sum())
            if abs(s) > _ALIGN_TOL:
                signs[r, j] = 1.0 if s > 0.0 else -1.0
                continue
            if r > 0:
                ref = float(col @ (signs[r - 1, j] * B[r - 1, :, j]))
            else:
                ref = 0.0
            if ref == 0.0:
                ref = float(col[np.argmax(np.abs(col))])
            signs[r, j] = 1.0 if ref >= 0.0 else -1.0
    return signs


def align_signs(loading_seq: np.ndarray) -> np.ndarray:
    """Return the sequence with consistently signed loading columns."""
    B = np.asarray(loading_seq, dtype=float)
    return B * _alignment_signs(B)[:, None, :]


def _normalize_seq(B: np.ndarray, Kw: np.ndarray | None = None):
    """Per-period, per-column sum-to-one rescaling with unit-norm fallback.

    Kw, when given, is rescaled inversely so the stage-1 product is kept.
    """
    B = B.copy()
    T, _, R = B.shape
    fallback = np.zeros((T, R), dtype=bool)
    Kw = None if Kw is None else Kw.copy()
    for r in range(T):
        for j in range(R):
            col = B[r, :, j]
            s = float(col.sum())
            norm = float(np.linalg.norm(col))
            if norm == 0.0:
                raise RankError("stage-1 loadings identically zero", t=r + 1)
            if abs(s) > _SUM_TOL * norm:
                scale = s
            else:
                scale = norm
                fallback[r, j] = True
            B[r, :, j] = col / scale
            if Kw is not None:
                Kw[r, :, j] = Kw[r, :, j] * scale
    if fallback.any():
        warnings.warn(
            f"{int(fallback.sum())} loading column(s) sum to ~0; "
            "used unit-norm normalization there",
            RuntimeWarning,
            stacklevel=3,
        )
    return B, Kw, fallback


def localized_pca_at(
    panel: MortalityPanel, r: int, kernel: KernelSpec, R: int = 1
) -> LocalPca:
    """Stage-1 weighted PCA at period r (1-based)."""
    T = panel.n_years
    if not (1 <= r <= T):
        raise ArgumentError(f"r must lie in 1..{T}, got {r}")
    w = weight_vector(r, T, kernel, min_positive=R + 1)
    X = np.ascontiguousarray(panel.centered().T)
    S = X @ X.T
    sw = np.sqrt(w)[None, :]
    lo, hi = _bounds_arrays(sw)
    B, Kw, eig = _accel.localized_pca_rows(X, S, sw, lo, hi, R)
    signs = _alignment_signs(B)
    B = B * signs[:, None, :]
    Kw = Kw * signs[:, None, :]
    Bn, Kwn, _ = _normalize_seq(B, Kw)
    return LocalPca(loadings=Bn[0], factors_weighted=Kwn[0], eigenvalues=eig[0])


def stage2_factors(panel: MortalityPanel, loading_seq: np.ndarray) -> np.ndarray:
    """Per-period OLS of the centered data on that period's loadings."""
    B = np.asarray(loading_seq, dtype=float)
    T, N, R = B.shape
    if T != panel.n_years or N != panel.n_ages:
        raise ArgumentError("loading sequence does not match the panel")
    Xc = panel.centered()  # (N, T)
    K = np.empty((T, R))
    for t in range(T):
        Bt = B[t]
        A = Bt.T @ Bt
        if not np.all(np.isfinite(A)):
            raise RankError("nonfinite loadings", t=t + 1)
        if float(np.trace(A)) <= 0.0 or np.linalg.cond(A) > 1e12:
            raise RankError("singular loading normal matrix", t=t + 1)
        K[t] = np.linalg.solve(A, Bt.T @ Xc[:, t])
    return K


def fit_tv(
    panel: MortalityPanel,
    kernel: KernelSpec | None = None,
    R: int | None = None,
    cutoff: float = 0.9,
) -> TvFit:
    """Two-stage estimate of the time-varying factor model.

    Defaults: Epanechnikov kernel with the rule-of-thumb bandwidth and
    boundary correction on; R chosen at the center period by cumulative
    eigenvalue shares.
    """
    T, N = panel.n_years, panel.n_ages
    if T < 3:
        raise ArgumentError("need at least 3 years to fit")
    if kernel is None:
        kernel = KernelSpec("epanechnikov", silverman_bandwidth(T, N), True)
    W = weight_matrix(T, kernel, min_positive=2)
    sw = np.sqrt(W)
    X = np.ascontiguousarray(panel.centered().T)
    S = X @ X.T
    lo, hi = _bounds_arrays(sw)

    center = math.ceil(T / 2)  # 1-based
    ci = center - 1
    _, _, eig_center = _accel.localized_pca_rows(
        X, S, sw[ci : ci + 1], lo[ci : ci + 1], hi[ci : ci + 1], 1
    )
    eig_center = eig_center[0]
    total = eig_center.sum()
    if R is None:
        R = select_num_factors(eig_center, cutoff)
    R = int(R)
    if not (1 <= R <= min(N, T)):
        raise ArgumentError(f"R must lie in 1..{min(N, T)}, got {R}")
    n_pos = (W > 0.0).sum(axis=1)
    if int(n_pos.min()) < R + 1:
        bad = int(np.argmin(n_pos)) + 1
        raise DegenerateWindowError(
            f"window at r={bad} has {int(n_pos.min())} positive weights, "
            f"need at least {R + 1}; increase the bandwidth"
        )

    B_raw, _, _ = _accel.localized_pca_rows(X, S, sw, lo, hi, R)
    B_norm, _, fallback = _normalize_seq(align_signs(B_raw))
    K = stage2_factors(panel, B_norm)
    shares = (
        np.cumsum(eig_center) / total if total > 0.0 else np.full_like(eig_center, np.nan)
    )
    return TvFit(
        R=R,
        loadings=B_norm,
        factors=K,
        a_x=panel.a_x.copy(),
        kernel=kernel,
        eigen_shares_at_center=shares,
        ages=panel.ages.copy(),
        years=panel.years.copy(),
        norm_fallback=fallback,
    )
