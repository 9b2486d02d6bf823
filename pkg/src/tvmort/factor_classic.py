"""Classical factor model with time-invariant loadings (Lee-Carter at R=1).

Estimated by SVD of the centered panel (equivalent to eigendecomposing
either Gram matrix), then renormalized to the Lee-Carter convention: each
loading column sums to one, with the factor column rescaled inversely so the
product is preserved.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataio import MortalityPanel
from .errors import ArgumentError, DegenerateDataError

# relative threshold below which a column sum counts as zero and the
# unit-norm fallback normalization kicks in
_SUM_TOL = 1e-10


@dataclass(frozen=True)
class ClassicFit:
    """Loadings B (N x R), factors K (T x R), age means and spectrum."""

    R: int
    loadings: np.ndarray
    factors: np.ndarray
    a_x: np.ndarray
    eigenvalues: np.ndarray
    explained_ratio: np.ndarray
    ages: np.ndarray
    years: np.ndarray
    norm_fallback: np.ndarray  # per-column: True where unit-norm fallback used

    @property
    def n_ages(self) -> int:
        return self.ages.size

    @property
    def n_years(self) -> int:
        return self.years.size

    def reconstruction(self) -> np.ndarray:
        """Fitted centered panel, shape (N, T)."""
        return self.loadings @ self.factors.T


@dataclass(frozen=True)
class RollingLoadings:
    """One loading matrix per rolling window, indexed by start year."""

    start_years: np.ndarray
    ages: np.ndarray
    loadings: np.ndarray  # (n_windows, N, R)
    window_length: int


def select_num_factors(eigenvalues, cutoff: float = 0.9) -> int:
    """Smallest R whose cumulative eigenvalue share reaches the cutoff."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        raise ArgumentError("empty spectrum")
    if np.any(lam < 0) or np.any(np.diff(lam) > 0):
        raise ArgumentError("eigenvalues must be nonnegative and nonincreasing")
    if not (0.0 < cutoff < 1.0):
        raise ArgumentError(f"cutoff must lie in (0, 1), got {cutoff}")
    total = lam.sum()
    if total <= 0.0:
        raise DegenerateDataError("all-zero eigenvalue spectrum")
    shares = np.cumsum(lam) / total
    return int(np.searchsorted(shares, cutoff) + 1)


def pca_decompose(centered_tn: np.ndarray, R: int):
    """Raw principal-component factorization of a (T, N) centered matrix.

    Returns (K_raw, B_raw, eigenvalues): K_raw = sqrt(T) times the top-R left
    singular vectors (so K_raw'K_raw / T = I), B_raw = X'K_raw / T, and the
    full descending eigenvalue spectrum of the Gram matrix.  Column signs are
    fixed so each factor has nonpositive slope against time; exact-zero
    slopes fall back to a nonnegative first factor element.
    """
    X = np.asarray(centered_tn, dtype=float)
    T, N = X.shape
    if not (1 <= R <= min(N, T)):
        raise ArgumentError(f"R must lie in 1..{min(N, T)}, got {R}")
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    eigenvalues = s**2
    K = np.sqrt(T) * U[:, :R]
    B = X.T @ K / T
    tgrid = np.arange(T) - (T - 1) / 2.0
    for j in range(R):
        slope = float(tgrid @ K[:, j])
        if slope > 0.0 or (slope == 0.0 and K[0, j] < 0.0):
            K[:, j] = -K[:, j]
            B[:, j] = -B[:, j]
    return K, B, eigenvalues


def normalize_columns(B: np.ndarray, K: np.ndarray):
    """Rescale so each loading column sums to one, factors inversely.

    Columns whose sum is numerically zero fall back to unit Euclidean norm
    (with a warning); the returned flags mark them.
    """
    B = B.copy()
    K = K.copy()
    R = B.shape[1]
    fallback = np.zeros(R, dtype=bool)
    for j in range(R):
        s = float(B[:, j].sum())
        norm = float(np.linalg.norm(B[:, j]))
        if norm == 0.0:
            raise DegenerateDataError(f"loading column {j} is identically zero")
        if abs(s) > _SUM_TOL * norm:
            B[:, j] /= s
            K[:, j] *= s
        else:
            warnings.warn(
                f"loading column {j} sums to ~0; using unit-norm normalization",
                RuntimeWarning,
                stacklevel=2,
            )
            B[:, j] /= norm
            K[:, j] *= norm
            fallback[j] = True
    return B, K, fallback


def fit_classic(panel: MortalityPanel, R: int | None = None, cutoff: float = 0.9) -> ClassicFit:
    """Fit the time-invariant factor model; R chosen by eigenvalue shares
    when not given."""
    if panel.n_years < 3:
        raise ArgumentError("need at least 3 years to fit")
    X = panel.centered().T  # (T, N)
    if R is None:
        _, s, _ = np.linalg.svd(X, full_matrices=False)
        R = select_num_factors(s**2, cutoff)
    K, B, eigenvalues = pca_decompose(X, R)
    total = eigenvalues.sum()
    if total <= 0.0:
        raise DegenerateDataError("panel carries no variation around a_x")
    loadings, factors, fallback = normalize_columns(B, K)
    return ClassicFit(
        R=int(R),
        loadings=loadings,
        factors=factors,
        a_x=panel.a_x.copy(),
        eigenvalues=eigenvalues,
        explained_ratio=np.cumsum(eigenvalues) / total,
        ages=panel.ages.copy(),
        years=panel.years.copy(),
        norm_fallback=fallback,
    )


def rolling_window_loadings(
    panel: MortalityPanel, window_length: int, R: int = 1
) -> RollingLoadings:
    """Fit the classical model on every contiguous window of the panel.

    Loadings come out in the sum-to-one convention, which also pins the sign
    across windows.
    """
    T = panel.n_years
    if window_length < 3:
        raise ArgumentError(f"window_length must be >= 3, got {window_length}")
    if window_length > T:
        raise ArgumentError(f"window_length {window_length} exceeds T={T}")
    n_win = T - window_length + 1
    out = np.empty((n_win, panel.n_ages, R))
    for s in range(n_win):
        sub = MortalityPanel.from_log_rates(
            panel.ages,
            panel.years[s : s + window_length],
            panel.log_rates[:, s : s + window_length],
            panel.population_label,
        )
        out[s] = fit_classic(sub, R=R).loadings
    return RollingLoadings(
        start_years=panel.years[:n_win].copy(),
        ages=panel.ages.copy(),
        loadings=out,
        window_length=int(window_length),
    )
