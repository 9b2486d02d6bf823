"""Numba backend: the reference kernels, jit-compiled.

No fastmath so both backends produce identical floating-point results.  The
composed ARMA objectives close over jitted primitives, which numba cannot
cache to disk; the primitives themselves are cached.
"""

import numba

from . import core

_OPTS = dict(cache=True, nogil=True)

arma_kalman_pieces = numba.njit(**_OPTS)(core.arma_kalman_pieces)
arma_css_residuals = numba.njit(**_OPTS)(core.arma_css_residuals)
localized_pca_rows = numba.njit(**_OPTS)(core.localized_pca_rows)
unpack_arma_u = numba.njit(**_OPTS)(core.unpack_arma_u)

_nll_py, _css_py = core.make_arma_objectives(
    arma_kalman_pieces, arma_css_residuals, unpack_arma_u
)
arma_nll_u = numba.njit(nogil=True)(_nll_py)
arma_css_u = numba.njit(nogil=True)(_css_py)

__all__ = [
    "arma_kalman_pieces",
    "arma_css_residuals",
    "localized_pca_rows",
    "unpack_arma_u",
    "arma_nll_u",
    "arma_css_u",
]
