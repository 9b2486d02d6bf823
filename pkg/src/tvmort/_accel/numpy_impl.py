"""Pure-numpy backend: the reference kernels, uncompiled."""

from .core import (
    arma_css_residuals,
    arma_kalman_pieces,
    localized_pca_rows,
    make_arma_objectives,
    unpack_arma_u,
)

arma_nll_u, arma_css_u = make_arma_objectives(
    arma_kalman_pieces, arma_css_residuals, unpack_arma_u
)

__all__ = [
    "arma_kalman_pieces",
    "arma_css_residuals",
    "localized_pca_rows",
    "unpack_arma_u",
    "arma_nll_u",
    "arma_css_u",
]
