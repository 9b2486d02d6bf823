"""Backend selection for the hot numeric kernels.

The numba backend is the default whenever numba imports; set
``TVMORT_DISABLE_NUMBA=1`` (before import) to force the pure-numpy fallback.
``BACKEND`` records which one is active.  ``get_backend`` returns a named
backend explicitly, which the benchmark suite uses to time both.
"""

import os


def _numba_disabled() -> bool:
    return os.environ.get("TVMORT_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


def available_backends():
    names = []
    try:
        import numba  # noqa: F401

        names.append("numba")
    except ImportError:
        pass
    names.append("numpy")
    return names


def get_backend(name: str):
    if name == "numpy":
        from . import numpy_impl

        return numpy_impl
    if name == "numba":
        from . import numba_impl

        return numba_impl
    raise ValueError(f"unknown backend {name!r}; choose 'numba' or 'numpy'")


if not _numba_disabled():
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        from . import numpy_impl as _impl

        BACKEND = "numpy"
else:
    from . import numpy_impl as _impl

    BACKEND = "numpy"

arma_kalman_pieces = _impl.arma_kalman_pieces
arma_css_residuals = _impl.arma_css_residuals
localized_pca_rows = _impl.localized_pca_rows
unpack_arma_u = _impl.unpack_arma_u
arma_nll_u = _impl.arma_nll_u
arma_css_u = _impl.arma_css_u

__all__ = [
    "BACKEND",
    "available_backends",
    "get_backend",
    "arma_kalman_pieces",
    "arma_css_residuals",
    "localized_pca_rows",
    "unpack_arma_u",
    "arma_nll_u",
    "arma_css_u",
]
