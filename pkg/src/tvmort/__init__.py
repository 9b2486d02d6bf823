"""Mortality panel modelling with time-varying factor loadings.

Estimates the classical (Lee-Carter) factor model and its localized-PCA
extension with period-specific loadings, forecasts log death rates by
extrapolating both factors (ARIMA) and loadings (naive / local regression /
hybrid), estimates the optimal short/long-term forecasting boundary, and
ships a reproducible Monte Carlo comparison harness.
"""

from ._accel import BACKEND as ACCEL_BACKEND
from .dataio import (
    MortalityPanel,
    PanelSplit,
    build_panel,
    emit_csv_long,
    emit_csv_matrix,
    parse_csv_long,
    parse_hmd_table,
    split_panel,
)
from .factor_classic import (
    ClassicFit,
    RollingLoadings,
    fit_classic,
    rolling_window_loadings,
    select_num_factors,
)
from .factor_tv import LocalPca, TvFit, align_signs, fit_tv, localized_pca_at, stage2_factors
from .forecast import (
    BoundaryEstimate,
    MortalityForecast,
    MspeReport,
    estimate_boundary,
    forecast_classic,
    forecast_tv_hybrid,
    forecast_tv_local,
    forecast_tv_naive,
    mse_in_sample,
    mspe,
)
from .kernels import KernelSpec, boundary_weight, silverman_bandwidth, weight_vector
from .sim import DgpSpec, McReport, SimTruth, generate, run_mc
from .timeseries import (
    ArimaModel,
    FactorForecast,
    LocalLinearSpec,
    extrapolate_paths,
    fit_arima,
    forecast_arima,
    local_linear_extrapolate,
    select_arima,
    select_lambda,
)

__version__ = "0.1.0"

__all__ = [
    "ACCEL_BACKEND",
    "MortalityPanel",
    "PanelSplit",
    "build_panel",
    "emit_csv_long",
    "emit_csv_matrix",
    "parse_csv_long",
    "parse_hmd_table",
    "split_panel",
    "ClassicFit",
    "RollingLoadings",
    "fit_classic",
    "rolling_window_loadings",
    "select_num_factors",
    "LocalPca",
    "TvFit",
    "align_signs",
    "fit_tv",
    "localized_pca_at",
    "stage2_factors",
    "BoundaryEstimate",
    "MortalityForecast",
    "MspeReport",
    "estimate_boundary",
    "forecast_classic",
    "forecast_tv_hybrid",
    "forecast_tv_local",
    "forecast_tv_naive",
    "mse_in_sample",
    "mspe",
    "KernelSpec",
    "boundary_weight",
    "silverman_bandwidth",
    "weight_vector",
    "DgpSpec",
    "McReport",
    "SimTruth",
    "generate",
    "run_mc",
    "ArimaModel",
    "FactorForecast",
    "LocalLinearSpec",
    "extrapolate_paths",
    "fit_arima",
    "forecast_arima",
    "local_linear_extrapolate",
    "select_arima",
    "select_lambda",
]
