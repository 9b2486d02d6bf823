"""Univariate factor dynamics: ARIMA modelling and local linear extrapolation."""

from .arima import (
    ArimaModel,
    FactorForecast,
    fit_arima,
    forecast_arima,
    select_arima,
    with_stderr,
)
from .loclin import (
    LocalLinearSpec,
    extrapolate_paths,
    local_linear_extrapolate,
    select_lambda,
)

__all__ = [
    "ArimaModel",
    "FactorForecast",
    "fit_arima",
    "forecast_arima",
    "select_arima",
    "with_stderr",
    "LocalLinearSpec",
    "extrapolate_paths",
    "local_linear_extrapolate",
    "select_lambda",
]
