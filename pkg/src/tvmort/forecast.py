"""Mortality-rate forecasts, optimal-boundary estimation and error metrics.

All loading-extrapolation methods share the factor forecast built from the
same fit, so differences in prediction error are attributable to the
loadings alone.  The hybrid method follows the local-regression loadings for
the first k horizons and freezes them afterwards; k = 0 degenerates to the
naive method and k = H to the pure local-regression method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import MortalityPanel
from .errors import ArgumentError
from .factor_classic import ClassicFit
from .factor_tv import TvFit
from .timeseries import (
    ArimaModel,
    FactorForecast,
    LocalLinearSpec,
    extrapolate_paths,
    forecast_arima,
    select_arima,
    select_lambda,
)


@dataclass(frozen=True)
class MortalityForecast:
    """Point forecasts of log rates, with the parts they reconstruct from."""

    method: str
    ages: np.ndarray
    years: np.ndarray  # forecast calendar years, length H
    predicted: np.ndarray  # (N, H) log rates
    factor_forecast: FactorForecast
    loadings_used: np.ndarray  # (N, H)
    a_x: np.ndarray
    arima: ArimaModel
    loading_sums: np.ndarray  # per-horizon sums of loadings_used (diagnostic)

    @property
    def horizon(self) -> int:
        return self.years.size


@dataclass(frozen=True)
class BoundaryEstimate:
    """Least-squares split between short- and long-term forecasting."""

    k_hat: int
    ssr_curve: np.ndarray  # SSR(k) for k = 0..T-T0
    T0: int
    window: float
    factor_source: str


@dataclass(frozen=True)
class MspeReport:
    overall: float
    by_year: np.ndarray
    by_age: np.ndarray


def _single_factor_paths(fit: TvFit) -> np.ndarray:
    if fit.R != 1:
        raise ArgumentError(
            f"loading extrapolation is defined for single-factor fits, got R={fit.R}"
        )
    return fit.loading_paths(0)


def _factor_forecast(fit, H, level, arima_model, arima_max):
    if fit.R != 1:
        raise ArgumentError(f"factor forecasting requires R=1, got R={fit.R}")
    series = fit.factors[:, 0]
    if arima_model is None:
        arima_model = select_arima(series, *arima_max)
    ff = forecast_arima(arima_model, series, H, level)
    return arima_model, ff


def _assemble(method, fit, loadings_used, arima_model, ff):
    point = ff.point
    predicted = fit.a_x[:, None] + loadings_used * point[None, :]
    years = np.arange(fit.years[-1] + 1, fit.years[-1] + 1 + ff.horizon)
    return MortalityForecast(
        method=method,
        ages=fit.ages.copy(),
        years=years,
        predicted=predicted,
        factor_forecast=ff,
        loadings_used=loadings_used,
        a_x=fit.a_x.copy(),
        arima=arima_model,
        loading_sums=loadings_used.sum(axis=0),
    )


def forecast_classic(
    fit: ClassicFit,
    H: int,
    level: float = 0.8,
    arima_model: ArimaModel | None = None,
    arima_max=(3, 2, 3),
) -> MortalityForecast:
    """Constant loadings; factor forecast by AIC-selected ARIMA."""
    arima_model, ff = _factor_forecast(fit, H, level, arima_model, arima_max)
    loadings = np.repeat(fit.loadings[:, :1], H, axis=1)
    return _assemble("classic", fit, loadings, arima_model, ff)


def forecast_tv_naive(
    fit: TvFit,
    H: int,
    level: float = 0.8,
    arima_model: ArimaModel | None = None,
    arima_max=(3, 2, 3),
) -> MortalityForecast:
    """Loadings frozen at their last estimated value."""
    _single_factor_paths(fit)
    arima_model, ff = _factor_forecast(fit, H, level, arima_model, arima_max)
    loadings = np.repeat(fit.loadings[-1, :, :1], H, axis=1)
    return _assemble("tv_naive", fit, loadings, arima_model, ff)


def forecast_tv_local(
    fit: TvFit,
    H: int,
    level: float = 0.8,
    window: float | None = None,
    arima_model: ArimaModel | None = None,
    arima_max=(3, 2, 3),
) -> MortalityForecast:
    """Loadings extrapolated per age by recursive local linear regression.

    No normalization is imposed on the extrapolated loadings (they are free
    per-age regressions); their per-horizon sums are reported in
    ``loading_sums``.
    """
    paths = _single_factor_paths(fit)
    if window is None:
        window = select_lambda(paths)
    arima_model, ff = _factor_forecast(fit, H, level, arima_model, arima_max)
    loadings = extrapolate_paths(paths, H, LocalLinearSpec(window))
    return _assemble("tv_local", fit, loadings, arima_model, ff)


def forecast_tv_hybrid(
    fit: TvFit,
    H: int,
    k: int,
    level: float = 0.8,
    window: float | None = None,
    arima_model: ArimaModel | None = None,
    arima_max=(3, 2, 3),
) -> MortalityForecast:
    """Local-regression loadings through horizon k, frozen afterwards."""
    paths = _single_factor_paths(fit)
    k = int(k)
    if not (0 <= k <= H):
        raise ArgumentError(f"k must lie in 0..{H}, got {k}")
    arima_model, ff = _factor_forecast(fit, H, level, arima_model, arima_max)
    if k == 0:
        loadings = np.repeat(fit.loadings[-1, :, :1], H, axis=1)
    else:
        if window is None:
            window = select_lambda(paths)
        ext = extrapolate_paths(paths, k, LocalLinearSpec(window))
        loadings = np.empty((paths.shape[0], H))
        loadings[:, :k] = ext
        loadings[:, k:] = ext[:, k - 1 : k]
    return _assemble(f"tv_hybrid:{k}", fit, loadings, arima_model, ff)


def estimate_boundary(
    train_fit: TvFit,
    validation_panel: MortalityPanel,
    window: float | None = None,
    factor_source: str = "forecast",
    arima_model: ArimaModel | None = None,
    arima_max=(3, 2, 3),
) -> BoundaryEstimate:
    """Least-squares estimate of the short/long-term forecasting boundary.

    For every k = 0..V the hybrid loadings over the validation window are
    paired with out-of-sample factor forecasts from the training fit (or, for
    sensitivity runs, with factors re-estimated from the validation data via
    ``factor_source="insample"``); the k minimizing the total sum of squared
    residuals wins, ties going to the smaller k.
    """
    paths = _single_factor_paths(train_fit)
    V = validation_panel.n_years
    if V < 2:
        raise ArgumentError(f"validation window must have >= 2 years, got {V}")
    if validation_panel.years[0] != train_fit.years[-1] + 1:
        raise ArgumentError(
            "validation years must directly follow the training years "
            f"({validation_panel.years[0]} after {train_fit.years[-1]})"
        )
    if not np.array_equal(validation_panel.ages, train_fit.ages):
        raise ArgumentError("validation ages must match the training ages")
    if factor_source not in ("forecast", "insample"):
        raise ArgumentError(f"unknown factor_source {factor_source!r}")

    if window is None:
        window = select_lambda(paths)
    ext = extrapolate_paths(paths, V, LocalLinearSpec(window))  # (N, V)
    a_x = train_fit.a_x
    actual = validation_panel.log_rates

    if factor_source == "forecast":
        series = train_fit.factors[:, 0]
        if arima_model is None:
            arima_model = select_arima(series, *arima_max)
        kv = forecast_arima(arima_model, series, V, 0.8).point
    else:
        centered = actual - a_x[:, None]
        denom = np.einsum("nv,nv->v", ext, ext)
        if np.any(denom <= 0.0):
            raise ArgumentError("degenerate extrapolated loadings in stage-2 factors")
        kv = np.einsum("nv,nv->v", ext, centered) / denom

    last_train = train_fit.loadings[-1, :, 0]
    ssr = np.empty(V + 1)
    for k in range(V + 1):
        if k == 0:
            loads = np.repeat(last_train[:, None], V, axis=1)
        else:
            loads = np.hstack([ext[:, :k], np.repeat(ext[:, k - 1 : k], V - k, axis=1)])
        resid = actual - a_x[:, None] - loads * kv[None, :]
        ssr[k] = float(np.sum(resid * resid))
    k_hat = int(np.argmin(ssr))  # argmin takes the first minimum: smallest k
    return BoundaryEstimate(
        k_hat=k_hat,
        ssr_curve=ssr,
        T0=int(train_fit.n_years),
        window=float(window),
        factor_source=factor_source,
    )


def mse_in_sample(fit, panel: MortalityPanel) -> float:
    """Mean squared in-sample residual of the fitted factorization."""
    if not np.array_equal(panel.ages, fit.ages) or not np.array_equal(
        panel.years, fit.years
    ):
        raise ArgumentError("panel does not match the fit")
    resid = panel.log_rates - fit.a_x[:, None] - fit.reconstruction()
    return float(np.mean(resid * resid))


def mspe(forecast: MortalityForecast, actual: MortalityPanel) -> MspeReport:
    """Mean squared prediction error: overall, per year and per age."""
    if not np.array_equal(actual.ages, forecast.ages):
        raise ArgumentError("ages of forecast and actual panel differ")
    if not np.array_equal(actual.years, forecast.years):
        raise ArgumentError("years of forecast and actual panel differ")
    err2 = (actual.log_rates - forecast.predicted) ** 2
    return MspeReport(
        overall=float(err2.mean()),
        by_year=err2.mean(axis=0),
        by_age=err2.mean(axis=1),
    )
