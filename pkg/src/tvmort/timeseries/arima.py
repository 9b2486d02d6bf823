"""Univariate ARIMA estimation, AIC order selection and forecasting.

Estimation maximizes the exact Gaussian likelihood of the d-times-differenced
series via the innovations form of the Kalman filter, warm-started from a
conditional-sum-of-squares fit.  Stationarity and invertibility are enforced
during optimization by the partial-autocorrelation reparameterization; fitted
models whose polynomial roots still sit within 1e-6 of the unit circle are
rejected.  The drift term is the mean of the differenced series and is only
admitted for d <= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtri

from .. import _accel
from ..errors import ArgumentError, EstimationError

_LOG2PI = math.log(2.0 * math.pi)
_BIG = 1e30
_ROOT_TOL = 1e-6
_PACF_CLIP = 0.995
# bounded optimizer effort: the CSS pass is only a warm start, the ML pass
# needs loglik precision well below the ~0.01 AIC resolution that matters
_CSS_OPTIONS = {"maxiter": 20, "gtol": 1e-3}
_ML_OPTIONS = {"maxiter": 100, "gtol": 1e-5, "ftol": 1e-10}


@dataclass(frozen=True)
class ArimaModel:
    """Fitted ARIMA(p,d,q) with optional drift on the differenced scale."""

    p: int
    d: int
    q: int
    drift: bool
    ar: np.ndarray
    ma: np.ndarray
    drift_value: float
    sigma2: float
    loglik: float
    aic: float
    stderr: np.ndarray  # for (ar..., ma..., drift), in that order
    nobs: int

    @property
    def order(self):
        return (self.p, self.d, self.q)

    def n_params(self) -> int:
        # innovation variance counts as a parameter
        return self.p + self.q + int(self.drift) + 1


@dataclass(frozen=True)
class FactorForecast:
    """Point forecasts with symmetric Gaussian prediction intervals."""

    horizon: int
    point: np.ndarray
    level: float
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.level < 1.0):
            raise ArgumentError(f"level must lie in (0, 1), got {self.level}")
        if np.any(self.lower > self.point) or np.any(self.point > self.upper):
            raise ArgumentError("interval bounds must bracket the point forecast")


def _pacf_to_coef(r: np.ndarray) -> np.ndarray:
    """Levinson-Durbin map from partial autocorrelations to AR coefficients."""
    k = r.size
    phi = np.zeros(k)
    for i in range(k):
        prev = phi[:i].copy()
        phi[i] = r[i]
        for j in range(i):
            phi[j] = prev[j] - r[i] * prev[i - 1 - j]
    return phi


def _coef_to_pacf(phi: np.ndarray) -> np.ndarray:
    """Inverse Levinson-Durbin; clips to the open unit interval."""
    work = np.asarray(phi, dtype=float).copy()
    k = work.size
    r = np.zeros(k)
    for i in range(k - 1, -1, -1):
        r[i] = work[i]
        if abs(r[i]) >= 1.0:
            r[i] = math.copysign(_PACF_CLIP, r[i])
        if i > 0:
            denom = 1.0 - r[i] * r[i]
            prev = work[:i].copy()
            for j in range(i):
                work[j] = (prev[j] + r[i] * prev[i - 1 - j]) / denom
    return np.clip(r, -_PACF_CLIP, _PACF_CLIP)


def _coef_to_u(coef: np.ndarray) -> np.ndarray:
    r = _coef_to_pacf(coef)
    return r / np.sqrt(1.0 - r * r)


def _unpack(u: np.ndarray, p: int, q: int, drift: bool):
    ar, ma = _accel.unpack_arma_u(np.ascontiguousarray(u, dtype=float), p, q)
    mu = float(u[p + q]) if drift else 0.0
    return ar, ma, mu


def _state_arrays(ar: np.ndarray, ma: np.ndarray):
    m = max(ar.size, ma.size + 1, 1)
    phi = np.zeros(m)
    phi[: ar.size] = ar
    rvec = np.zeros(m)
    rvec[0] = 1.0
    rvec[1 : 1 + ma.size] = ma
    return phi, rvec


def _kalman_pieces(w: np.ndarray, ar: np.ndarray, ma: np.ndarray, mu: float):
    phi, rvec = _state_arrays(ar, ma)
    return _accel.arma_kalman_pieces(np.ascontiguousarray(w - mu), phi, rvec)


def _nll_from_coefs(w: np.ndarray, ar: np.ndarray, ma: np.ndarray, mu: float) -> float:
    sumlogF, ssq, ok = _kalman_pieces(w, ar, ma, mu)
    n = w.size
    if not ok or ssq <= 0.0:
        return _BIG
    sigma2 = ssq / n
    nll = 0.5 * (n * (_LOG2PI + 1.0 + math.log(sigma2)) + sumlogF)
    return nll if math.isfinite(nll) else _BIG


def _poly_root_min_modulus(coefs: np.ndarray, sign: float) -> float:
    """Smallest root modulus of 1 + sign * (c_1 z + ... + c_k z^k)."""
    if coefs.size == 0:
        return math.inf
    poly = np.concatenate(([1.0], sign * coefs))
    roots = np.roots(poly[::-1])
    if roots.size == 0:
        return math.inf
    return float(np.min(np.abs(roots)))


def _check_roots(ar: np.ndarray, ma: np.ndarray):
    if _poly_root_min_modulus(ar, -1.0) <= 1.0 + _ROOT_TOL:
        raise EstimationError("rejected candidate: AR roots on or inside the unit circle")
    if _poly_root_min_modulus(ma, +1.0) <= 1.0 + _ROOT_TOL:
        raise EstimationError("rejected candidate: MA roots on or inside the unit circle")


def _initial_u(w: np.ndarray, p: int, q: int, drift: bool) -> np.ndarray:
    mu0 = float(np.mean(w)) if drift else 0.0
    z = w - mu0
    u = np.zeros(p + q + int(drift))
    if p:
        # sample partial autocorrelations via Levinson on the autocovariances
        n = z.size
        acov = np.array([float(z[: n - k] @ z[k:]) / n for k in range(p + 1)])
        if acov[0] <= 0.0:
            r = np.zeros(p)
        else:
            r = np.zeros(p)
            phi_prev = np.zeros(p)
            for k in range(1, p + 1):
                acc = acov[k] - float(phi_prev[: k - 1] @ acov[1:k][::-1])
                denom = acov[0] - float(phi_prev[: k - 1] @ acov[1:k])
                rk = acc / denom if denom > 0.0 else 0.0
                rk = float(np.clip(rk, -0.9, 0.9))
                r[k - 1] = rk
                phi_new = phi_prev.copy()
                phi_new[k - 1] = rk
                for j in range(k - 1):
                    phi_new[j] = phi_prev[j] - rk * phi_prev[k - 2 - j]
                phi_prev = phi_new
        u[:p] = r / np.sqrt(1.0 - r * r)
    if drift:
        u[p + q] = mu0
    return u


def _css_u_pure_ar(w: np.ndarray, p: int, drift: bool) -> np.ndarray | None:
    """Exact CSS minimizer for q = 0: the residuals are linear in the
    coefficients, so ordinary least squares on the lag design solves it."""
    n = w.size
    cols = [w[p - 1 - i : n - 1 - i] for i in range(p)]
    if drift:
        cols.append(np.ones(n - p))
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, w[p:], rcond=None)
    phi = coef[:p]
    if _poly_root_min_modulus(phi, -1.0) <= 1.0 + 1e-3:
        return None  # boundary case: fall back to the generic start
    u = np.empty(p + int(drift))
    u[:p] = _coef_to_u(phi)
    if drift:
        denom = 1.0 - float(phi.sum())
        if abs(denom) < 1e-8:
            return None
        u[p] = coef[p] / denom  # intercept to differenced-scale mean
    return u


def _fun_with_grad(compiled, w, p, q, drift):
    """Objective closure returning (value, forward-difference gradient)."""

    def f_and_g(u):
        u = np.ascontiguousarray(u, dtype=float)
        f0 = compiled(u, w, p, q, drift)
        g = np.empty(u.size)
        for i in range(u.size):
            h = 1.49e-8 * max(1.0, abs(u[i]))
            up = u.copy()
            up[i] += h
            g[i] = (compiled(up, w, p, q, drift) - f0) / h
        return f0, g

    return f_and_g


def _profile_nll_coef_space(c: np.ndarray, w: np.ndarray, p: int, q: int, drift: bool) -> float:
    ar = c[:p]
    ma = c[p : p + q]
    mu = float(c[p + q]) if drift else 0.0
    return _nll_from_coefs(w, ar, ma, mu)


def _coef_stderr(w: np.ndarray, ar, ma, mu, drift: bool) -> np.ndarray:
    """Standard errors from the numerical Hessian of the profile likelihood."""
    c0 = np.concatenate([ar, ma, [mu] if drift else []])
    k = c0.size
    if k == 0:
        return np.empty(0)
    p, q = ar.size, ma.size

    def f(c):
        return _profile_nll_coef_space(c, w, p, q, drift)

    h = 1e-4 * np.maximum(1.0, np.abs(c0))
    H = np.empty((k, k))
    f0 = f(c0)
    for i in range(k):
        for j in range(i, k):
            ei = np.zeros(k)
            ej = np.zeros(k)
            ei[i] = h[i]
            ej[j] = h[j]
            if i == j:
                val = (f(c0 + ei) - 2.0 * f0 + f(c0 - ei)) / (h[i] * h[i])
            else:
                val = (
                    f(c0 + ei + ej) - f(c0 + ei - ej) - f(c0 - ei + ej) + f(c0 - ei - ej)
                ) / (4.0 * h[i] * h[j])
            H[i, j] = val
            H[j, i] = val
    try:
        cov = np.linalg.inv(H)
        se = np.sqrt(np.diag(cov))
    except np.linalg.LinAlgError:
        return np.full(k, np.nan)
    se[~np.isfinite(se)] = np.nan
    return se


def _difference(y: np.ndarray, d: int) -> np.ndarray:
    return np.diff(y, n=d) if d else y.copy()


def fit_arima(
    series,
    p: int,
    d: int,
    q: int,
    drift: bool = False,
    compute_stderr: bool = True,
) -> ArimaModel:
    """Exact-likelihood fit of ARIMA(p,d,q), optionally with drift."""
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ArgumentError("series must be one-dimensional")
    if min(p, d, q) < 0:
        raise ArgumentError("orders must be nonnegative")
    if drift and d > 1:
        raise ArgumentError("drift is only admitted for d <= 1")
    if y.size <= p + q + d + 2:
        raise ArgumentError(
            f"series of length {y.size} too short for ARIMA({p},{d},{q})"
        )
    if not np.all(np.isfinite(y)):
        raise ArgumentError("series must be finite")
    w = _difference(y, d)
    n = w.size
    if float(np.var(w)) < 1e-300:
        raise EstimationError(
            f"degenerate input: differenced series is constant (d={d})"
        )

    n_free = p + q + int(drift)
    u0 = _initial_u(w, p, q, drift)
    wc = np.ascontiguousarray(w)
    if n_free == 0:
        u_hat = u0
    else:
        try:
            # stage 1: conditional sum of squares (closed form when q = 0)
            u_start = None
            if q == 0 and p > 0:
                u_start = _css_u_pure_ar(w, p, drift)
            if u_start is None:
                css = minimize(
                    _fun_with_grad(_accel.arma_css_u, wc, p, q, drift),
                    u0,
                    jac=True,
                    method="L-BFGS-B",
                    options=_CSS_OPTIONS,
                )
                u_start = css.x if np.isfinite(css.fun) else u0
            # stage 2: exact Gaussian likelihood
            nll_fg = _fun_with_grad(_accel.arma_nll_u, wc, p, q, drift)
            ml = minimize(nll_fg, u_start, jac=True, method="L-BFGS-B", options=_ML_OPTIONS)
            u_hat = ml.x
            best = ml.fun
            if not np.isfinite(best) or best >= _BIG:
                nm = minimize(
                    lambda u: _accel.arma_nll_u(
                        np.ascontiguousarray(u, dtype=float), wc, p, q, drift
                    ),
                    u_start,
                    method="Nelder-Mead",
                    options={"maxiter": 2000},
                )
                u_hat, best = nm.x, nm.fun
            if not np.isfinite(best) or best >= _BIG:
                raise EstimationError(
                    f"ARIMA({p},{d},{q}) drift={drift} did not converge: "
                    f"objective {best!r}"
                )
        except (np.linalg.LinAlgError, FloatingPointError) as exc:
            raise EstimationError(f"ARIMA({p},{d},{q}) optimization failed: {exc}") from exc

    ar, ma, mu = _unpack(u_hat, p, q, drift)
    _check_roots(ar, ma)
    sumlogF, ssq, ok = _kalman_pieces(w, ar, ma, mu)
    if not ok or ssq < 0.0:
        raise EstimationError(f"ARIMA({p},{d},{q}) likelihood evaluation failed")
    sigma2 = ssq / n
    if sigma2 <= 0.0 or not math.isfinite(sigma2):
        raise EstimationError(f"degenerate innovation variance {sigma2!r}")
    loglik = -0.5 * (n * (_LOG2PI + math.log(sigma2)) + sumlogF + n)
    n_par = p + q + int(drift) + 1
    aic = -2.0 * loglik + 2.0 * n_par
    if compute_stderr:
        stderr = _coef_stderr(w, ar, ma, mu, drift)
    else:
        stderr = np.full(n_free, np.nan)
    return ArimaModel(
        p=int(p),
        d=int(d),
        q=int(q),
        drift=bool(drift),
        ar=ar,
        ma=ma,
        drift_value=mu,
        sigma2=float(sigma2),
        loglik=float(loglik),
        aic=float(aic),
        stderr=stderr,
        nobs=int(y.size),
    )


def with_stderr(model: ArimaModel, series) -> ArimaModel:
    """Return a copy of the model with standard errors filled in."""
    w = _difference(np.asarray(series, dtype=float), model.d)
    stderr = _coef_stderr(w, model.ar, model.ma, model.drift_value, model.drift)
    return ArimaModel(
        p=model.p,
        d=model.d,
        q=model.q,
        drift=model.drift,
        ar=model.ar,
        ma=model.ma,
        drift_value=model.drift_value,
        sigma2=model.sigma2,
        loglik=model.loglik,
        aic=model.aic,
        stderr=stderr,
        nobs=model.nobs,
    )


def select_arima(
    series,
    max_p: int = 3,
    max_d: int = 2,
    max_q: int = 3,
) -> ArimaModel:
    """Exhaustive AIC grid search; drift is tried for d <= 1 only.

    Candidates that fail to estimate are skipped; raises when every candidate
    fails.  Ties keep the first candidate in fixed grid order.
    """
    if min(max_p, max_d, max_q) < 0:
        raise ArgumentError("grid bounds must be nonnegative")
    y = np.asarray(series, dtype=float)
    best = None
    failures = []
    for d in range(max_d + 1):
        drift_options = (False, True) if d <= 1 else (False,)
        for p in range(max_p + 1):
            for q in range(max_q + 1):
                for drift in drift_options:
                    try:
                        cand = fit_arima(y, p, d, q, drift, compute_stderr=False)
                    except (EstimationError, ArgumentError) as exc:
                        failures.append(f"({p},{d},{q},drift={drift}): {exc}")
                        continue
                    if not math.isfinite(cand.aic):
                        failures.append(f"({p},{d},{q},drift={drift}): non-finite AIC")
                        continue
                    if best is None or cand.aic < best.aic:
                        best = cand
    if best is None:
        detail = "; ".join(failures[:5])
        raise EstimationError(f"every ARIMA candidate failed ({detail})")
    return with_stderr(best, y)


def _psi_weights(ar: np.ndarray, ma: np.ndarray, H: int) -> np.ndarray:
    psi = np.zeros(H)
    psi[0] = 1.0
    for j in range(1, H):
        acc = ma[j - 1] if j - 1 < ma.size else 0.0
        for i in range(min(j, ar.size)):
            acc += ar[i] * psi[j - 1 - i]
        psi[j] = acc
    return psi


def forecast_arima(model: ArimaModel, series, H: int, level: float = 0.8) -> FactorForecast:
    """Recursive point forecasts with psi-weight prediction intervals.

    The series must be the one the model was fitted on (or its continuation);
    conditional residuals supply the MA terms of the recursion.  Interval
    half-widths use the psi weights of the differenced-scale ARMA process,
    re-integrated d times.
    """
    if H < 1:
        raise ArgumentError(f"horizon must be >= 1, got {H}")
    if not (0.0 < level < 1.0):
        raise ArgumentError(f"level must lie in (0, 1), got {level}")
    y = np.asarray(series, dtype=float)
    w = _difference(y, model.d)
    n = w.size
    z = np.ascontiguousarray(w - model.drift_value)
    e = _accel.arma_css_residuals(z, model.ar, model.ma)
    zext = np.concatenate([z, np.zeros(H)])
    eext = np.concatenate([e, np.zeros(H)])
    for h in range(H):
        t = n + h
        acc = 0.0
        for i in range(model.p):
            acc += model.ar[i] * zext[t - 1 - i]
        for j in range(model.q):
            acc += model.ma[j] * eext[t - 1 - j]
        zext[t] = acc
    point = zext[n:] + model.drift_value
    # integrate d times back to the level of the original series
    partials = [y]
    for _ in range(model.d):
        partials.append(np.diff(partials[-1]))
    for lvl in range(model.d - 1, -1, -1):
        point = partials[lvl][-1] + np.cumsum(point)

    psi = _psi_weights(model.ar, model.ma, H)
    for _ in range(model.d):
        psi = np.cumsum(psi)
    variance = model.sigma2 * np.cumsum(psi * psi)
    zq = float(ndtri(0.5 * (1.0 + level)))
    half = zq * np.sqrt(variance)
    return FactorForecast(
        horizon=int(H),
        point=point,
        level=float(level),
        lower=point - half,
        upper=point + half,
    )
