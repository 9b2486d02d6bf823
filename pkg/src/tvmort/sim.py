"""Synthetic data generating processes and the Monte Carlo comparison harness.

Three single-factor designs: time-invariant loadings (dgp1), a one-off break
at mid-sample (dgp2) and a smooth logistic drift (dgp3).  The common factor
is a Gaussian random walk started at zero.  Replications are keyed by the
counter-based Philox generator so results are reproducible and independent
of scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .dataio import MortalityPanel, split_panel
from .errors import ArgumentError, McRunError
from .factor_classic import fit_classic
from .factor_tv import fit_tv
from .forecast import (
    forecast_classic,
    forecast_tv_hybrid,
    forecast_tv_local,
    forecast_tv_naive,
    mspe,
)
from .timeseries import select_arima

DGP_KINDS = ("dgp1", "dgp2", "dgp3")
METHODS = ("classic", "tv_naive", "tv_local")
NORMALIZATIONS = ("unit_norm", "unit_sum", "unit_sum_rescaled")
DEFAULT_NOISE = {"dgp1": 0.1, "dgp2": 0.03, "dgp3": 0.1}
RNG_NAME = "numpy.random.Philox"


@dataclass(frozen=True)
class DgpSpec:
    """One synthetic panel: design, sizes, seed and scales."""

    kind: str
    n_ages: int = 100
    n_years: int = 100
    seed: tuple | int = 0
    factor_sigma: float = 0.8
    noise_sigma: float | None = None
    normalization: str = "unit_norm"

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ArgumentError(f"kind must be one of {DGP_KINDS}, got {self.kind!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ArgumentError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )
        if self.kind == "dgp2" and (self.n_ages % 2 or self.n_years % 2):
            raise ArgumentError("dgp2 needs even N and T for its halves")
        if self.n_ages < 2 or self.n_years < 3:
            raise ArgumentError("need N >= 2 and T >= 3")

    @property
    def noise(self) -> float:
        return DEFAULT_NOISE[self.kind] if self.noise_sigma is None else self.noise_sigma


@dataclass(frozen=True)
class SimTruth:
    """Ground-truth loadings (N x T) and factors (T,) behind a panel."""

    loadings: np.ndarray
    factors: np.ndarray


@dataclass(frozen=True)
class McReport:
    """Mean MSPE per (DGP, method, train length) over the replications."""

    dgps: tuple
    methods: tuple
    train_lengths: tuple
    means: np.ndarray  # (n_dgp, n_method, n_k)
    raw: np.ndarray  # (n_dgp, reps, n_method, n_k), nan where a rep failed
    reps: int
    master_seed: int
    failures: tuple  # strings "(dgp, rep): message"
    rng_name: str = RNG_NAME
    normalization: str = "unit_norm"


def _rng_for(seed) -> np.random.Generator:
    if isinstance(seed, (tuple, list)):
        ss = np.random.SeedSequence(list(seed))
    else:
        ss = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(ss))


def _raw_loadings(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    N, T = spec.n_ages, spec.n_years
    if spec.kind == "dgp1":
        b = rng.uniform(0.0, 1.0, N)
        return np.repeat(b[:, None], T, axis=1)
    if spec.kind == "dgp2":
        b = rng.uniform(1.1, 1.9, N)
        out = np.repeat(b[:, None], T, axis=1)
        half_t = T // 2
        half_n = N // 2
        out[:half_n, half_t:] += 1.0
        out[half_n:, half_t:] -= 1.0
        return out
    # dgp3: logistic drift in t, ordered by age
    i = np.arange(1, N + 1)[:, None]
    t = np.arange(1, T + 1)[None, :]
    return 1.0 / (1.0 + np.exp(6.0 * i / N + 2.0 - 12.0 * t / T))


def generate(spec: DgpSpec):
    """Draw one synthetic panel; returns (panel, truth).

    Loadings are normalized cross-sectionally at every period before noise is
    added: "unit_norm" divides by the Euclidean norm, "unit_sum" by the sum,
    and "unit_sum_rescaled" additionally rescales the factor so the loading x
    factor product matches the unnormalized construction.
    """
    rng = _rng_for(spec.seed)
    N, T = spec.n_ages, spec.n_years
    k = np.cumsum(rng.normal(0.0, spec.factor_sigma, T))  # random walk from k_0 = 0
    b_raw = _raw_loadings(spec, rng)
    if spec.normalization == "unit_norm":
        scale = np.linalg.norm(b_raw, axis=0)
        b = b_raw / scale
        factors = k
    elif spec.normalization == "unit_sum":
        scale = b_raw.sum(axis=0)
        b = b_raw / scale
        factors = k
    else:  # unit_sum_rescaled
        scale = b_raw.sum(axis=0)
        b = b_raw / scale
        factors = k * scale
    eps = rng.normal(0.0, spec.noise, (N, T))
    x = b * factors[None, :] + eps
    panel = MortalityPanel.from_log_rates(
        np.arange(1, N + 1), np.arange(2001, 2001 + T), x, spec.kind
    )
    return panel, SimTruth(loadings=b, factors=factors)


def _one_replication(
    kind, dgp_index, rep, master_seed, n_ages, n_years, train_lengths, methods,
    arima_max, normalization,
):
    spec = DgpSpec(
        kind=kind,
        n_ages=n_ages,
        n_years=n_years,
        seed=(master_seed, dgp_index, rep),
        normalization=normalization,
    )
    panel, _ = generate(spec)
    values = np.full((len(methods), len(train_lengths)), np.nan)
    for ki, k in enumerate(train_lengths):
        split = split_panel(panel, int(panel.years[k - 1]))
        H = n_years - k
        fit_c = fit_classic(split.train, R=1)
        arima_c = select_arima(fit_c.factors[:, 0], *arima_max)
        fit_t = fit_tv(split.train, R=1)
        arima_t = select_arima(fit_t.factors[:, 0], *arima_max)
        for mi, method in enumerate(methods):
            if method == "classic":
                fc = forecast_classic(fit_c, H, arima_model=arima_c)
            elif method == "tv_naive":
                fc = forecast_tv_naive(fit_t, H, arima_model=arima_t)
            elif method == "tv_local":
                fc = forecast_tv_local(fit_t, H, arima_model=arima_t)
            elif method.startswith("tv_hybrid:"):
                fc = forecast_tv_hybrid(
                    fit_t, H, int(method.split(":", 1)[1]), arima_model=arima_t
                )
            else:
                raise ArgumentError(f"unknown method {method!r}")
            values[mi, ki] = mspe(fc, split.holdout).overall
    return values


def run_mc(
    dgps=DGP_KINDS,
    train_lengths=(70, 75, 80, 85, 90, 95),
    methods=METHODS,
    reps: int = 100,
    master_seed: int = 0,
    n_ages: int = 100,
    n_years: int = 100,
    n_jobs: int = 1,
    arima_max=(3, 2, 3),
    normalization: str = "unit_norm",
    max_failure_share: float = 0.05,
) -> McReport:
    """Replicated out-of-sample comparison of the forecasting methods.

    Per replication one panel is drawn and, for every train length k, both
    factor models are refitted on the first k years and each method forecasts
    the remaining T-k.  Failed replications are excluded with a warning entry;
    more than ``max_failure_share`` of them aborts the run.
    """
    if reps < 1:
        raise ArgumentError(f"reps must be >= 1, got {reps}")
    dgps = tuple(dgps)
    methods = tuple(methods)
    train_lengths = tuple(int(k) for k in train_lengths)
    for kind in dgps:
        if kind not in DGP_KINDS:
            raise ArgumentError(f"unknown DGP {kind!r}")
    for k in train_lengths:
        if not (3 <= k < n_years):
            raise ArgumentError(f"train length {k} must lie in 3..{n_years - 1}")

    tasks = [
        (kind, DGP_KINDS.index(kind), rep)
        for kind in dgps
        for rep in range(reps)
    ]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_try_replication)(
            kind, dgp_index, rep, master_seed, n_ages, n_years,
            train_lengths, methods, arima_max, normalization,
        )
        for kind, dgp_index, rep in tasks
    )
    raw = np.full((len(dgps), reps, len(methods), len(train_lengths)), np.nan)
    failures = []
    for (kind, _, rep), (values, error) in zip(tasks, results):
        di = dgps.index(kind)
        if error is not None:
            failures.append(f"({kind}, rep {rep}): {error}")
        else:
            raw[di, rep] = values
    if len(failures) > max_failure_share * len(tasks):
        raise McRunError(
            f"{len(failures)} of {len(tasks)} replications failed: "
            + "; ".join(failures[:5])
        )
    means = np.nanmean(raw, axis=1)
    return McReport(
        dgps=dgps,
        methods=methods,
        train_lengths=train_lengths,
        means=means,
        raw=raw,
        reps=reps,
        master_seed=int(master_seed),
        failures=tuple(failures),
        normalization=normalization,
    )


def _try_replication(*args):
    try:
        return _one_replication(*args), None
    except Exception as exc:  # noqa: BLE001 - failures are reported, not raised
        return None, f"{type(exc).__name__}: {exc}"


def report_to_csv(report: McReport) -> str:
    """Table with one row per (DGP, method) and one column per train length."""
    cols = ",".join(str(k) for k in report.train_lengths)
    lines = [f"dgp,method,{cols}"]
    for di, dgp in enumerate(report.dgps):
        for mi, method in enumerate(report.methods):
            vals = ",".join(f"{v:.17g}" for v in report.means[di, mi])
            lines.append(f"{dgp},{method},{vals}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: McReport) -> dict:
    """JSON-ready dictionary including per-replication raw MSPEs."""
    return {
        "dgps": list(report.dgps),
        "methods": list(report.methods),
        "train_lengths": list(report.train_lengths),
        "reps": report.reps,
        "master_seed": report.master_seed,
        "rng": report.rng_name,
        "normalization": report.normalization,
        "failures": list(report.failures),
        "means": report.means.tolist(),
        "raw": [
            [
                [[None if np.isnan(v) else v for v in row] for row in rep]
                for rep in dgp
            ]
            for dgp in report.raw
        ],
    }
