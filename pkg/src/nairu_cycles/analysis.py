"""Cycle statistics and parameter recovery from sampled trajectories.

Period is measured as the mean spacing of upward mean-crossings (robust for
the short, few-cycle series this model produces, where spectral resolution
would be poor).  Phase lag comes from the peak of the unemployment/inflation
cross-correlation with parabolic refinement.  Parameters are recovered by
two ordinary least-squares fits on finite-difference derivatives: the model
is linear in its constants once derivatives are known, so a, kappa, n and z
are measurements, not tuned fit parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nairu_cycles.model import DomainError, ModelParams
from nairu_cycles.simulate import Trajectory

__all__ = [
    "AnalysisError",
    "CycleStats",
    "FitResult",
    "add_relative_noise",
    "cycle_stats",
    "estimate_amplitude",
    "estimate_period",
    "estimate_phase_lag",
    "fit_params",
]

_FIELDS = ("inflation", "unemployment")


class AnalysisError(ValueError):
    """A trajectory cannot support the requested measurement."""


@dataclass(frozen=True)
class CycleStats:
    """Measured cycle quantities; phase_lag is unemployment behind inflation."""

    period: float
    phase_lag: float
    amplitude_inflation: float
    amplitude_unemployment: float
    mean_inflation: float
    mean_unemployment: float


@dataclass(frozen=True)
class FitResult:
    """Recovered model constants with per-equation regression diagnostics."""

    params: ModelParams
    residual_inflation_eq: float
    residual_unemployment_eq: float
    samples_used: int


def _series(traj: Trajectory, field: str) -> np.ndarray:
    if field not in _FIELDS:
        raise AnalysisError(f"unknown field {field!r}; expected one of {_FIELDS}")
    return np.asarray(getattr(traj, field), dtype=float)


def _sample_dt(traj: Trajectory) -> float:
    t = np.asarray(traj.times, dtype=float)
    if t.size < 2:
        raise AnalysisError("trajectory has fewer than 2 samples")
    dt = float((t[-1] - t[0]) / (t.size - 1))
    if dt <= 0 or np.max(np.abs(np.diff(t) - dt)) > 1e-6 * dt:
        raise AnalysisError("trajectory is not uniformly sampled")
    return dt


def estimate_period(traj: Trajectory, field: str = "inflation") -> float:
    """Mean spacing of successive upward mean-crossings of ``field``, years.

    Crossing instants are linearly interpolated between samples.  Needs at
    least two upward crossings, i.e. roughly 1.5 cycles of data.
    """
    _sample_dt(traj)
    t = np.asarray(traj.times, dtype=float)
    y = _series(traj, field)
    y = y - y.mean()
    below = y[:-1] < 0.0
    above = y[1:] >= 0.0
    idx = np.nonzero(below & above)[0]
    if idx.size < 2:
        raise AnalysisError(
            f"need at least 2 upward mean-crossings of {field!r}, found {idx.size} "
            "(series too short or constant)"
        )
    frac = -y[idx] / (y[idx + 1] - y[idx])
    crossings = t[idx] + frac * (t[idx + 1] - t[idx])
    return float(np.mean(np.diff(crossings)))


def estimate_phase_lag(traj: Trajectory, period: float | None = None) -> float:
    """Lag (years, in [0, period)) by which unemployment trails inflation.

    Maximizes the cross-correlation of the mean-removed series over lags up
    to one period, refining the discrete peak by parabolic interpolation.
    """
    dt = _sample_dt(traj)
    if period is None:
        period = estimate_period(traj, "inflation")
    x = _series(traj, "inflation")
    y = _series(traj, "unemployment")
    x = x - x.mean()
    y = y - y.mean()
    if not (x.any() and y.any()):
        raise AnalysisError("phase lag undefined for a constant series")

    n = x.size
    n_lags = int(math.floor(period / dt))
    if n_lags < 2 or n + 1 <= n_lags + 2:
        raise AnalysisError("series too short to scan one period of lags")
    # full[n-1+k] = sum_j y[j+k] * x[j]: positive k means unemployment lags.
    full = np.correlate(y, x, mode="full")
    ks = np.arange(-1, n_lags + 1)
    corr = full[n - 1 + ks] / (n - np.abs(ks))

    m = 1 + int(np.argmax(corr[1 : n_lags + 1]))  # restrict peak to k in [0, n_lags-1]
    c_prev, c_peak, c_next = corr[m - 1], corr[m], corr[m + 1]
    curvature = c_prev - 2.0 * c_peak + c_next
    delta = 0.0 if curvature == 0.0 else 0.5 * (c_prev - c_next) / curvature
    lag = (ks[m] + delta) * dt
    if -dt < lag < 0.0:  # parabolic refinement may inch just below zero
        lag = 0.0
    return float(lag % period)


def _whole_periods_slice(t: np.ndarray, period: float) -> slice:
    span = float(t[-1] - t[0])
    n_periods = int(math.floor(span / period * (1.0 + 1e-9)))
    if n_periods < 1:
        raise AnalysisError(
            f"span {span:.6g} y is shorter than one period ({period:.6g} y)"
        )
    end = float(t[0]) + n_periods * period
    stop = int(np.searchsorted(t, end * (1.0 + 1e-12), side="right"))
    return slice(0, stop)


def estimate_amplitude(
    traj: Trajectory, field: str, period: float | None = None
) -> float:
    """Half the max-min swing of ``field`` over complete periods.

    An exactly constant series has amplitude 0 regardless of span (its
    period is unmeasurable, so the windowing is skipped).
    """
    y = _series(traj, field)
    if y.size and float(np.max(y) - np.min(y)) == 0.0:
        return 0.0
    if period is None:
        period = estimate_period(traj, field)
    window = _whole_periods_slice(np.asarray(traj.times, dtype=float), period)
    yw = y[window]
    return float(np.max(yw) - np.min(yw)) / 2.0


def cycle_stats(traj: Trajectory) -> CycleStats:
    """All cycle statistics of a trajectory in one pass.

    The period is measured on inflation and shared by every windowed
    statistic; amplitudes and means are computed over complete periods only,
    so partial cycles at the end of the series cannot bias them.
    """
    t = np.asarray(traj.times, dtype=float)
    period = estimate_period(traj, "inflation")
    lag = estimate_phase_lag(traj, period=period)
    window = _whole_periods_slice(t, period)
    inflation = _series(traj, "inflation")[window]
    unemployment = _series(traj, "unemployment")[window]
    return CycleStats(
        period=period,
        phase_lag=lag,
        amplitude_inflation=float(np.max(inflation) - np.min(inflation)) / 2.0,
        amplitude_unemployment=float(np.max(unemployment) - np.min(unemployment)) / 2.0,
        mean_inflation=float(np.mean(inflation)),
        mean_unemployment=float(np.mean(unemployment)),
    )


def _ols_line(x: np.ndarray, y: np.ndarray, what: str) -> tuple[float, float, float]:
    """Least-squares y = intercept + slope*x; returns (slope, intercept, rms)."""
    if float(np.max(x) - np.min(x)) == 0.0:
        raise AnalysisError(f"rank-deficient regression: {what} is constant")
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (intercept + slope * x)) ** 2)))
    return float(slope), float(intercept), rms


def fit_params(traj: Trajectory) -> FitResult:
    """Recover (a, kappa, n, z) from a sampled trajectory.

    Central differences give the derivatives on interior samples; then

      dI/dt           = a*n - a*u          -> slope -a, intercept a*n
      (du/dt)/(1 - u) = (kappa/a)*(I - z)  -> slope kappa/a, intercept -(kappa/a)*z

    are two ordinary least-squares lines.  Dividing by (1 - u) instead of
    linearizing it away keeps the second fit exact for the nonlinear model.
    Reports the rms residual of each regression.
    """
    dt = _sample_dt(traj)
    inflation = _series(traj, "inflation")
    unemployment = _series(traj, "unemployment")
    if inflation.size < 5:
        raise AnalysisError("need at least 5 samples to fit")
    if np.any(unemployment >= 1.0):
        raise AnalysisError("unemployment >= 1 in series")

    d_inflation = (inflation[2:] - inflation[:-2]) / (2.0 * dt)
    d_unemployment = (unemployment[2:] - unemployment[:-2]) / (2.0 * dt)
    i_mid = inflation[1:-1]
    u_mid = unemployment[1:-1]

    slope_i, intercept_i, rms_i = _ols_line(u_mid, d_inflation, "unemployment")
    a = -slope_i
    scaled_du = d_unemployment / (1.0 - u_mid)
    slope_u, intercept_u, rms_u = _ols_line(i_mid, scaled_du, "inflation")
    if slope_u == 0.0 or a == 0.0:
        raise AnalysisError("degenerate fit: zero slope recovered")

    try:
        params = ModelParams(
            a=a,
            kappa=a * slope_u,
            n=intercept_i / a,
            z=-intercept_u / slope_u,
        )
    except DomainError as exc:
        raise AnalysisError(f"recovered parameters are invalid: {exc}") from exc
    return FitResult(
        params=params,
        residual_inflation_eq=rms_i,
        residual_unemployment_eq=rms_u,
        samples_used=int(i_mid.size),
    )


def add_relative_noise(traj: Trajectory, scale: float, seed: int) -> Trajectory:
    """Trajectory with seeded Gaussian noise added to both series.

    Per series the noise is independent per sample with standard deviation
    ``scale`` times the rms of the mean-removed series (so `scale=0.01` is
    "1% relative noise").  Deterministic for a given seed.
    """
    if scale < 0:
        raise AnalysisError(f"noise scale must be >= 0, got {scale!r}")
    rng = np.random.default_rng(seed)
    out = []
    for field in _FIELDS:
        y = _series(traj, field)
        sigma = scale * float(np.sqrt(np.mean((y - y.mean()) ** 2)))
        out.append(y + sigma * rng.standard_normal(y.size))
    return Trajectory(
        times=np.asarray(traj.times, dtype=float).copy(),
        inflation=out[0],
        unemployment=out[1],
        dynamics=traj.dynamics,
        params=traj.params,
    )
