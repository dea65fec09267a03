"""Spectral analysis of the linearized dynamics and its closed-form solution.

The 2x2 Jacobian [[0, -a], [(kappa/a)(1-n), 0]] has eigenvalues
``+/- i*sqrt(kappa*(1-n))``: purely imaginary for every valid parameter set,
so the fixed point is marginally stable and perturbations oscillate at the
natural angular frequency ``omega = sqrt(kappa*(1-n))`` without growing or
decaying.  Unemployment trails inflation by a quarter of the period.

The closed-form solution implemented here doubles as an oracle for the
numerical integrator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from nairu_cycles.model import ModelParams, Perturbation

__all__ = [
    "Classification",
    "LinearSolution",
    "StabilityReport",
    "amplitudes",
    "classify",
    "classify_eigenvalues",
    "eigenvalues",
    "geometric_mean_speed",
    "linear_solution",
    "natural_frequency",
    "period",
    "phase_lag",
    "stability_report",
]

#: Default absolute tolerance on Re(lambda) for classification; the closed
#: form is exactly imaginary, so this only absorbs rounding noise.
DEFAULT_RE_TOLERANCE = 1e-12

ArrayLike = Union[float, np.ndarray]


class Classification(str, Enum):
    STABLE = "stable"
    MARGINALLY_STABLE = "marginally-stable"
    UNSTABLE = "unstable"


def natural_frequency(p: ModelParams) -> float:
    """Angular frequency of the business-cycle oscillation, radians/year.

    omega = sqrt(kappa * (1 - n)); also the geometric mean interpretation:
    sqrt(a * (kappa/a)) up to the (1 - n) factor.
    """
    return math.sqrt(p.kappa * (1.0 - p.n))


def period(p: ModelParams) -> float:
    """Cycle period 2*pi/omega in years.

    Grows without bound as n -> 1 (omega -> 0), but is always finite for
    valid parameters since n < 1 strictly.
    """
    return 2.0 * math.pi / natural_frequency(p)


def phase_lag(p: ModelParams) -> float:
    """Time by which unemployment trails inflation: a quarter period, years."""
    return 0.25 * period(p)


def geometric_mean_speed(p: ModelParams) -> float:
    """Geometric mean of the inflation response speed ``a`` and the
    unemployment response speed ``kappa/a``; equals sqrt(kappa) identically."""
    return math.sqrt(p.kappa)


def eigenvalues(p: ModelParams) -> tuple[complex, complex]:
    """Eigenvalue pair of the linearization: +/- i*sqrt(kappa*(1-n)).

    Real parts are exactly zero; the pair is a complex-conjugate couple with
    the positive-imaginary member first.
    """
    w = natural_frequency(p)
    return (complex(0.0, w), complex(0.0, -w))


def classify_eigenvalues(
    eigs: tuple[complex, complex], re_tolerance: float = DEFAULT_RE_TOLERANCE
) -> Classification:
    """Classify a fixed point from an eigenvalue pair.

    Stable if both real parts are below -re_tolerance, unstable if any
    exceeds +re_tolerance, marginally stable otherwise.
    """
    if re_tolerance < 0:
        raise ValueError(f"re_tolerance must be >= 0, got {re_tolerance!r}")
    max_re = max(e.real for e in eigs)
    if max_re < -re_tolerance:
        return Classification.STABLE
    if max_re > re_tolerance:
        return Classification.UNSTABLE
    return Classification.MARGINALLY_STABLE


def classify(
    p: ModelParams, re_tolerance: float = DEFAULT_RE_TOLERANCE
) -> Classification:
    """Stability classification of the model's fixed point (always
    marginally stable for valid parameters)."""
    return classify_eigenvalues(eigenvalues(p), re_tolerance)


@dataclass(frozen=True)
class LinearSolution:
    """Closed-form solution of the linearized dynamics in a cos/sin basis.

        eps(t) = eps0 * cos(omega t) + eps_sin * sin(omega t)
        eta(t) = eta0 * cos(omega t) + eta_sin * sin(omega t)

    with eps_sin = -a*eta0/omega and eta_sin = omega*eps0/a, which makes the
    pair satisfy d(eps)/dt = -a*eta and d(eta)/dt = (kappa/a)(1-n)*eps
    identically.  Coefficients are stored directly (rather than amplitude and
    phase) to avoid branch cuts; amplitudes are derived views.
    """

    params: ModelParams
    eps0: float
    eta0: float
    omega: float
    eps_sin: float
    eta_sin: float

    def eval(self, t: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
        """Perturbation (eps, eta) at time(s) ``t``."""
        c = np.cos(self.omega * np.asarray(t, dtype=float))
        s = np.sin(self.omega * np.asarray(t, dtype=float))
        return self.eps0 * c + self.eps_sin * s, self.eta0 * c + self.eta_sin * s

    def derivative(self, t: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
        """Analytic time derivative (d_eps, d_eta) at time(s) ``t``."""
        c = np.cos(self.omega * np.asarray(t, dtype=float))
        s = np.sin(self.omega * np.asarray(t, dtype=float))
        d_eps = self.omega * (self.eps_sin * c - self.eps0 * s)
        d_eta = self.omega * (self.eta_sin * c - self.eta0 * s)
        return d_eps, d_eta

    def states(self, t: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
        """(inflation, unemployment) at time(s) ``t``."""
        eps, eta = self.eval(t)
        return self.params.z + eps, self.params.n + eta

    @property
    def amplitude_inflation(self) -> float:
        return math.hypot(self.eps0, self.eps_sin)

    @property
    def amplitude_unemployment(self) -> float:
        return math.hypot(self.eta0, self.eta_sin)


def linear_solution(p: ModelParams, q0: Perturbation) -> LinearSolution:
    """Closed form of the linear dynamics started from ``q0`` at t = 0.

    For the pure unemployment displacement eps0 = 0 this reduces to
    u(t) = n + eta0*cos(omega t) with inflation swinging sinusoidally at
    amplitude a*|eta0|/omega, a quarter period ahead of unemployment.
    """
    w = natural_frequency(p)
    return LinearSolution(
        params=p,
        eps0=q0.eps,
        eta0=q0.eta,
        omega=w,
        eps_sin=-p.a * q0.eta / w,
        eta_sin=w * q0.eps / p.a,
    )


def amplitudes(p: ModelParams, q0: Perturbation) -> tuple[float, float]:
    """Oscillation amplitudes (inflation, unemployment) for start ``q0``.

    amplitude_inflation    = sqrt(eps0^2 + (a*eta0/omega)^2)
    amplitude_unemployment = sqrt(eta0^2 + (omega*eps0/a)^2)

    Both are invariant when q0 is advanced along its own orbit.
    """
    w = natural_frequency(p)
    return (
        math.hypot(q0.eps, p.a * q0.eta / w),
        math.hypot(q0.eta, w * q0.eps / p.a),
    )


@dataclass(frozen=True)
class StabilityReport:
    """Bundle of spectral and cycle quantities for one parameter set.

    Amplitudes refer to the initial perturbation the report was built with
    (zero for the default equilibrium start).
    """

    eigenvalues: tuple[complex, complex]
    classification: Classification
    omega: float
    period: float
    phase_lag: float
    amplitude_inflation: float
    amplitude_unemployment: float

    def __post_init__(self) -> None:
        l1, l2 = self.eigenvalues
        if l2 != l1.conjugate():
            raise ValueError(f"eigenvalues must be complex conjugates, got {l1}, {l2}")
        for e in self.eigenvalues:
            if not (cmath.isfinite(e)):
                raise ValueError(f"eigenvalues must be finite, got {e!r}")


def stability_report(
    p: ModelParams,
    q0: Perturbation | None = None,
    re_tolerance: float = DEFAULT_RE_TOLERANCE,
) -> StabilityReport:
    """Full stability report for parameters ``p`` and optional start ``q0``."""
    q0 = q0 if q0 is not None else Perturbation(0.0, 0.0)
    eigs = eigenvalues(p)
    amp_i, amp_u = amplitudes(p, q0)
    return StabilityReport(
        eigenvalues=eigs,
        classification=classify_eigenvalues(eigs, re_tolerance),
        omega=natural_frequency(p),
        period=period(p),
        phase_lag=phase_lag(p),
        amplitude_inflation=amp_i,
        amplitude_unemployment=amp_u,
    )
