"""Core model types and the exact right-hand sides of the dynamics.

The model couples inflation ``I(t)`` (decimal rate per year) with
unemployment ``u(t)`` (dimensionless fraction):

    dI/dt = -a * (u - n)
    du/dt = (kappa / a) * (I - z) * (1 - u)

``n`` is the equilibrium unemployment and ``z`` the equilibrium inflation;
``(z, n)`` is the fixed point.  In the perturbation variables
``eps = I - z`` and ``eta = u - n`` the same system reads

    d(eps)/dt = -a * eta
    d(eta)/dt = (kappa / a) * eps * (1 - n - eta)

and its linearization drops the ``eps * eta`` product.  Time is measured
in years everywhere; rates and fractions are decimals (0.02 = 2%/year).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from nairu_cycles.simulate import Trajectory

__all__ = [
    "DomainError",
    "Jacobian2x2",
    "ModelParams",
    "Perturbation",
    "State",
    "StateDerivative",
    "from_perturbation",
    "jacobian",
    "linear_rhs",
    "nairu_rhs",
    "perturbation_rhs",
    "second_order_residuals",
    "to_perturbation",
    "validate_params",
]


class DomainError(ValueError):
    """A model quantity violates its domain constraints."""


@dataclass(frozen=True)
class ModelParams:
    """The four structural constants of the model.

    a      inflation response rate, 1/year^2: speed at which inflation
           accelerates per unit unemployment gap; must be > 0
    kappa  coupling constant, 1/year^2; must be > 0
    n      equilibrium unemployment, fraction strictly inside (0, 1)
    z      equilibrium inflation, decimal rate per year (any finite value;
           deflationary equilibria are allowed)

    Instances are validated on construction and are immutable.
    """

    a: float
    kappa: float
    n: float
    z: float

    def __post_init__(self) -> None:
        validate_params(self)


@dataclass(frozen=True)
class State:
    """Inflation and unemployment at one instant.

    ``unemployment`` must lie in [0, 1): at u = 1 the (1 - u) factor in the
    unemployment equation annihilates the dynamics, so it is excluded.
    """

    inflation: float
    unemployment: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.inflation):
            raise DomainError(f"inflation must be finite, got {self.inflation!r}")
        if not math.isfinite(self.unemployment) or not 0.0 <= self.unemployment < 1.0:
            raise DomainError(
                f"unemployment must lie in [0, 1), got {self.unemployment!r}"
            )


@dataclass(frozen=True)
class Perturbation:
    """Deviation (eps, eta) of (inflation, unemployment) from (z, n)."""

    eps: float
    eta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.eps) and math.isfinite(self.eta)):
            raise DomainError(f"perturbation components must be finite, got {self!r}")


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a State: d_inflation in 1/year^2, d_unemployment in 1/year."""

    d_inflation: float
    d_unemployment: float


@dataclass(frozen=True)
class Jacobian2x2:
    """Jacobian of the perturbation dynamics at the fixed point, row-major.

    For this model the diagonal entries are exactly zero:
    [[0, -a], [(kappa/a)*(1-n), 0]].
    """

    j00: float
    j01: float
    j10: float
    j11: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.j00, self.j01], [self.j10, self.j11]])


def validate_params(p: ModelParams) -> ModelParams:
    """Check all ModelParams invariants; return ``p`` unchanged if they hold.

    Raises DomainError naming the violated constraint.
    """
    for name in ("a", "kappa", "n", "z"):
        value = getattr(p, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise DomainError(f"{name} must be a finite number, got {value!r}")
    if not p.a > 0.0:
        raise DomainError(f"a must be > 0, got {p.a!r}")
    if not p.kappa > 0.0:
        raise DomainError(f"kappa must be > 0, got {p.kappa!r}")
    if not 0.0 < p.n < 1.0:
        raise DomainError(f"n must lie strictly inside (0, 1), got {p.n!r}")
    return p


def nairu_rhs(p: ModelParams, s: State) -> StateDerivative:
    """Right-hand side of the nonlinear system at state ``s``.

    d_inflation    = -a * (u - n)
    d_unemployment = (kappa / a) * (I - z) * (1 - u)
    """
    return StateDerivative(
        d_inflation=-p.a * (s.unemployment - p.n),
        d_unemployment=(p.kappa / p.a) * (s.inflation - p.z) * (1.0 - s.unemployment),
    )


def perturbation_rhs(p: ModelParams, q: Perturbation) -> tuple[float, float]:
    """Exact perturbation dynamics; identical to ``nairu_rhs`` after the
    change of variables eps = I - z, eta = u - n.

    Returns (d_eps, d_eta) = (-a * eta, (kappa / a) * eps * (1 - n - eta)).
    """
    if p.n + q.eta >= 1.0:
        raise DomainError(
            f"n + eta must stay below 1, got {p.n + q.eta!r}"
        )
    return (-p.a * q.eta, (p.kappa / p.a) * q.eps * (1.0 - p.n - q.eta))


def linear_rhs(p: ModelParams, q: Perturbation) -> tuple[float, float]:
    """Linearized perturbation dynamics: the eps*eta product is dropped.

    Returns (d_eps, d_eta) = (-a * eta, (kappa / a) * (1 - n) * eps).
    """
    return (-p.a * q.eta, (p.kappa / p.a) * (1.0 - p.n) * q.eps)


def jacobian(p: ModelParams) -> Jacobian2x2:
    """Jacobian of the perturbation dynamics at the fixed point."""
    return Jacobian2x2(0.0, -p.a, (p.kappa / p.a) * (1.0 - p.n), 0.0)


def to_perturbation(p: ModelParams, s: State) -> Perturbation:
    """Map a State to its deviation from the equilibrium (z, n)."""
    return Perturbation(eps=s.inflation - p.z, eta=s.unemployment - p.n)


def from_perturbation(p: ModelParams, q: Perturbation) -> State:
    """Map a Perturbation back to a State; exact inverse of ``to_perturbation``.

    Raises DomainError if the resulting unemployment n + eta leaves [0, 1).
    """
    u = p.n + q.eta
    if not 0.0 <= u < 1.0:
        raise DomainError(f"n + eta = {u!r} leaves the valid unemployment range [0, 1)")
    return State(inflation=p.z + q.eps, unemployment=u)


def second_order_residuals(
    p: ModelParams, traj: "Trajectory"
) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of the decoupled second-order forms along a trajectory.

    Differentiating the first-order perturbation system once more gives the
    equivalent second-order equations

        eps'' = -kappa * eps * (1 - n + eps'/a)
        eta'' = -kappa * eta * (1 - n - eta) - eta'^2 / (1 - n - eta)

    This evaluates, at every interior sample of ``traj``, the deviation of
    central finite-difference second derivatives of eps and eta from those
    right-hand sides (first derivatives also by central differences).  Small
    residuals certify that the trajectory is consistent with the decoupled
    forms; they shrink as O(dt^2) with the sampling step.

    Returns two arrays aligned with ``traj.times[1:-1]``.
    """
    t = np.asarray(traj.times, dtype=float)
    if t.size < 3:
        raise DomainError("trajectory must have at least 3 samples")
    dt = (t[-1] - t[0]) / (t.size - 1)
    if dt <= 0 or np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(dt, 1.0):
        raise DomainError("trajectory must be uniformly sampled")

    eps = np.asarray(traj.inflation, dtype=float) - p.z
    eta = np.asarray(traj.unemployment, dtype=float) - p.n
    denom = 1.0 - p.n - eta[1:-1]
    if np.any(denom == 0.0):
        raise DomainError("1 - n - eta vanishes along the trajectory")

    eps_mid, eta_mid = eps[1:-1], eta[1:-1]
    d_eps = (eps[2:] - eps[:-2]) / (2.0 * dt)
    d_eta = (eta[2:] - eta[:-2]) / (2.0 * dt)
    dd_eps = (eps[2:] - 2.0 * eps_mid + eps[:-2]) / (dt * dt)
    dd_eta = (eta[2:] - 2.0 * eta_mid + eta[:-2]) / (dt * dt)

    rhs_eps = -p.kappa * eps_mid * (1.0 - p.n + d_eps / p.a)
    rhs_eta = -p.kappa * eta_mid * denom - d_eta * d_eta / denom
    return dd_eps - rhs_eps, dd_eta - rhs_eta
