"""Deterministic fixed-step integration of the cycle dynamics.

Classical 4th-order Runge-Kutta with a fixed step: the oscillation is
marginally stable, so a low-dissipation scheme is needed, and a fixed step
keeps runs bitwise reproducible.  Conserved first integrals (one for the
nonlinear system, one for the linearized one) are provided to monitor
integrator drift on the closed orbits.

Shocks model outside interventions (for instance an interest-rate move) as
changed state at a step boundary; parameters are never altered by a shock.
Multi-industry ensembles integrate each industry independently and
aggregate by a weighted arithmetic mean, with the companion parameter
averaging rule (arithmetic means of a and kappa/a, not of kappa).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np

from nairu_cycles.model import DomainError, ModelParams, Perturbation, State

__all__ = [
    "Dynamics",
    "EnsembleResult",
    "Industry",
    "IntegrationAbortError",
    "Scenario",
    "Shock",
    "Trajectory",
    "averaged_params",
    "conserved_quantity",
    "conserved_series",
    "integrate",
    "run_ensemble",
]


class Dynamics(str, Enum):
    NONLINEAR = "nonlinear"
    LINEARIZED = "linearized"


class IntegrationAbortError(DomainError):
    """The integrated state left the valid domain; carries the abort time."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class Shock:
    """State intervention applied at one step boundary.

    Set-values replace the corresponding component, then the add-offsets are
    applied.  The post-shock state must be a valid State.
    """

    time: float
    set_inflation: float | None = None
    set_unemployment: float | None = None
    add_inflation: float = 0.0
    add_unemployment: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.time) or self.time < 0.0:
            raise DomainError(f"shock time must be finite and >= 0, got {self.time!r}")
        for name in ("set_inflation", "set_unemployment"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise DomainError(f"shock {name} must be finite, got {value!r}")
        if self.set_unemployment is not None and not 0.0 <= self.set_unemployment < 1.0:
            raise DomainError(
                f"shock set_unemployment must lie in [0, 1), got {self.set_unemployment!r}"
            )
        for name in ("add_inflation", "add_unemployment"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"shock {name} must be finite")

    def apply(self, inflation: float, unemployment: float) -> tuple[float, float]:
        if self.set_inflation is not None:
            inflation = self.set_inflation
        if self.set_unemployment is not None:
            unemployment = self.set_unemployment
        return inflation + self.add_inflation, unemployment + self.add_unemployment


@dataclass(frozen=True)
class Scenario:
    """One simulation setup: parameters, start state, grid, and shocks.

    The horizon is snapped to a whole number of steps; shock times snap to
    the nearest step boundary.  ``record_every`` thins the output to every
    k-th step (the start and the snapped horizon are always on the grid).
    """

    params: ModelParams
    initial: State
    horizon: float = 20.0
    dt: float = 0.01
    dynamics: Dynamics = Dynamics.NONLINEAR
    shocks: tuple[Shock, ...] = ()
    record_every: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise DomainError(f"horizon must be positive, got {self.horizon!r}")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if self.dt > self.horizon:
            raise DomainError(f"dt = {self.dt!r} exceeds horizon = {self.horizon!r}")
        if not isinstance(self.record_every, int) or self.record_every < 1:
            raise DomainError(
                f"record_every must be a positive integer, got {self.record_every!r}"
            )
        if not isinstance(self.dynamics, Dynamics):
            raise DomainError(f"unknown dynamics {self.dynamics!r}")
        shocks = tuple(sorted(self.shocks, key=lambda s: s.time))
        for shock in shocks:
            if shock.time > self.horizon:
                raise DomainError(
                    f"shock at t = {shock.time!r} falls outside [0, horizon]"
                )
        object.__setattr__(self, "shocks", shocks)

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled output of one integration.

    ``params`` and ``dynamics`` are None for trajectories re-read from disk,
    where only the sampled series are known.
    """

    times: np.ndarray
    inflation: np.ndarray
    unemployment: np.ndarray
    dynamics: Dynamics | None = None
    params: ModelParams | None = None

    def __post_init__(self) -> None:
        if not (len(self.times) == len(self.inflation) == len(self.unemployment)):
            raise ValueError("times, inflation and unemployment must align")
        if len(self.times) >= 2 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def sample_dt(self) -> float:
        if len(self.times) < 2:
            raise ValueError("trajectory has fewer than 2 samples")
        return float((self.times[-1] - self.times[0]) / (len(self.times) - 1))

    @property
    def eps(self) -> np.ndarray:
        if self.params is None:
            raise ValueError("trajectory carries no params")
        return self.inflation - self.params.z

    @property
    def eta(self) -> np.ndarray:
        if self.params is None:
            raise ValueError("trajectory carries no params")
        return self.unemployment - self.params.n

    def state_at(self, i: int) -> State:
        return State(float(self.inflation[i]), float(self.unemployment[i]))


def integrate(sc: Scenario) -> Trajectory:
    """Integrate a scenario with classical fixed-step RK4.

    Shocks are applied at their (snapped) step boundary before that step
    executes, and before the boundary sample is recorded.  Raises
    IntegrationAbortError (reporting the time) if the state leaves
    0 <= u < 1 or stops being finite; a shock whose result is invalid is a
    plain DomainError.  Bitwise deterministic for identical scenarios.
    """
    p = sc.params
    dt = sc.dt
    n_steps = sc.n_steps
    a, n, z = p.a, p.n, p.z
    ratio = p.kappa / p.a
    lin_coef = ratio * (1.0 - n)
    linear = sc.dynamics is Dynamics.LINEARIZED

    shocks_at: dict[int, list[Shock]] = {}
    for shock in sc.shocks:
        k = min(int(round(shock.time / dt)), n_steps)
        shocks_at.setdefault(k, []).append(shock)

    inflation = sc.initial.inflation
    unemployment = sc.initial.unemployment
    rec_t: list[float] = []
    rec_i: list[float] = []
    rec_u: list[float] = []

    for k in range(n_steps + 1):
        if k in shocks_at:
            for shock in shocks_at[k]:
                inflation, unemployment = shock.apply(inflation, unemployment)
            if not (
                math.isfinite(inflation)
                and math.isfinite(unemployment)
                and 0.0 <= unemployment < 1.0
            ):
                raise DomainError(
                    f"shock at t = {k * dt:.6g} produced invalid state "
                    f"(inflation={inflation!r}, unemployment={unemployment!r})"
                )
        if k % sc.record_every == 0:
            rec_t.append(k * dt)
            rec_i.append(inflation)
            rec_u.append(unemployment)
        if k == n_steps:
            break

        i0, u0 = inflation, unemployment
        if linear:
            k1i = -a * (u0 - n)
            k1u = lin_coef * (i0 - z)
            i1, u1 = i0 + 0.5 * dt * k1i, u0 + 0.5 * dt * k1u
            k2i = -a * (u1 - n)
            k2u = lin_coef * (i1 - z)
            i2, u2 = i0 + 0.5 * dt * k2i, u0 + 0.5 * dt * k2u
            k3i = -a * (u2 - n)
            k3u = lin_coef * (i2 - z)
            i3, u3 = i0 + dt * k3i, u0 + dt * k3u
            k4i = -a * (u3 - n)
            k4u = lin_coef * (i3 - z)
        else:
            k1i = -a * (u0 - n)
            k1u = ratio * (i0 - z) * (1.0 - u0)
            i1, u1 = i0 + 0.5 * dt * k1i, u0 + 0.5 * dt * k1u
            k2i = -a * (u1 - n)
            k2u = ratio * (i1 - z) * (1.0 - u1)
            i2, u2 = i0 + 0.5 * dt * k2i, u0 + 0.5 * dt * k2u
            k3i = -a * (u2 - n)
            k3u = ratio * (i2 - z) * (1.0 - u2)
            i3, u3 = i0 + dt * k3i, u0 + dt * k3u
            k4i = -a * (u3 - n)
            k4u = ratio * (i3 - z) * (1.0 - u3)

        inflation = i0 + dt * (k1i + 2.0 * (k2i + k3i) + k4i) / 6.0
        unemployment = u0 + dt * (k1u + 2.0 * (k2u + k3u) + k4u) / 6.0
        if not (
            math.isfinite(inflation)
            and math.isfinite(unemployment)
            and 0.0 <= unemployment < 1.0
        ):
            raise IntegrationAbortError(
                f"integration aborted at t = {(k + 1) * dt:.6g} years: "
                f"state left the valid domain "
                f"(inflation={inflation!r}, unemployment={unemployment!r})",
                time=(k + 1) * dt,
            )

    return Trajectory(
        times=np.array(rec_t),
        inflation=np.array(rec_i),
        unemployment=np.array(rec_u),
        dynamics=sc.dynamics,
        params=p,
    )


def _conserved_values(
    p: ModelParams,
    inflation: Union[float, np.ndarray],
    unemployment: Union[float, np.ndarray],
    dynamics: Dynamics,
) -> Union[float, np.ndarray]:
    if np.any(np.asarray(unemployment) >= 1.0):
        raise DomainError("conserved quantity undefined for unemployment >= 1")
    if dynamics is Dynamics.NONLINEAR:
        # Separation of variables on dI/du gives the first integral
        #   H = (kappa/(2a)) (I-z)^2 + a (-u - (1-n) ln(1-u)),
        # shifted so H(z, n) = 0; dH/dt = 0 along exact solutions.
        def well(u):
            return -u - (1.0 - p.n) * np.log(1.0 - u)

        return (p.kappa / (2.0 * p.a)) * (inflation - p.z) ** 2 + p.a * (
            well(unemployment) - well(p.n)
        )
    if dynamics is Dynamics.LINEARIZED:
        eps = inflation - p.z
        eta = unemployment - p.n
        return p.kappa * (1.0 - p.n) * eps * eps / (p.a * p.a) + eta * eta
    raise DomainError(f"unknown dynamics {dynamics!r}")


def conserved_quantity(p: ModelParams, s: State, dynamics: Dynamics) -> float:
    """First integral of the chosen dynamics at state ``s``, zero at (z, n).

    Constant along exact solutions; its drift along a numerical trajectory
    measures integrator error.
    """
    return float(_conserved_values(p, s.inflation, s.unemployment, dynamics))


def conserved_series(
    traj: Trajectory,
    params: ModelParams | None = None,
    dynamics: Dynamics | None = None,
) -> np.ndarray:
    """Conserved quantity evaluated at every sample of ``traj``."""
    p = params if params is not None else traj.params
    dyn = dynamics if dynamics is not None else traj.dynamics
    if p is None or dyn is None:
        raise ValueError("params and dynamics required (trajectory carries none)")
    return np.asarray(_conserved_values(p, traj.inflation, traj.unemployment, dyn))


@dataclass(frozen=True)
class Industry:
    """One industry's parameter set and aggregation weight."""

    label: str
    params: ModelParams
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.weight) and self.weight > 0.0):
            raise DomainError(f"industry weight must be > 0, got {self.weight!r}")


@dataclass(frozen=True)
class EnsembleResult:
    per_industry: tuple[Trajectory, ...]
    aggregate: Trajectory


def averaged_params(industries: Sequence[Industry]) -> ModelParams:
    """Economy-wide parameters from industry ones.

    Arithmetic (weighted) means are taken for a and for the ratio kappa/a,
    and kappa is rebuilt as their product -- averaging kappa itself would
    give a different, inconsistent constant.  n and z are averaged directly.
    """
    if not industries:
        raise DomainError("industry list is empty")
    w = np.array([ind.weight for ind in industries])
    total = float(w.sum())

    def mean(values: list[float]) -> float:
        return float(np.dot(w, values) / total)

    a_bar = mean([ind.params.a for ind in industries])
    ratio_bar = mean([ind.params.kappa / ind.params.a for ind in industries])
    return ModelParams(
        a=a_bar,
        kappa=a_bar * ratio_bar,
        n=mean([ind.params.n for ind in industries]),
        z=mean([ind.params.z for ind in industries]),
    )


def run_ensemble(
    industries: Sequence[Industry],
    initial: State,
    horizon: float,
    dt: float,
    record_every: int = 1,
    initials: Sequence[State] | None = None,
) -> EnsembleResult:
    """Integrate each industry independently (nonlinear dynamics) and
    aggregate by the weight-normalized arithmetic mean at each sample.

    All industries share ``initial`` unless per-industry ``initials`` are
    given.  The aggregate trajectory carries the averaged parameters.
    A failing industry's error is re-raised with its label attached.
    """
    if not industries:
        raise DomainError("industry list is empty")
    if initials is not None and len(initials) != len(industries):
        raise DomainError("initials must match industries one to one")

    trajectories: list[Trajectory] = []
    for idx, ind in enumerate(industries):
        start = initials[idx] if initials is not None else initial
        scenario = Scenario(
            params=ind.params,
            initial=start,
            horizon=horizon,
            dt=dt,
            record_every=record_every,
        )
        try:
            trajectories.append(integrate(scenario))
        except IntegrationAbortError as exc:
            raise IntegrationAbortError(
                f"industry {ind.label!r}: {exc}", time=exc.time
            ) from exc
        except DomainError as exc:
            raise DomainError(f"industry {ind.label!r}: {exc}") from exc

    w = np.array([ind.weight for ind in industries])
    total = float(w.sum())
    stack_i = np.stack([t.inflation for t in trajectories])
    stack_u = np.stack([t.unemployment for t in trajectories])
    aggregate = Trajectory(
        times=trajectories[0].times.copy(),
        inflation=w @ stack_i / total,
        unemployment=w @ stack_u / total,
        dynamics=Dynamics.NONLINEAR,
        params=averaged_params(industries),
    )
    return EnsembleResult(per_industry=tuple(trajectories), aggregate=aggregate)
