"""Explicit Runge-Kutta integrators and the CFL time step controller."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .flux_euler import InadmissibleStateError

logger = logging.getLogger(__name__)

__all__ = [
    "LSRK54_A",
    "LSRK54_B",
    "LSRK54_C",
    "step_ssprk3",
    "step_lsrk54",
    "INTEGRATORS",
    "TimeStepController",
    "compute_dt",
    "burgers_wave_speed",
    "IntegrationFailure",
    "IntegrationResult",
    "integrate",
]

# Carpenter-Kennedy five-stage fourth-order 2N-storage coefficients
LSRK54_A = np.array(
    [
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    ]
)
LSRK54_B = np.array(
    [
        1432997174477.0 / 9575080441755.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    ]
)
LSRK54_C = np.array(
    [
        0.0,
        1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363962896.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    ]
)


def step_ssprk3(rhs: Callable, u, dt: float):
    """One step of the three-stage SSP Runge-Kutta scheme (Shu-Osher form)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    u = np.asarray(u)
    u1 = u + dt * rhs(u)
    u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1))
    return u / 3.0 + (2.0 / 3.0) * (u2 + dt * rhs(u2))


def step_lsrk54(rhs: Callable, u, dt: float):
    """One step of the five-stage fourth-order low-storage scheme.

    Two registers: ``du <- A_k du + dt L(u)``, ``u <- u + B_k du``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    u = np.array(u, copy=True)
    du = np.zeros_like(u)
    for a, b in zip(LSRK54_A, LSRK54_B):
        du *= a
        du += dt * rhs(u)
        u += b * du
    return u


INTEGRATORS = {"ssprk3": step_ssprk3, "lsrk54": step_lsrk54}


def burgers_wave_speed(u) -> float:
    return float(np.max(np.abs(u)))


@dataclass
class TimeStepController:
    """``dt = cfl h / ((N + 1) lambda_max)``.

    ``wave_speed`` maps a field to ``lambda_max``; ``fallback_dt`` is used
    when it returns zero (a field at rest).
    """

    h: float
    degree: int
    wave_speed: Callable = burgers_wave_speed
    cfl: float = 0.05
    fallback_dt: float | None = None

    def __post_init__(self):
        if not self.cfl > 0:
            raise ValueError("CFL number must be positive")
        if not self.h > 0:
            raise ValueError("element size must be positive")


def compute_dt(u, controller: TimeStepController) -> float:
    lam = float(controller.wave_speed(u))
    if not np.isfinite(lam):
        raise FloatingPointError("non-finite wave speed")
    if lam <= 0.0:
        if controller.fallback_dt is None:
            raise ValueError("zero wave speed and no fallback time step configured")
        return controller.fallback_dt
    return controller.cfl * controller.h / ((controller.degree + 1) * lam)


@dataclass
class IntegrationFailure:
    """Why a run stopped early: an inadmissible state or a non-finite field."""

    time: float
    step: int
    kind: str
    error: Exception | None = None


@dataclass
class IntegrationResult:
    u: np.ndarray
    t: float
    n_steps: int
    failure: IntegrationFailure | None = None

    @property
    def completed(self) -> bool:
        return self.failure is None


def integrate(
    rhs: Callable,
    u0,
    t_end: float,
    controller: TimeStepController,
    integrator: str = "ssprk3",
    callback: Callable | None = None,
    t0: float = 0.0,
    max_steps: int | None = None,
) -> IntegrationResult:
    """Advance ``u0`` to ``t_end``; the last step is shortened to land on it.

    ``callback(t, u)`` is called after every accepted step. An
    :class:`InadmissibleStateError` raised by ``rhs`` or a non-finite field
    ends the run; the result then holds the last accepted state and a
    :class:`IntegrationFailure` stamped with the time of the failed step.
    """
    if not t_end > t0:
        raise ValueError("t_end must exceed the start time")
    try:
        step = INTEGRATORS[integrator]
    except KeyError:
        raise ValueError(f"unknown integrator {integrator!r}, choose from {sorted(INTEGRATORS)}") from None

    u = np.array(u0, dtype=float)
    t, n = t0, 0
    # stop short of t_end by a relative sliver to avoid a zero-length step
    t_stop = t_end - 1e-12 * max(1.0, abs(t_end))
    while t < t_stop:
        if max_steps is not None and n >= max_steps:
            break
        try:
            dt = min(compute_dt(u, controller), t_end - t)
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                u_new = step(rhs, u, dt)
        except InadmissibleStateError as exc:
            return IntegrationResult(u, t, n, IntegrationFailure(t, n, "inadmissible", exc))
        except FloatingPointError as exc:
            return IntegrationResult(u, t, n, IntegrationFailure(t, n, "non-finite", exc))
        if not np.all(np.isfinite(u_new)):
            return IntegrationResult(u, t, n, IntegrationFailure(t + dt, n, "non-finite"))
        u = u_new
        t += dt
        n += 1
        if callback is not None:
            callback(t, u)
    return IntegrationResult(u, t, n)
