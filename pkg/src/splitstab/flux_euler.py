"""Compressible Euler physics and two-point fluxes (perfect gas, gamma = 1.4).

States are arrays whose last axis holds the 2D conserved variables
``(rho, rho v1, rho v2, rho E)``. One-dimensional states are 2D states with
``v2 = 0``. Every flux takes ``direction`` 0 (x) or 1 (y) and broadcasts over
the leading axes.

Complex input is accepted so that Jacobians can be taken by the complex-step
method: branch decisions look at real parts only, and ``|x|`` is written as
``x sign(Re x)``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

__all__ = [
    "GAMMA",
    "EulerFlux",
    "InadmissibleStateError",
    "primitive_from_state",
    "state_from_primitive",
    "pressure",
    "sound_speed",
    "is_admissible",
    "check_admissible",
    "physical_flux",
    "entropy",
    "entropy_flux",
    "entropy_variables",
    "entropy_potential",
    "log_mean",
    "flux_central_euler",
    "flux_chandrashekar_ec",
    "flux_kennedy_gruber",
    "flux_rusanov_euler",
    "get_flux",
    "max_wave_speed",
    "mass_dissipation_coefficient_ec",
    "ec_condition_residual",
]

GAMMA = 1.4
_LOGMEAN_SERIES_THRESHOLD = 1e-4


def _as_array(x):
    x = np.asarray(x)
    return x if np.iscomplexobj(x) else x.astype(float, copy=False)


def _abs(x):
    return x * np.sign(np.real(x))


def _max(a, b):
    return np.where(np.real(a) >= np.real(b), a, b)


class EulerFlux(str, Enum):
    CENTRAL = "euler-central"
    EC_CHANDRASHEKAR = "euler-ec-chandrashekar"
    KENNEDY_GRUBER = "euler-kg"
    RUSANOV = "euler-rusanov"


class InadmissibleStateError(ValueError):
    """Raised when a state has nonpositive density or pressure."""

    def __init__(self, message: str, index=None, variable: str | None = None):
        super().__init__(message)
        self.index = index
        self.variable = variable


def pressure(u):
    u = _as_array(u)
    rho = u[..., 0]
    kinetic = 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / rho
    return (GAMMA - 1.0) * (u[..., 3] - kinetic)


def primitive_from_state(u):
    """Return ``(rho, v1, v2, p)`` as separate arrays."""
    u = _as_array(u)
    rho = u[..., 0]
    v1 = u[..., 1] / rho
    v2 = u[..., 2] / rho
    p = (GAMMA - 1.0) * (u[..., 3] - 0.5 * rho * (v1 * v1 + v2 * v2))
    return rho, v1, v2, p


def state_from_primitive(rho, v1, v2, p):
    rho, v1, v2, p = np.broadcast_arrays(*(_as_array(a) for a in (rho, v1, v2, p)))
    energy = p / (GAMMA - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2)
    return np.stack([rho, rho * v1, rho * v2, energy], axis=-1)


def sound_speed(u):
    rho, _, _, p = primitive_from_state(u)
    return np.sqrt(GAMMA * p / rho)


def is_admissible(u) -> bool:
    rho, _, _, p = primitive_from_state(u)
    return bool(np.all(np.real(rho) > 0.0) and np.all(np.real(p) > 0.0))


def check_admissible(u) -> None:
    """Raise :class:`InadmissibleStateError` on the first bad entry."""
    u = _as_array(u)
    rho = np.real(u[..., 0])
    bad = ~(rho > 0.0)
    if np.any(bad):
        idx = np.unravel_index(np.argmax(bad), rho.shape)
        raise InadmissibleStateError(f"nonpositive density at {idx}", idx, "density")
    p = np.real(pressure(u))
    bad = ~(p > 0.0)
    if np.any(bad):
        idx = np.unravel_index(np.argmax(bad), p.shape)
        raise InadmissibleStateError(f"nonpositive pressure at {idx}", idx, "pressure")


def _check_direction(direction: int) -> int:
    if direction not in (0, 1):
        raise ValueError(f"direction must be 0 or 1, got {direction}")
    return direction


def _flux_from_primitive(rho, v1, v2, p, energy, direction):
    vn = v1 if direction == 0 else v2
    mass = rho * vn
    f = np.stack([mass, mass * v1, mass * v2, (energy + p) * vn], axis=-1)
    f[..., 1 + direction] += p
    return f


def physical_flux(u, direction: int = 0):
    _check_direction(direction)
    u = _as_array(u)
    check_admissible(u)
    rho, v1, v2, p = primitive_from_state(u)
    return _flux_from_primitive(rho, v1, v2, p, u[..., 3], direction)


# entropy algebra -----------------------------------------------------------


def _specific_entropy(rho, p):
    return np.log(p) - GAMMA * np.log(rho)


def entropy(u):
    rho, _, _, p = primitive_from_state(u)
    return -rho * _specific_entropy(rho, p) / (GAMMA - 1.0)


def entropy_flux(u, direction: int = 0):
    rho, v1, v2, p = primitive_from_state(u)
    vn = (v1, v2)[_check_direction(direction)]
    return -rho * vn * _specific_entropy(rho, p) / (GAMMA - 1.0)


def entropy_variables(u):
    rho, v1, v2, p = primitive_from_state(u)
    s = _specific_entropy(rho, p)
    beta = rho / p
    return np.stack(
        [
            (GAMMA - s) / (GAMMA - 1.0) - 0.5 * beta * (v1 * v1 + v2 * v2),
            beta * v1,
            beta * v2,
            -beta,
        ],
        axis=-1,
    )


def entropy_potential(u, direction: int = 0):
    u = _as_array(u)
    return u[..., 1 + _check_direction(direction)]


# two-point fluxes ----------------------------------------------------------


def log_mean(a, b):
    """Logarithmic mean ``(b - a) / (ln b - ln a)``, stable for ``a ~ b``.

    Uses ``ln(b/a) = 2 f (1 + u/3 + u^2/5 + u^3/7 + ...)`` with
    ``f = (b - a)/(b + a)`` and ``u = f^2``; the four-term series replaces
    the quotient when ``u < 1e-4``.
    """
    a = _as_array(a)
    b = _as_array(b)
    if np.any(~(np.real(a) > 0.0)) or np.any(~(np.real(b) > 0.0)):
        raise ValueError("logarithmic mean needs positive arguments")
    f = (b - a) / (b + a)
    u = f * f
    small = np.real(u) < _LOGMEAN_SERIES_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (b - a) / (np.log(b) - np.log(a))
    series = 0.5 * (a + b) / (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0)))
    return np.where(small, series, direct)[()]


def flux_central_euler(ul, ur, direction: int = 0):
    return 0.5 * (physical_flux(ul, direction) + physical_flux(ur, direction))


def flux_chandrashekar_ec(ul, ur, direction: int = 0):
    """Kinetic-energy preserving and entropy-conserving flux of Chandrashekar."""
    _check_direction(direction)
    ul = _as_array(ul)
    ur = _as_array(ur)
    check_admissible(ul)
    check_admissible(ur)
    rl, v1l, v2l, pl = primitive_from_state(ul)
    rr, v1r, v2r, pr = primitive_from_state(ur)
    beta_l, beta_r = rl / pl, rr / pr

    rho_ln = log_mean(rl, rr)
    beta_ln = log_mean(beta_l, beta_r)
    v1_avg = 0.5 * (v1l + v1r)
    v2_avg = 0.5 * (v2l + v2r)
    p_hat = 0.5 * (rl + rr) / (0.5 * (beta_l + beta_r))
    vsq_avg = 0.5 * (v1l * v1l + v2l * v2l + v1r * v1r + v2r * v2r)
    h_hat = (
        1.0 / (beta_ln * (GAMMA - 1.0))
        + v1_avg * v1_avg
        + v2_avg * v2_avg
        - 0.5 * vsq_avg
        + p_hat / rho_ln
    )
    vn = v1_avg if direction == 0 else v2_avg
    mass = rho_ln * vn
    f = np.stack([mass, mass * v1_avg, mass * v2_avg, mass * h_hat], axis=-1)
    f[..., 1 + direction] += p_hat
    return f


def flux_kennedy_gruber(ul, ur, direction: int = 0):
    """Kennedy-Gruber split flux from arithmetic means of rho, v, p and E."""
    _check_direction(direction)
    ul = _as_array(ul)
    ur = _as_array(ur)
    check_admissible(ul)
    check_admissible(ur)
    rl, v1l, v2l, pl = primitive_from_state(ul)
    rr, v1r, v2r, pr = primitive_from_state(ur)
    rho_avg = 0.5 * (rl + rr)
    v1_avg = 0.5 * (v1l + v1r)
    v2_avg = 0.5 * (v2l + v2r)
    p_avg = 0.5 * (pl + pr)
    e_avg = 0.5 * (ul[..., 3] / rl + ur[..., 3] / rr)
    vn = v1_avg if direction == 0 else v2_avg
    mass = rho_avg * vn
    f = np.stack(
        [mass, mass * v1_avg, mass * v2_avg, (rho_avg * e_avg + p_avg) * vn],
        axis=-1,
    )
    f[..., 1 + direction] += p_avg
    return f


def max_wave_speed(u, direction: int = 0):
    """``|v_n| + c`` per state."""
    rho, v1, v2, p = primitive_from_state(u)
    vn = (v1, v2)[_check_direction(direction)]
    return _abs(vn) + np.sqrt(GAMMA * p / rho)


def flux_rusanov_euler(ul, ur, direction: int = 0):
    ul = _as_array(ul)
    ur = _as_array(ur)
    lam = _max(max_wave_speed(ul, direction), max_wave_speed(ur, direction))
    return flux_central_euler(ul, ur, direction) - 0.5 * lam[..., None] * (ur - ul)


_FLUXES = {
    EulerFlux.CENTRAL: flux_central_euler,
    EulerFlux.EC_CHANDRASHEKAR: flux_chandrashekar_ec,
    EulerFlux.KENNEDY_GRUBER: flux_kennedy_gruber,
    EulerFlux.RUSANOV: flux_rusanov_euler,
}


def get_flux(flux_id):
    return _FLUXES[EulerFlux(flux_id)]


def mass_dissipation_coefficient_ec(ul, ur, direction: int = 0):
    """Dissipation coefficient of the EC mass flux relative to the central one.

    ``R = ({rho} - rho_ln) 2{v}/(rhoR - rhoL) + (vR - vL)/2``; the first
    quotient is evaluated through the log-mean series so coincident
    densities give the analytic limit.
    """
    rl, v1l, v2l, _ = primitive_from_state(ul)
    rr, v1r, v2r, _ = primitive_from_state(ur)
    vl, vr = ((v1l, v1r), (v2l, v2r))[_check_direction(direction)]
    f = (rr - rl) / (rr + rl)
    u = f * f
    small = u < _LOGMEAN_SERIES_THRESHOLD
    series = 1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(rr) - np.log(rl)
        big = np.where(small, 1.0, log_ratio / (2.0 * f))
        # ({rho} - rho_ln)/(rhoR - rhoL) = (F - 1)/(2 f F), F = ln(rR/rL)/(2f)
        g_direct = (big - 1.0) / (2.0 * f * big)
    g_series = f * (1.0 / 3.0 + u * (1.0 / 5.0 + u * (1.0 / 7.0 + u / 9.0))) / (2.0 * series)
    g = np.where(small, g_series, g_direct)
    v_avg = 0.5 * (vl + vr)
    return (2.0 * v_avg * g + 0.5 * (vr - vl))[()]


def ec_condition_residual(flux, ul, ur, direction: int = 0):
    """Entropy production ``(wR - wL).f - (PsiR - PsiL)`` of a two-point flux."""
    if not callable(flux):
        flux = get_flux(flux)
    f = flux(ul, ur, direction)
    dw = entropy_variables(ur) - entropy_variables(ul)
    return np.sum(dw * f, axis=-1) - (
        entropy_potential(ur, direction) - entropy_potential(ul, direction)
    )
