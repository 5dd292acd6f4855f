"""Split-form DGSEM and finite-volume discretizations of Burgers' equation.

On each element of a periodic uniform mesh the nodal DGSEM update is::

    (h/2) du/dt = -alpha/2 D (u*u) - (1 - alpha) u * (D u)
                  - M^{-1} B (f* - u*u/2)

with ``f*`` holding the numerical surface flux at the two element faces.
``alpha = 2/3`` together with the EC surface flux conserves ``sum M u^2/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import flux_burgers as fb
from .sbp import Mesh1D, SbpOperatorSet

__all__ = [
    "BurgersSchemeConfig",
    "BurgersField",
    "rhs_dgsem",
    "rhs_fv",
    "make_dgsem_rhs",
    "make_inhomogeneous_rhs",
    "discrete_entropy",
    "discrete_l2_norm",
    "entropy_rate",
]


@dataclass(frozen=True)
class BurgersSchemeConfig:
    """Scheme choice for the Burgers DGSEM.

    ``volume_mod = "carpenter"`` blends the split-form and divergence-form
    sub-cell fluxes so that every sub-cell interface dissipates entropy.
    """

    alpha: float = 1.0
    surface_flux: str = "central"
    surface_alpha: float | None = None
    volume_mod: str | None = None
    mode: str = "dgsem"
    carpenter_c: float = 1e-12

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha={self.alpha} outside [0, 1]")
        fb.BurgersFlux(self.surface_flux)
        if self.volume_mod not in (None, "carpenter"):
            raise ValueError(f"unknown volume modification {self.volume_mod!r}")
        if self.mode not in ("dgsem", "fv"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def is_entropy_conserving(self) -> bool:
        return (
            abs(self.alpha - 2.0 / 3.0) < 1e-14
            and self.surface_flux == fb.BurgersFlux.EC.value
            and self.volume_mod is None
        )

    def surface(self):
        alpha = self.alpha if self.surface_alpha is None else self.surface_alpha
        return fb.get_flux(self.surface_flux, alpha)


@dataclass
class BurgersField:
    mesh: Mesh1D
    ops: SbpOperatorSet
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.mesh.n_elements, self.ops.n_nodes)
        if self.values.shape != expected:
            raise ValueError(f"field shape {self.values.shape} != {expected}")

    @property
    def x(self) -> np.ndarray:
        return self.mesh.node_coordinates(self.ops.nodes)


def _split_volume(u: np.ndarray, d: np.ndarray, alpha: float) -> np.ndarray:
    vol = 0.5 * alpha * ((u * u) @ d.T)
    if alpha != 1.0:
        vol += (1.0 - alpha) * u * (u @ d.T)
    return vol


def _carpenter_volume(u, ops: SbpOperatorSet, alpha: float, c: float) -> np.ndarray:
    """Entropy-dissipative blend of split-form and divergence-form volume terms.

    Both volume terms are rewritten as differences of sub-cell fluxes
    ``fbar`` (telescoping form, ``M vol = fbar_i - fbar_{i-1}``). At every
    interior sub-cell interface the blend ``fbar_C + delta (fbar_S - fbar_C)``
    with ``delta = (sqrt(b^2 + c^2) - b)/sqrt(b^2 + c^2)`` and
    ``b = (u_{i+1} - u_i)(fbar_S - fbar_C)`` never produces entropy.
    """
    w = ops.weights
    f_end = 0.5 * u[:, :1] ** 2
    fbar_s = f_end + np.cumsum(w * _split_volume(u, ops.diff, alpha), axis=1)[:, :-1]
    fbar_c = f_end + np.cumsum(w * _split_volume(u, ops.diff, 1.0), axis=1)[:, :-1]
    b = np.diff(u, axis=1) * (fbar_s - fbar_c)
    root = np.sqrt(b * b + c * c)
    delta = (root - b) / root
    fbar = fbar_c + delta * (fbar_s - fbar_c)
    full = np.concatenate([f_end, fbar, 0.5 * u[:, -1:] ** 2], axis=1)
    return np.diff(full, axis=1) / w


def surface_fluxes(u: np.ndarray, flux) -> np.ndarray:
    """Interface fluxes; entry ``k`` is the face between elements ``k-1`` and ``k``."""
    right = u[:, -1]
    return flux(np.concatenate((right[-1:], right[:-1])), u[:, 0])


def rhs_dgsem(u, config: BurgersSchemeConfig, ops: SbpOperatorSet, mesh: Mesh1D) -> np.ndarray:
    """Semidiscrete time derivative of the nodal field ``u`` (shape ``(K, N+1)``).

    Complex input is kept complex so the Jacobian can be taken by complex
    step; that is exact for the polynomial fluxes (central, alpha-split, EC).
    """
    u = np.asarray(u)
    if not np.iscomplexobj(u):
        u = u.astype(float, copy=False)
    if u.shape != (mesh.n_elements, ops.n_nodes):
        raise ValueError(f"field shape {u.shape} does not match mesh/operators")
    if config.volume_mod == "carpenter":
        vol = _carpenter_volume(u, ops, config.alpha, config.carpenter_c)
    else:
        vol = _split_volume(u, ops.diff, config.alpha)

    fstar = surface_fluxes(u, config.surface())
    rhs = -vol
    w = ops.weights
    rhs[:, 0] += (fstar - 0.5 * u[:, 0] ** 2) / w[0]
    rhs[:, -1] -= (np.concatenate((fstar[1:], fstar[:1])) - 0.5 * u[:, -1] ** 2) / w[-1]
    return rhs / mesh.jacobian


def make_dgsem_rhs(config: BurgersSchemeConfig, ops: SbpOperatorSet, mesh: Mesh1D):
    """Close over the scheme; the returned callable maps fields to fields."""

    def rhs(u):
        return rhs_dgsem(u, config, ops, mesh)

    return rhs


def rhs_fv(u, flux, h: float, alpha: float | None = None) -> np.ndarray:
    """First-order periodic finite-volume update ``-(f_{i+1/2} - f_{i-1/2})/h``."""
    u = np.asarray(u, dtype=float)
    if not callable(flux):
        flux = fb.get_flux(flux, alpha)
    f_right = flux(u, np.roll(u, -1))
    return -(f_right - np.roll(f_right, 1)) / h


def make_inhomogeneous_rhs(rhs, baseflow):
    """Return ``u -> rhs(u) - rhs(baseflow)`` with the baseflow residual cached.

    The baseflow is then a steady state of the returned operator.
    """
    baseflow = np.array(baseflow, dtype=float)
    source = -np.asarray(rhs(baseflow), dtype=float)

    def inhomogeneous(u):
        return rhs(u) + source

    inhomogeneous.source = source
    inhomogeneous.baseflow = baseflow
    return inhomogeneous


def discrete_l2_norm(u, ops: SbpOperatorSet, mesh: Mesh1D) -> float:
    """Quadrature norm ``sqrt(sum (h/2) w_i u_i^2)``."""
    u = np.asarray(u, dtype=float)
    return float(np.sqrt(mesh.jacobian * np.sum(ops.weights * u * u)))


def discrete_entropy(u, ops: SbpOperatorSet, mesh: Mesh1D) -> float:
    u = np.asarray(u, dtype=float)
    return float(mesh.jacobian * np.sum(ops.weights * 0.5 * u * u))


def entropy_rate(u, du, ops: SbpOperatorSet, mesh: Mesh1D) -> float:
    """``d/dt`` of the discrete entropy for the time derivative ``du``."""
    return float(mesh.jacobian * np.sum(ops.weights * u * du))
