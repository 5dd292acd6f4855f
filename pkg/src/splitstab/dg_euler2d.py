"""Flux-differencing DGSEM for the 2D compressible Euler equations.

Periodic Cartesian mesh of ``Kx x Ky`` elements, tensor-product LGL nodes of
degree ``N``. A solution is stored as an array of shape
``(Kx, Ky, N+1, N+1, 4)``; the first node index runs along x. Per node the
volume term in x is ``-(2/hx) sum_m 2 D_im f#(u_ij, u_mj)``, and the strong
form surface term ``(2/hx) (f* - f(u)) / w`` acts on the two boundary nodes
of every x line (likewise in y).

The heavy loop runs in a compiled kernel when available; set
``SPLITSTAB_PURE_PYTHON=1`` to force the numpy implementation.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import _fallback
from . import flux_euler as fe
from .sbp import SbpOperatorSet, gauss_legendre, interpolation_matrix

logger = logging.getLogger(__name__)

__all__ = [
    "BACKEND",
    "available_backends",
    "Mesh2D",
    "EulerSchemeConfig",
    "EulerField2D",
    "CrashReport",
    "crash_report_from_error",
    "rhs_fluxdiff_2d",
    "rhs_divergence_2d",
    "make_euler_rhs",
    "max_wave_speed_2d",
    "initialize_density_wave",
    "density_wave_exact",
    "l2_error_density",
    "conserved_totals",
    "total_entropy",
    "entropy_rate_2d",
]

_BACKENDS = {"python": _fallback}
if os.environ.get("SPLITSTAB_PURE_PYTHON") != "1":
    try:
        from . import _kernels
    except ImportError:  # pragma: no cover - depends on the build
        logger.debug("compiled kernel unavailable, using numpy backend")
    else:
        _BACKENDS["compiled"] = _kernels
BACKEND = "compiled" if "compiled" in _BACKENDS else "python"

_VARIABLE_NAMES = {0: "density", 3: "pressure"}


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _backend(name: str | None):
    name = BACKEND if name is None else name
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available, have {available_backends()}") from None


@dataclass(frozen=True)
class Mesh2D:
    """Uniform periodic Cartesian mesh on ``[x_lo, x_hi] x [y_lo, y_hi]``."""

    kx: int
    ky: int
    x_lo: float = -1.0
    x_hi: float = 1.0
    y_lo: float = -1.0
    y_hi: float = 1.0

    def __post_init__(self):
        if self.kx < 1 or self.ky < 1:
            raise ValueError("mesh needs at least one element per direction")
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise ValueError("empty domain")

    @property
    def hx(self) -> float:
        return (self.x_hi - self.x_lo) / self.kx

    @property
    def hy(self) -> float:
        return (self.y_hi - self.y_lo) / self.ky

    def node_coordinates(self, nodes) -> tuple[np.ndarray, np.ndarray]:
        """Physical ``(x, y)`` at tensor nodes, each of shape ``(Kx, Ky, n, n)``."""
        nodes = np.asarray(nodes, dtype=float)
        xe = self.x_lo + self.hx * np.arange(self.kx)
        ye = self.y_lo + self.hy * np.arange(self.ky)
        x1 = xe[:, None] + 0.5 * self.hx * (nodes[None, :] + 1.0)  # (Kx, n)
        y1 = ye[:, None] + 0.5 * self.hy * (nodes[None, :] + 1.0)  # (Ky, n)
        n = nodes.size
        x = np.broadcast_to(x1[:, None, :, None], (self.kx, self.ky, n, n))
        y = np.broadcast_to(y1[None, :, None, :], (self.kx, self.ky, n, n))
        return x.copy(), y.copy()


@dataclass(frozen=True)
class EulerSchemeConfig:
    """Volume two-point flux and surface flux, addressed by id string."""

    volume_flux: str = "euler-ec-chandrashekar"
    surface_flux: str = "euler-ec-chandrashekar"

    def __post_init__(self):
        if self.volume_flux not in _fallback.VOLUME_IDS:
            raise ValueError(
                f"volume flux {self.volume_flux!r} not supported, choose from {sorted(_fallback.VOLUME_IDS)}"
            )
        if self.surface_flux not in _fallback.SURFACE_IDS:
            raise ValueError(f"unknown surface flux {self.surface_flux!r}")


@dataclass
class EulerField2D:
    mesh: Mesh2D
    ops: SbpOperatorSet
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        n = self.ops.n_nodes
        expected = (self.mesh.kx, self.mesh.ky, n, n, 4)
        if self.values.shape != expected:
            raise ValueError(f"field shape {self.values.shape} != {expected}")

    @property
    def density(self) -> np.ndarray:
        return self.values[..., 0]

    def min_density(self) -> float:
        return float(self.values[..., 0].min())


@dataclass(frozen=True)
class CrashReport:
    """First inadmissible state of a run."""

    time: float
    element: tuple[int, int]
    node: tuple[int, int]
    variable: str
    last_admissible_time: float | None = None

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "element": list(self.element),
            "node": list(self.node),
            "variable": self.variable,
            "last_admissible_time": self.last_admissible_time,
        }


def crash_report_from_error(err: fe.InadmissibleStateError, time: float, last_time=None) -> CrashReport:
    idx = tuple(int(i) for i in (err.index or (-1, -1, -1, -1)))
    if len(idx) != 4:
        idx = (-1, -1, -1, -1)
    return CrashReport(time, idx[:2], idx[2:], err.variable or "unknown", last_time)


def _raise_inadmissible(code: int, shape) -> None:
    flat, var = divmod(int(code), 4)
    idx = np.unravel_index(flat, shape[:4])
    name = _VARIABLE_NAMES.get(var, "state")
    raise fe.InadmissibleStateError(
        f"nonpositive {name} in element {tuple(int(i) for i in idx[:2])} node {tuple(int(i) for i in idx[2:])}",
        tuple(int(i) for i in idx),
        name,
    )


def rhs_fluxdiff_2d(u, config: EulerSchemeConfig, ops: SbpOperatorSet, mesh: Mesh2D, out=None, backend=None):
    """Semidiscrete time derivative of the nodal state ``u``.

    Raises
    ------
    InadmissibleStateError
        If any node has nonpositive density or pressure; ``index`` holds
        ``(ex, ey, i, j)``.
    """
    u = np.asarray(u)
    if np.iscomplexobj(u):
        # complex-step differentiation needs the numpy path
        backend = "python"
    else:
        u = np.ascontiguousarray(u, dtype=float)
    n = ops.n_nodes
    if u.shape != (mesh.kx, mesh.ky, n, n, 4):
        raise ValueError(f"field shape {u.shape} does not match mesh/operators")
    if out is None:
        out = np.empty_like(u)
    code = _backend(backend).fluxdiff_rhs_2d(
        u,
        ops.diff,
        ops.weights,
        mesh.hx,
        mesh.hy,
        _fallback.VOLUME_IDS[config.volume_flux],
        _fallback.SURFACE_IDS[config.surface_flux],
        out,
    )
    if code >= 0:
        _raise_inadmissible(code, u.shape)
    return out


def rhs_divergence_2d(u, surface_flux: str, ops: SbpOperatorSet, mesh: Mesh2D):
    """Standard strong-form DGSEM with the volume term ``D f(u)`` (numpy only)."""
    u = np.asarray(u, dtype=float)
    fe.check_admissible(u)
    surf = fe.get_flux(surface_flux)
    d, w = ops.diff, ops.weights
    fx = fe.physical_flux(u, 0)
    fy = fe.physical_flux(u, 1)
    res = -(2.0 / mesh.hx) * np.einsum("im,abmjv->abijv", d, fx)
    res -= (2.0 / mesh.hy) * np.einsum("jm,abimv->abijv", d, fy)

    fstar = surf(np.roll(u[:, :, -1], 1, axis=0), u[:, :, 0], 0)
    res[:, :, 0] += (2.0 / mesh.hx) * (fstar - fx[:, :, 0]) / w[0]
    res[:, :, -1] -= (2.0 / mesh.hx) * (np.roll(fstar, -1, axis=0) - fx[:, :, -1]) / w[-1]
    fstar = surf(np.roll(u[:, :, :, -1], 1, axis=1), u[:, :, :, 0], 1)
    res[:, :, :, 0] += (2.0 / mesh.hy) * (fstar - fy[:, :, :, 0]) / w[0]
    res[:, :, :, -1] -= (2.0 / mesh.hy) * (np.roll(fstar, -1, axis=1) - fy[:, :, :, -1]) / w[-1]
    return res


def make_euler_rhs(config: EulerSchemeConfig, ops: SbpOperatorSet, mesh: Mesh2D, backend=None):
    kernel = _backend(backend)
    if kernel is _BACKENDS.get("compiled"):
        backend = "compiled"

    def rhs(u):
        return rhs_fluxdiff_2d(u, config, ops, mesh, backend=backend)

    return rhs


def max_wave_speed_2d(u, backend=None) -> float:
    """``max`` over nodes and directions of ``|v_d| + c``."""
    return float(_backend(backend).max_wave_speed_2d(np.ascontiguousarray(u, dtype=float)))


def density_wave_exact(x, y, t: float, amplitude: float, velocity=(0.1, 0.2)):
    """Density of the translated wave ``1 + A sin(2 pi (x + y))`` at time ``t``.

    The profile is periodic with period 1 along ``x + y``, so no explicit
    wrapping into the domain is needed.
    """
    xs = np.asarray(x) - velocity[0] * t
    ys = np.asarray(y) - velocity[1] * t
    return 1.0 + amplitude * np.sin(2.0 * np.pi * (xs + ys))


def initialize_density_wave(
    mesh: Mesh2D,
    ops: SbpOperatorSet,
    amplitude: float,
    velocity=(0.1, 0.2),
    pressure: float = 20.0,
) -> EulerField2D:
    """Sample the smooth density wave at the tensor LGL nodes."""
    if not 0.0 <= amplitude < 1.0:
        raise ValueError(f"amplitude must lie in [0, 1) for positive density, got {amplitude}")
    x, y = mesh.node_coordinates(ops.nodes)
    rho = density_wave_exact(x, y, 0.0, amplitude, velocity)
    u = fe.state_from_primitive(rho, velocity[0], velocity[1], pressure)
    return EulerField2D(mesh, ops, u)


def _cell_weights(ops: SbpOperatorSet, mesh: Mesh2D) -> np.ndarray:
    return 0.25 * mesh.hx * mesh.hy * np.outer(ops.weights, ops.weights)


def l2_error_density(
    u,
    ops: SbpOperatorSet,
    mesh: Mesh2D,
    t: float,
    amplitude: float,
    velocity=(0.1, 0.2),
    oversample: int | None = None,
) -> float:
    """L2 norm of the density error against the translated exact wave.

    With ``oversample=None`` the LGL quadrature of the nodes is used, so the
    initial nodal interpolant has zero error. With ``oversample=q`` the
    nodal polynomial is evaluated on a ``q x q`` Gauss grid per element,
    which also measures the interpolation error of the initial data.
    """
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    if oversample is None:
        x, y = mesh.node_coordinates(ops.nodes)
        err = rho - density_wave_exact(x, y, t, amplitude, velocity)
        return float(np.sqrt(np.sum(_cell_weights(ops, mesh) * err * err)))
    if oversample < 1:
        raise ValueError("oversample must be positive")
    q, wq = gauss_legendre(oversample)
    interp = interpolation_matrix(ops.nodes, q)
    rho_q = np.einsum("pi,qj,abij->abpq", interp, interp, rho)
    x, y = mesh.node_coordinates(q)
    err = rho_q - density_wave_exact(x, y, t, amplitude, velocity)
    wts = 0.25 * mesh.hx * mesh.hy * np.outer(wq, wq)
    return float(np.sqrt(np.sum(wts * err * err)))


def conserved_totals(u, ops: SbpOperatorSet, mesh: Mesh2D) -> np.ndarray:
    """Quadrature integral of each conserved variable."""
    u = np.asarray(u, dtype=float)
    return np.einsum("ij,abijv->v", _cell_weights(ops, mesh), u)


def total_entropy(u, ops: SbpOperatorSet, mesh: Mesh2D) -> float:
    return float(np.sum(_cell_weights(ops, mesh) * fe.entropy(u)))


def entropy_rate_2d(u, du, ops: SbpOperatorSet, mesh: Mesh2D) -> float:
    """``d/dt`` of the discrete entropy, ``sum w (h^2/4) w(u) . du``."""
    wv = fe.entropy_variables(u)
    return float(np.sum(_cell_weights(ops, mesh)[..., None] * wv * np.asarray(du)))
