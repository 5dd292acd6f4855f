"""Pure numpy implementation of the 2D flux-differencing DGSEM kernel.

Mirrors ``_kernels.pyx`` exactly (same argument layout, same return
convention) so either can back :mod:`splitstab.dg_euler2d`.
"""

from __future__ import annotations

import numpy as np

from . import flux_euler as fe

# integer codes shared with the compiled kernel
VOLUME_IDS = {"euler-central": 0, "euler-ec-chandrashekar": 1, "euler-kg": 2}
SURFACE_IDS = {"euler-central": 0, "euler-ec-chandrashekar": 1, "euler-kg": 2, "euler-rusanov": 3}
_FLUX_BY_ID = {
    0: fe.flux_central_euler,
    1: fe.flux_chandrashekar_ec,
    2: fe.flux_kennedy_gruber,
    3: fe.flux_rusanov_euler,
}


def first_inadmissible(u: np.ndarray):
    """Return ``(flat_node_index, variable_code)`` of the first bad node, or None.

    ``variable_code`` is 0 for density and 3 for pressure.
    """
    rho = np.real(u[..., 0])
    bad = ~(rho > 0.0)
    if np.any(bad):
        return int(np.argmax(bad.ravel())), 0
    p = np.real(fe.pressure(u))
    bad = ~(p > 0.0)
    if np.any(bad):
        return int(np.argmax(bad.ravel())), 3
    return None


def fluxdiff_rhs_2d(u, d, weights, hx, hy, volume_id, surface_id, out):
    """Evaluate the semidiscrete rhs into ``out``.

    ``u`` has shape ``(Kx, Ky, N+1, N+1, 4)`` with the first node index along
    x. Returns ``-1`` on success or ``4 * node + variable`` for the first
    inadmissible state (nothing is written then). Complex ``u``/``out`` are
    supported for complex-step differentiation.
    """
    bad = first_inadmissible(u)
    if bad is not None:
        return bad[0] * 4 + bad[1]
    vol = _FLUX_BY_ID[volume_id]
    surf = _FLUX_BY_ID[surface_id]
    two_d = 2.0 * d

    # x sweep: pairs (i, m) share (ex, ey, j)
    ui = u[:, :, :, None, :, :]
    um = u[:, :, None, :, :, :]
    fx = vol(ui, um, 0)  # (Kx, Ky, i, m, j, 4)
    vx = np.einsum("im,abimjv->abijv", two_d, fx)
    uj = u[:, :, :, :, None, :]
    un = u[:, :, :, None, :, :]
    fy = vol(uj, un, 1)  # (Kx, Ky, i, j, m, 4)
    vy = np.einsum("jm,abijmv->abijv", two_d, fy)
    res = -(2.0 / hx) * vx - (2.0 / hy) * vy

    w0, wn = weights[0], weights[-1]
    # x faces: face k sits between element k-1 (node N) and element k (node 0)
    left_state = np.roll(u[:, :, -1, :, :], 1, axis=0)
    right_state = u[:, :, 0, :, :]
    fstar = surf(left_state, right_state, 0)
    f_first = fe.physical_flux(u[:, :, 0, :, :], 0)
    f_last = fe.physical_flux(u[:, :, -1, :, :], 0)
    res[:, :, 0, :, :] += (2.0 / hx) * (fstar - f_first) / w0
    res[:, :, -1, :, :] -= (2.0 / hx) * (np.roll(fstar, -1, axis=0) - f_last) / wn

    left_state = np.roll(u[:, :, :, -1, :], 1, axis=1)
    right_state = u[:, :, :, 0, :]
    fstar = surf(left_state, right_state, 1)
    f_first = fe.physical_flux(u[:, :, :, 0, :], 1)
    f_last = fe.physical_flux(u[:, :, :, -1, :], 1)
    res[:, :, :, 0, :] += (2.0 / hy) * (fstar - f_first) / w0
    res[:, :, :, -1, :] -= (2.0 / hy) * (np.roll(fstar, -1, axis=1) - f_last) / wn

    out[...] = res
    return -1


def max_wave_speed_2d(u):
    """``max over nodes and directions of |v_d| + c``."""
    rho, v1, v2, p = fe.primitive_from_state(np.real(u))
    c = np.sqrt(fe.GAMMA * p / rho)
    return float(np.max(np.maximum(np.abs(v1), np.abs(v2)) + c))
