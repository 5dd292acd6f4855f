# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled 2D flux-differencing DGSEM kernel for the Euler equations.

Same contract as ``splitstab._fallback``: ``u`` is ``(Kx, Ky, N+1, N+1, 4)``
C-contiguous, the first node index runs along x. Flux codes: 0 central,
1 Chandrashekar EC, 2 Kennedy-Gruber, 3 Rusanov (surface only).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, fabs

cnp.import_array()

cdef double GAMMA = 1.4
cdef double GM1 = 0.4
cdef double LOGMEAN_THRESHOLD = 1e-4


cdef inline double ln_mean(double a, double b, double log_a, double log_b) noexcept nogil:
    cdef double f = (b - a) / (b + a)
    cdef double u = f * f
    if u < LOGMEAN_THRESHOLD:
        return 0.5 * (a + b) / (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0)))
    return (b - a) / (log_b - log_a)


# per-node primitive cache layout
cdef enum:
    NPRIM = 8
    MAXNQ = 32
# 0 rho, 1 v1, 2 v2, 3 p, 4 beta = rho/p, 5 log rho, 6 log beta, 7 rho E


cdef inline void physical_flux(const double* q, int dirn, double* f) noexcept nogil:
    cdef double vn = q[1 + dirn]
    cdef double mass = q[0] * vn
    f[0] = mass
    f[1] = mass * q[1]
    f[2] = mass * q[2]
    f[3] = (q[7] + q[3]) * vn
    f[1 + dirn] += q[3]


cdef inline void two_point_flux(int fid, const double* a, const double* b, int dirn,
                                const double* ua, const double* ub, double* f) noexcept nogil:
    cdef double fa[4]
    cdef double fb[4]
    cdef double rho_ln, beta_ln, v1, v2, p_hat, vsq, h_hat, vn, mass
    cdef double rho_avg, p_avg, e_avg, lam, la, lb
    cdef int k
    if fid == 0 or fid == 3:
        physical_flux(a, dirn, fa)
        physical_flux(b, dirn, fb)
        for k in range(4):
            f[k] = 0.5 * (fa[k] + fb[k])
        if fid == 3:
            la = fabs(a[1 + dirn]) + sqrt(GAMMA * a[3] / a[0])
            lb = fabs(b[1 + dirn]) + sqrt(GAMMA * b[3] / b[0])
            lam = la if la > lb else lb
            for k in range(4):
                f[k] -= 0.5 * lam * (ub[k] - ua[k])
    elif fid == 1:
        rho_ln = ln_mean(a[0], b[0], a[5], b[5])
        beta_ln = ln_mean(a[4], b[4], a[6], b[6])
        v1 = 0.5 * (a[1] + b[1])
        v2 = 0.5 * (a[2] + b[2])
        p_hat = (a[0] + b[0]) / (a[4] + b[4])
        vsq = 0.5 * (a[1] * a[1] + a[2] * a[2] + b[1] * b[1] + b[2] * b[2])
        h_hat = 1.0 / (beta_ln * GM1) + v1 * v1 + v2 * v2 - 0.5 * vsq + p_hat / rho_ln
        vn = v1 if dirn == 0 else v2
        mass = rho_ln * vn
        f[0] = mass
        f[1] = mass * v1
        f[2] = mass * v2
        f[3] = mass * h_hat
        f[1 + dirn] += p_hat
    else:
        rho_avg = 0.5 * (a[0] + b[0])
        v1 = 0.5 * (a[1] + b[1])
        v2 = 0.5 * (a[2] + b[2])
        p_avg = 0.5 * (a[3] + b[3])
        e_avg = 0.5 * (a[7] / a[0] + b[7] / b[0])
        vn = v1 if dirn == 0 else v2
        mass = rho_avg * vn
        f[0] = mass
        f[1] = mass * v1
        f[2] = mass * v2
        f[3] = (rho_avg * e_avg + p_avg) * vn
        f[1 + dirn] += p_avg


cdef long fill_primitives(const double* u, long nnodes, double* prim, bint logs) noexcept nogil:
    cdef long n
    cdef double rho, v1, v2, p
    for n in range(nnodes):
        rho = u[4 * n]
        if not (rho > 0.0):
            return 4 * n
        v1 = u[4 * n + 1] / rho
        v2 = u[4 * n + 2] / rho
        p = GM1 * (u[4 * n + 3] - 0.5 * rho * (v1 * v1 + v2 * v2))
        if not (p > 0.0):
            return 4 * n + 3
        prim[NPRIM * n] = rho
        prim[NPRIM * n + 1] = v1
        prim[NPRIM * n + 2] = v2
        prim[NPRIM * n + 3] = p
        prim[NPRIM * n + 4] = rho / p
        prim[NPRIM * n + 7] = u[4 * n + 3]
        if logs:
            prim[NPRIM * n + 5] = log(rho)
            prim[NPRIM * n + 6] = log(rho / p)
    return -1


def fluxdiff_rhs_2d(const double[:, :, :, :, ::1] u, const double[:, ::1] d, const double[::1] weights,
                    double hx, double hy, int volume_id, int surface_id,
                    double[:, :, :, :, ::1] out):
    """Evaluate the semidiscrete rhs into ``out``; return -1 or 4*node+var of a bad state."""
    cdef Py_ssize_t kx = u.shape[0], ky = u.shape[1], nq = u.shape[2]
    cdef long nnodes = kx * ky * nq * nq
    cdef double[::1] prim_arr = np.empty(NPRIM * nnodes)
    cdef double[::1] flux_arr = np.empty(8 * nnodes)
    cdef double* prim = &prim_arr[0]
    cdef double* fxn = &flux_arr[0]
    cdef double* fyn = &flux_arr[4 * nnodes]
    cdef double dl[MAXNQ * MAXNQ]
    cdef const double* uu = &u[0, 0, 0, 0, 0]
    cdef double* rr = &out[0, 0, 0, 0, 0]
    cdef long bad
    cdef Py_ssize_t ex, ey, exn, eyn, i, j, m, k
    cdef long ni, nm, base, n
    cdef double f[4]
    cdef double fs[4]
    cdef double fl[4]
    cdef double cx = 2.0 / hx, cy = 2.0 / hy, dim, dmi
    cdef double w0 = weights[0], wn = weights[nq - 1]
    cdef long sx = nq * nq, si = nq  # node strides inside an element

    if nq > MAXNQ:
        raise ValueError(f"compiled kernel supports at most {MAXNQ} nodes per direction")
    with nogil:
        bad = fill_primitives(uu, nnodes, prim, volume_id == 1 or surface_id == 1)
    if bad >= 0:
        return bad
    with nogil:
        for k in range(4 * nnodes):
            rr[k] = 0.0

        for i in range(nq):
            for m in range(nq):
                dl[i * nq + m] = 2.0 * d[i, m]
        if volume_id == 0:
            # central two-point flux: sum_m 2 D_im f#(u_i, u_m) = sum_m D_im f(u_m)
            # since the rows of D sum to zero
            for n in range(nnodes):
                physical_flux(&prim[NPRIM * n], 0, &fxn[4 * n])
                physical_flux(&prim[NPRIM * n], 1, &fyn[4 * n])
            for ex in range(kx):
                for ey in range(ky):
                    base = (ex * ky + ey) * sx
                    for i in range(nq):
                        for j in range(nq):
                            ni = base + i * si + j
                            for m in range(nq):
                                dim = 0.5 * cx * dl[i * nq + m]
                                dmi = 0.5 * cy * dl[j * nq + m]
                                nm = base + m * si + j
                                for k in range(4):
                                    rr[4 * ni + k] -= dim * fxn[4 * nm + k]
                                nm = base + i * si + m
                                for k in range(4):
                                    rr[4 * ni + k] -= dmi * fyn[4 * nm + k]
        else:
            for ex in range(kx):
                for ey in range(ky):
                    base = (ex * ky + ey) * sx
                    # x direction: nodes (i, j) and (m, j)
                    for j in range(nq):
                        for i in range(nq):
                            ni = base + i * si + j
                            physical_flux(&prim[NPRIM * ni], 0, f)
                            dim = -cx * dl[i * nq + i]
                            for k in range(4):
                                rr[4 * ni + k] += dim * f[k]
                            for m in range(i + 1, nq):
                                nm = base + m * si + j
                                two_point_flux(volume_id, &prim[NPRIM * ni], &prim[NPRIM * nm], 0,
                                               &uu[4 * ni], &uu[4 * nm], f)
                                dim = -cx * dl[i * nq + m]
                                dmi = -cx * dl[m * nq + i]
                                for k in range(4):
                                    rr[4 * ni + k] += dim * f[k]
                                    rr[4 * nm + k] += dmi * f[k]
                    # y direction: nodes (i, j) and (i, m)
                    for i in range(nq):
                        for j in range(nq):
                            ni = base + i * si + j
                            physical_flux(&prim[NPRIM * ni], 1, f)
                            dim = -cy * dl[j * nq + j]
                            for k in range(4):
                                rr[4 * ni + k] += dim * f[k]
                            for m in range(j + 1, nq):
                                nm = base + i * si + m
                                two_point_flux(volume_id, &prim[NPRIM * ni], &prim[NPRIM * nm], 1,
                                               &uu[4 * ni], &uu[4 * nm], f)
                                dim = -cy * dl[j * nq + m]
                                dmi = -cy * dl[m * nq + j]
                                for k in range(4):
                                    rr[4 * ni + k] += dim * f[k]
                                    rr[4 * nm + k] += dmi * f[k]

        # x faces: left neighbour node (N, j) of element ex-1 meets node (0, j) of ex
        for ex in range(kx):
            exn = ex - 1 if ex > 0 else kx - 1
            for ey in range(ky):
                for j in range(nq):
                    nm = (exn * ky + ey) * sx + (nq - 1) * si + j
                    ni = (ex * ky + ey) * sx + j
                    two_point_flux(surface_id, &prim[NPRIM * nm], &prim[NPRIM * ni], 0,
                                   &uu[4 * nm], &uu[4 * ni], fs)
                    physical_flux(&prim[NPRIM * nm], 0, fl)
                    for k in range(4):
                        rr[4 * nm + k] -= cx * (fs[k] - fl[k]) / wn
                    physical_flux(&prim[NPRIM * ni], 0, fl)
                    for k in range(4):
                        rr[4 * ni + k] += cx * (fs[k] - fl[k]) / w0
        # y faces
        for ex in range(kx):
            for ey in range(ky):
                eyn = ey - 1 if ey > 0 else ky - 1
                for i in range(nq):
                    nm = (ex * ky + eyn) * sx + i * si + (nq - 1)
                    ni = (ex * ky + ey) * sx + i * si
                    two_point_flux(surface_id, &prim[NPRIM * nm], &prim[NPRIM * ni], 1,
                                   &uu[4 * nm], &uu[4 * ni], fs)
                    physical_flux(&prim[NPRIM * nm], 1, fl)
                    for k in range(4):
                        rr[4 * nm + k] -= cy * (fs[k] - fl[k]) / wn
                    physical_flux(&prim[NPRIM * ni], 1, fl)
                    for k in range(4):
                        rr[4 * ni + k] += cy * (fs[k] - fl[k]) / w0
    return -1


def first_inadmissible(const double[:, :, :, :, ::1] u):
    """Return ``(flat_node_index, variable_code)`` of the first bad node, or None."""
    cdef long nnodes = u.shape[0] * u.shape[1] * u.shape[2] * u.shape[3]
    cdef const double* uu = &u[0, 0, 0, 0, 0]
    cdef long n, bad = -1
    cdef double rho, v1, v2, p
    with nogil:
        for n in range(nnodes):
            rho = uu[4 * n]
            if not (rho > 0.0):
                bad = 4 * n
                break
            v1 = uu[4 * n + 1] / rho
            v2 = uu[4 * n + 2] / rho
            p = GM1 * (uu[4 * n + 3] - 0.5 * rho * (v1 * v1 + v2 * v2))
            if not (p > 0.0):
                bad = 4 * n + 3
                break
    if bad < 0:
        return None
    return bad // 4, bad % 4


def max_wave_speed_2d(const double[:, :, :, :, ::1] u):
    """``max over nodes and directions of |v_d| + c``."""
    cdef long nnodes = u.shape[0] * u.shape[1] * u.shape[2] * u.shape[3]
    cdef const double* uu = &u[0, 0, 0, 0, 0]
    cdef long n
    cdef double rho, v1, v2, p, c, s, best = 0.0
    with nogil:
        for n in range(nnodes):
            rho = uu[4 * n]
            v1 = uu[4 * n + 1] / rho
            v2 = uu[4 * n + 2] / rho
            p = GM1 * (uu[4 * n + 3] - 0.5 * rho * (v1 * v1 + v2 * v2))
            c = sqrt(GAMMA * p / rho)
            s = (fabs(v1) if fabs(v1) > fabs(v2) else fabs(v2)) + c
            if s > best:
                best = s
    return best
