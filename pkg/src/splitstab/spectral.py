"""Finite-difference Jacobians of semidiscrete operators and their spectra."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .flux_euler import InadmissibleStateError

__all__ = [
    "JacobianColumnError",
    "DefectiveModeWarning",
    "SpectrumReport",
    "Eigenmode",
    "fd_jacobian",
    "eigenspectrum",
    "extract_worst_mode",
    "ZERO_BAND",
    "COMPLEX_STEP",
]

logger = logging.getLogger(__name__)

# eigenvalues with |Re| below this are indistinguishable from zero for an
# FD Jacobian with eps = 1e-8
ZERO_BAND = 1e-6


class JacobianColumnError(RuntimeError):
    def __init__(self, column: int, eps: float, cause: Exception):
        super().__init__(f"rhs evaluation failed for Jacobian column {column} (eps={eps:g}): {cause}")
        self.column = column
        self.eps = eps


class DefectiveModeWarning(RuntimeWarning):
    pass


COMPLEX_STEP = 1e-30


def fd_jacobian(
    rhs,
    baseflow,
    eps: float = 1e-8,
    fallback_eps: float | None = None,
    method: str = "central",
) -> np.ndarray:
    """Jacobian of ``rhs`` around ``baseflow``, acting on the flattened field.

    ``method="central"``: column ``j`` is
    ``(rhs(u + eps e_j) - rhs(u - eps e_j)) / (2 eps)``. If a perturbed state
    is rejected by ``rhs`` and ``fallback_eps`` is given, that column is
    retried with the smaller step.

    ``method="complex-step"``: column ``j`` is ``Im rhs(u + i h e_j) / h``
    with ``h = 1e-30``. This is exact to round-off but needs an ``rhs``
    that is analytic in its argument and accepts complex arrays; ``eps`` is
    ignored.
    """
    if method not in ("central", "complex-step"):
        raise ValueError(f"unknown Jacobian method {method!r}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    u0 = np.array(baseflow, dtype=float)
    if not np.all(np.isfinite(u0)):
        raise ValueError("baseflow has non-finite entries")
    shape = u0.shape
    flat = u0.ravel()
    n = flat.size
    jac = np.empty((n, n))

    if method == "complex-step":
        work = flat.astype(complex)
        for j in range(n):
            work[j] = flat[j] + 1j * COMPLEX_STEP
            try:
                col = np.asarray(rhs(work.reshape(shape))).ravel()
            except (InadmissibleStateError, FloatingPointError) as exc:
                raise JacobianColumnError(j, COMPLEX_STEP, exc) from exc
            finally:
                work[j] = flat[j]
            jac[:, j] = col.imag / COMPLEX_STEP
        return jac

    work = flat.copy()
    for j in range(n):
        step = eps
        while True:
            try:
                work[j] = flat[j] + step
                plus = np.asarray(rhs(work.reshape(shape)), dtype=float).ravel()
                work[j] = flat[j] - step
                minus = np.asarray(rhs(work.reshape(shape)), dtype=float).ravel()
                break
            except (InadmissibleStateError, FloatingPointError) as exc:
                if fallback_eps is not None and step > fallback_eps:
                    logger.info("column %d: retrying with eps=%g", j, fallback_eps)
                    step = fallback_eps
                    continue
                raise JacobianColumnError(j, step, exc) from exc
            finally:
                work[j] = flat[j]
        jac[:, j] = (plus - minus) / (2.0 * step)
    return jac


@dataclass
class SpectrumReport:
    """Eigenvalues of a semidiscrete Jacobian plus the worst-case summary."""

    eigenvalues: np.ndarray
    max_real_part: float
    argmax: int
    metadata: dict = field(default_factory=dict)
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def worst_eigenvalue(self) -> complex:
        return complex(self.eigenvalues[self.argmax])

    @property
    def numerically_zero(self) -> np.ndarray:
        """Mask of eigenvalues whose real part lies inside the FD noise band."""
        return np.abs(self.eigenvalues.real) <= ZERO_BAND

    @property
    def is_numerically_stable(self) -> bool:
        return self.max_real_part <= ZERO_BAND

    def summary(self) -> dict:
        lam = self.worst_eigenvalue
        return {
            "n_eigenvalues": int(self.eigenvalues.size),
            "max_real_part": float(self.max_real_part),
            "worst_eigenvalue": [lam.real, lam.imag],
            "numerically_zero_count": int(np.count_nonzero(self.numerically_zero)),
            **self.metadata,
        }


def eigenspectrum(matrix, metadata: dict | None = None, vectors: bool = False) -> SpectrumReport:
    """Full spectrum of a dense real matrix via LAPACK's real Schur path (geev)."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eigenspectrum needs a square matrix")
    try:
        if vectors:
            lam, vec = scipy.linalg.eig(a, check_finite=True)
        else:
            lam, vec = scipy.linalg.eigvals(a, check_finite=True), None
    except scipy.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver did not converge: {exc}") from exc
    k = int(np.argmax(lam.real))
    return SpectrumReport(
        eigenvalues=lam,
        max_real_part=float(lam.real[k]),
        argmax=k,
        metadata=dict(metadata or {}),
        eigenvectors=vec,
        matrix=a,
    )


@dataclass
class Eigenmode:
    values: np.ndarray
    eigenvalue: complex
    residual: float


def extract_worst_mode(source, peak: float = 1e-3, shape=None) -> Eigenmode:
    """Real part of the eigenvector of the max-real-part eigenvalue.

    ``source`` is a matrix or a :class:`SpectrumReport` that kept its matrix.
    The mode is scaled so ``max |entry| == peak`` and reshaped to ``shape``.
    """
    if isinstance(source, SpectrumReport):
        if source.matrix is None:
            raise ValueError("spectrum report does not carry its matrix")
        a = source.matrix
    else:
        a = np.asarray(source, dtype=float)
    lam_all, vec_all = scipy.linalg.eig(a)
    k = int(np.argmax(lam_all.real))
    lam, v = lam_all[k], vec_all[:, k]
    residual = float(np.linalg.norm(a @ v - lam * v) / np.linalg.norm(v))
    if residual > 1e-6:
        warnings.warn(
            f"eigenvector residual {residual:.2e} exceeds 1e-6; eigenvalue may be defective",
            DefectiveModeWarning,
            stacklevel=2,
        )
    # rotate the complex vector so its real part carries the largest entry
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    mode = v.real
    mode = mode * (peak / np.max(np.abs(mode)))
    if shape is not None:
        mode = mode.reshape(shape)
    return Eigenmode(values=mode, eigenvalue=complex(lam), residual=residual)
