"""Legendre-Gauss-Lobatto nodal operators with the diagonal-norm SBP property.

The operator set for degree ``N`` collects the ``N + 1`` LGL nodes and
weights on the reference element ``[-1, 1]``, the mass matrix ``M``, the
Lagrange differentiation matrix ``D`` and the boundary matrix ``B``. They
satisfy ``M D + (M D)^T = B`` to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SbpOperatorSet",
    "Mesh1D",
    "build_lgl_operators",
    "legendre_and_derivative",
    "lgl_nodes_weights",
    "barycentric_weights",
    "interpolation_matrix",
    "project_to_degree",
    "gauss_legendre",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100


def legendre_and_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``P_n(x)`` and ``P_n'(x)`` with the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x), np.zeros_like(x)
    p_prev, p = np.ones_like(x), x.copy()
    dp_prev, dp = np.zeros_like(x), np.ones_like(x)
    for k in range(2, n + 1):
        p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp_next = dp_prev + (2 * k - 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def lgl_nodes_weights(n: int) -> tuple[np.ndarray, np.ndarray]:
    """LGL nodes (roots of ``(1 - x^2) P_n'(x)``) and weights for degree ``n``.

    Newton iteration on the interior roots uses the classic LGL update
    ``x <- x - (x P_n - P_{n-1}) / ((n + 1) P_n)`` started from the
    Chebyshev-Gauss-Lobatto points.
    """
    if n < 1:
        raise ValueError(f"LGL operators need degree N >= 1, got {n}")
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    for _ in range(_NEWTON_MAXITER):
        p_n, _ = legendre_and_derivative(n, x)
        p_nm1, _ = legendre_and_derivative(n - 1, x)
        step = (x * p_n - p_nm1) / ((n + 1) * p_n)
        x = x - step
        if np.max(np.abs(step)) <= _NEWTON_TOL:
            break
    else:
        if np.max(np.abs(step)) > 1e3 * _NEWTON_TOL:
            raise ArithmeticError(f"LGL Newton iteration did not converge for N={n}")
    x[0], x[-1] = -1.0, 1.0
    # enforce exact antisymmetry of the node set
    x = 0.5 * (x - x[::-1])
    p_n, _ = legendre_and_derivative(n, x)
    w = 2.0 / (n * (n + 1) * p_n**2)
    return x, w


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    lam = barycentric_weights(nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    d = (lam[None, :] / lam[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    # negative-sum trick keeps D exact on constants
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def interpolation_matrix(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix evaluating the nodal Lagrange interpolant of ``nodes`` at ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lam = barycentric_weights(nodes)
    diff = x[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15, rtol=0.0)
    diff[exact] = 1.0
    terms = lam[None, :] / diff
    mat = terms / terms.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    mat[rows] = exact[rows].astype(float)
    return mat


def gauss_legendre(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n_points)


@dataclass(frozen=True)
class SbpOperatorSet:
    """Nodal DGSEM operators for one polynomial degree."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    mass: np.ndarray
    diff: np.ndarray
    boundary: np.ndarray
    # M^{-1} B, only the two corner entries are nonzero
    lift: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.degree + 1

    def sbp_defect(self) -> float:
        q = self.mass @ self.diff
        return float(np.max(np.abs(q + q.T - self.boundary)))


def build_lgl_operators(degree: int) -> SbpOperatorSet:
    """Construct the LGL operator set for polynomial degree ``degree >= 1``."""
    if degree < 1:
        raise ValueError(f"SBP operators need degree N >= 1, got {degree}")
    nodes, weights = lgl_nodes_weights(degree)
    d = _differentiation_matrix(nodes)
    mass = np.diag(weights)
    boundary = np.zeros((degree + 1, degree + 1))
    boundary[0, 0], boundary[-1, -1] = -1.0, 1.0
    lift = boundary / weights[:, None]
    for arr in (nodes, weights, mass, d, boundary, lift):
        arr.setflags(write=False)
    return SbpOperatorSet(degree, nodes, weights, mass, d, boundary, lift)


@dataclass(frozen=True)
class Mesh1D:
    """Uniform periodic mesh of ``n_elements`` on ``[x_lo, x_hi]``."""

    n_elements: int
    x_lo: float = -1.0
    x_hi: float = 1.0

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("mesh needs at least one element")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty domain")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_elements

    @property
    def jacobian(self) -> float:
        return 0.5 * self.h

    def element_left(self) -> np.ndarray:
        return self.x_lo + self.h * np.arange(self.n_elements)

    def node_coordinates(self, nodes: np.ndarray) -> np.ndarray:
        """Physical coordinates, shape ``(K, N + 1)``."""
        return self.element_left()[:, None] + 0.5 * self.h * (np.asarray(nodes)[None, :] + 1.0)


def project_to_degree(
    values,
    ops: SbpOperatorSet,
    target_degree: int,
    mesh: Mesh1D | None = None,
    quad_degree: int | None = None,
    method: str = "gauss",
) -> np.ndarray:
    """Project element-wise onto degree ``target_degree`` polynomials.

    The projected polynomial is returned sampled at the working LGL nodes,
    shape ``(K, N + 1)``.

    Parameters
    ----------
    values
        Either a callable ``f(x)`` (requires ``mesh``) or a nodal field of
        shape ``(K, N + 1)`` on the working LGL nodes.
    ops
        Operators of the working degree ``N``.
    target_degree
        Degree of the projected polynomial, ``0 <= target_degree <= N``.
    quad_degree
        Degree of the LGL rule used by ``method="lgl"``; defaults to ``N``.
    method
        ``"gauss"``: discrete L2 projection with the ``target_degree + 1``
        point Gauss-Legendre rule (equivalently, interpolation at those Gauss
        points). ``"lgl"``: discrete L2 projection with an LGL rule.
        ``"endpoints"``: linear interpolation of the element end values.
    """
    n = ops.degree
    if not 0 <= target_degree <= n:
        raise ValueError(f"target degree {target_degree} outside [0, {n}]")
    if method not in ("gauss", "lgl", "endpoints"):
        raise ValueError(f"unknown projection method {method!r}")
    if method == "endpoints" and target_degree != 1:
        raise ValueError("endpoint interpolation is only defined for linear targets")

    if method == "gauss":
        qnodes, qweights = gauss_legendre(target_degree + 1)
    elif method == "lgl":
        qdeg = n if quad_degree is None else quad_degree
        qnodes, qweights = lgl_nodes_weights(qdeg)
    else:
        qnodes, qweights = np.array([-1.0, 1.0]), np.array([1.0, 1.0])

    if callable(values):
        if mesh is None:
            raise ValueError("projecting a function requires a mesh")
        samples = np.asarray(values(mesh.node_coordinates(qnodes)), dtype=float)
    else:
        nodal = np.atleast_2d(np.asarray(values, dtype=float))
        if nodal.shape[-1] != n + 1:
            raise ValueError("nodal field does not match the working degree")
        samples = nodal @ interpolation_matrix(ops.nodes, qnodes).T

    if method == "endpoints":
        xi = ops.nodes
        return 0.5 * (1 - xi)[None, :] * samples[:, :1] + 0.5 * (1 + xi)[None, :] * samples[:, 1:]

    # orthonormal Legendre basis on [-1, 1]
    scale = np.sqrt((2 * np.arange(target_degree + 1) + 1) / 2.0)
    basis_q = np.polynomial.legendre.legvander(qnodes, target_degree) * scale
    basis_n = np.polynomial.legendre.legvander(ops.nodes, target_degree) * scale
    gram = basis_q.T @ (qweights[:, None] * basis_q)
    coeffs = np.linalg.solve(gram, basis_q.T @ (qweights[:, None] * samples.T))
    return (basis_n @ coeffs).T
