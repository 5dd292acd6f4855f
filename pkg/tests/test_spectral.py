import numpy as np
import pytest

from splitstab import spectral as sp
from splitstab.dg_burgers import BurgersSchemeConfig, make_dgsem_rhs
from splitstab.flux_euler import InadmissibleStateError
from splitstab.sbp import Mesh1D, build_lgl_operators, project_to_degree


def advection_rhs(ops, mesh):
    """Upwind DGSEM for ``u_t + u_x = 0`` written in nodal form."""
    d, w, jac = ops.diff, ops.weights, mesh.jacobian

    def rhs(u):
        out = -(u @ d.T)
        out[:, 0] += (np.roll(u[:, -1], 1) - u[:, 0]) / w[0]
        return out / jac

    return rhs


def advection_matrix(ops, mesh):
    """The same operator assembled block by block."""
    k, n = mesh.n_elements, ops.n_nodes
    a = np.zeros((k * n, k * n))
    lift = np.zeros((n, n))
    lift[0, 0] = -1.0 / ops.weights[0]
    couple = np.zeros((n, n))
    couple[0, -1] = 1.0 / ops.weights[0]
    for e in range(k):
        blk = slice(e * n, (e + 1) * n)
        a[blk, blk] = (-ops.diff + lift) / mesh.jacobian
        left = (e - 1) % k
        a[blk, left * n : (left + 1) * n] += couple / mesh.jacobian
    return a


@pytest.fixture(scope="module")
def advection():
    ops, mesh = build_lgl_operators(4), Mesh1D(6)
    return ops, mesh, advection_rhs(ops, mesh), advection_matrix(ops, mesh)


def test_fd_jacobian_of_linear_operator(advection):
    ops, mesh, rhs, a = advection
    base = np.random.default_rng(0).normal(size=(6, 5))
    # entries reach ~40, so round-off is ~1e-14 / eps; keep eps >= 1e-6
    for eps in (1e-3, 1e-5, 1e-6):
        assert np.max(np.abs(sp.fd_jacobian(rhs, base, eps) - a)) <= 1e-7


def test_complex_step_of_linear_operator(advection):
    ops, mesh, rhs, a = advection
    jac = sp.fd_jacobian(rhs, np.ones((6, 5)), method="complex-step")
    assert np.max(np.abs(jac - a)) <= 1e-12


def test_complex_step_matches_central_differences():
    ops, mesh = build_lgl_operators(3), Mesh1D(5)
    x = mesh.node_coordinates(ops.nodes)
    base = np.sin(np.pi * x) + 2
    rhs = make_dgsem_rhs(BurgersSchemeConfig(2 / 3, "ec"), ops, mesh)
    jc = sp.fd_jacobian(rhs, base, 1e-6)
    jx = sp.fd_jacobian(rhs, base, method="complex-step")
    assert np.max(np.abs(jc - jx)) <= 1e-6 * np.max(np.abs(jx))


def test_fd_step_halving_is_second_order():
    f = lambda u: np.sin(u) * u[::-1]
    u = np.linspace(0.2, 1.4, 6)
    exact = sp.fd_jacobian(f, u, method="complex-step")
    e1 = np.max(np.abs(sp.fd_jacobian(f, u, 1e-2) - exact))
    e2 = np.max(np.abs(sp.fd_jacobian(f, u, 5e-3) - exact))
    assert e2 / e1 == pytest.approx(0.25, abs=0.01)


def test_fallback_step_on_rejected_state():
    def rhs(u):
        if np.any(u < 1.0):
            raise InadmissibleStateError("negative", (0,), "density")
        return u**2

    base = np.array([1.0 + 1e-9, 2.0])
    jac = sp.fd_jacobian(rhs, base, eps=1e-8, fallback_eps=1e-10)
    np.testing.assert_allclose(np.diag(jac), 2 * base, rtol=1e-5)
    with pytest.raises(sp.JacobianColumnError):
        sp.fd_jacobian(rhs, base, eps=1e-8)


def test_skew_symmetric_spectrum():
    b = np.random.default_rng(1).normal(size=(40, 40))
    rep = sp.eigenspectrum(b - b.T)
    assert np.max(np.abs(rep.eigenvalues.real)) <= 1e-12
    assert rep.is_numerically_stable


def test_spectrum_invariants():
    a = np.random.default_rng(2).normal(size=(60, 60))
    rep = sp.eigenspectrum(a, {"name": "random"})
    lam = rep.eigenvalues
    assert lam.size == 60
    assert rep.max_real_part == np.max(lam.real)
    assert rep.worst_eigenvalue == lam[rep.argmax]
    # closed under conjugation
    conj = np.sort_complex(np.conj(lam))
    assert np.max(np.abs(np.sort_complex(lam) - conj)) <= 1e-10
    assert abs(lam.real.sum() - np.trace(a)) <= 1e-8 * max(1.0, abs(np.trace(a)))
    summary = rep.summary()
    assert summary["n_eigenvalues"] == 60 and summary["name"] == "random"


def test_numerically_zero_band():
    rep = sp.eigenspectrum(np.diag([5e-7, -3.0, 2e-3]))
    np.testing.assert_array_equal(rep.numerically_zero, [True, False, False])
    assert not rep.is_numerically_stable


def test_eigenspectrum_rejects_bad_input():
    with pytest.raises(ValueError):
        sp.eigenspectrum(np.ones((3, 4)))


def test_worst_mode_of_diagonal():
    mode = sp.extract_worst_mode(np.diag([2.0, 1.0]), peak=1e-3)
    np.testing.assert_allclose(np.abs(mode.values), [1e-3, 0.0], atol=1e-18)
    assert mode.eigenvalue == 2.0
    assert mode.residual <= 1e-12


def test_worst_mode_residual_and_shape():
    a = np.random.default_rng(4).normal(size=(12, 12))
    mode = sp.extract_worst_mode(a, peak=0.5, shape=(3, 4))
    assert mode.values.shape == (3, 4)
    assert np.max(np.abs(mode.values)) == pytest.approx(0.5)
    assert mode.residual <= 1e-6


def test_report_without_matrix():
    rep = sp.eigenspectrum(np.eye(2))
    rep.matrix = None
    with pytest.raises(ValueError):
        sp.extract_worst_mode(rep)


def test_ec_worst_mode_lives_on_negative_slope():
    ops, mesh = build_lgl_operators(3), Mesh1D(10)
    base = project_to_degree(lambda x: np.sin(np.pi * x - 0.7) + 2, ops, 1, mesh)
    rhs = make_dgsem_rhs(BurgersSchemeConfig(2 / 3, "ec"), ops, mesh)
    rep = sp.eigenspectrum(sp.fd_jacobian(rhs, base))
    mode = sp.extract_worst_mode(rep, shape=base.shape)
    slope = base[:, -1] - base[:, 0]
    energy = np.sum(mode.values**2, axis=1)
    assert energy[slope < 0].sum() > 0.9 * energy.sum()
