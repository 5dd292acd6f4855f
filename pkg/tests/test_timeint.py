import math

import numpy as np
import pytest

from splitstab import timeint as ti
from splitstab.dg_burgers import BurgersSchemeConfig, discrete_entropy, make_dgsem_rhs
from splitstab.flux_euler import InadmissibleStateError
from splitstab.sbp import Mesh1D, build_lgl_operators


def lsrk_polynomial():
    """Stability polynomial coefficients of the 2N-storage scheme (dt = 1)."""
    P = np.polynomial.Polynomial
    z = P([0.0, 1.0])
    u, du = P([1.0]), P([0.0])
    for a, b in zip(ti.LSRK54_A, ti.LSRK54_B):
        du = a * du + z * u
        u = u + b * du
    return u


@pytest.mark.parametrize("step", [ti.step_ssprk3, ti.step_lsrk54])
def test_zero_operator_is_identity(step):
    u = np.random.default_rng(0).normal(size=7)
    np.testing.assert_array_equal(step(lambda v: np.zeros_like(v), u, 0.3), u)


@pytest.mark.parametrize("z", [-0.1, -1.3, 0.4, -2.5])
def test_ssprk3_amplification(z):
    got = ti.step_ssprk3(lambda v: z * v, np.array([1.0]), 1.0)[0]
    assert abs(got - (1 + z + z * z / 2 + z**3 / 6)) <= 1e-14


def test_lsrk54_stability_polynomial():
    poly = lsrk_polynomial()
    np.testing.assert_allclose(poly.coef[:5], [1, 1, 1 / 2, 1 / 6, 1 / 24], atol=1e-12)
    got = ti.step_lsrk54(lambda v: -0.1 * v, np.array([1.0]), 1.0)[0]
    assert abs(got - poly(-0.1)) <= 1e-12


def test_lsrk_abscissae_are_stage_times():
    # c_k is the time reached by the stage value entering stage k
    poly_t = [0.0]
    du, t = 0.0, 0.0
    for a, b in zip(ti.LSRK54_A[:-1], ti.LSRK54_B[:-1]):
        du = a * du + 1.0
        t += b * du
        poly_t.append(t)
    np.testing.assert_allclose(poly_t, ti.LSRK54_C, atol=1e-12)


@pytest.mark.parametrize("step, order", [(ti.step_ssprk3, 3.0), (ti.step_lsrk54, 4.0)])
def test_convergence_order(step, order):
    errors = []
    for n in (10, 20, 40, 80):
        u = np.array([1.0])
        for _ in range(n):
            u = step(lambda v: -v, u, 1.0 / n)
        errors.append(abs(u[0] - math.exp(-1.0)))
    observed = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert observed[-1] == pytest.approx(order, abs=0.1)


@pytest.mark.parametrize("step", [ti.step_ssprk3, ti.step_lsrk54])
def test_superposition(step):
    rng = np.random.default_rng(3)
    a = rng.normal(size=(9, 9))
    u, v = rng.normal(size=9), rng.normal(size=9)
    rhs = lambda w: a @ w
    lhs = step(rhs, 2.0 * u - 3.0 * v, 0.05)
    assert np.max(np.abs(lhs - (2.0 * step(rhs, u, 0.05) - 3.0 * step(rhs, v, 0.05)))) <= 1e-13


def test_nonpositive_dt_rejected():
    with pytest.raises(ValueError):
        ti.step_ssprk3(lambda v: v, np.ones(2), 0.0)
    with pytest.raises(ValueError):
        ti.step_lsrk54(lambda v: v, np.ones(2), -1.0)


def test_compute_dt_burgers():
    ctl = ti.TimeStepController(h=0.2, degree=3, cfl=0.05)
    assert ti.compute_dt(np.full((10, 4), 2.0), ctl) == pytest.approx(1.25e-3, rel=1e-15)
    assert ti.compute_dt(np.full(3, -2.0), ti.TimeStepController(0.2, 3, cfl=0.1)) == pytest.approx(2.5e-3)


def test_compute_dt_zero_speed():
    with pytest.raises(ValueError):
        ti.compute_dt(np.zeros(4), ti.TimeStepController(0.2, 3))
    assert ti.compute_dt(np.zeros(4), ti.TimeStepController(0.2, 3, fallback_dt=1e-3)) == 1e-3


def test_controller_validation():
    with pytest.raises(ValueError):
        ti.TimeStepController(0.2, 3, cfl=0.0)
    with pytest.raises(ValueError):
        ti.TimeStepController(-0.2, 3)


def test_integrate_lands_on_end_time():
    ctl = ti.TimeStepController(h=1.0, degree=0, wave_speed=lambda u: 3.0, cfl=1.0)
    seen = []
    res = ti.integrate(lambda u: -u, np.array([1.0]), 1.0, ctl, "lsrk54", callback=lambda t, u: seen.append(t))
    assert res.completed and res.t == pytest.approx(1.0, abs=1e-14)
    assert res.n_steps == 3 == len(seen)
    assert np.all(np.diff(seen) > 0)
    assert res.u[0] == pytest.approx(math.exp(-1.0), abs=1e-3)


def test_integrate_reports_inadmissible_state():
    def rhs(u):
        if u[0] < 0.5:
            raise InadmissibleStateError("negative density", (0, 0, 0, 0), "density")
        return -np.ones_like(u)

    ctl = ti.TimeStepController(h=0.1, degree=0, wave_speed=lambda u: 1.0, cfl=1.0)
    res = ti.integrate(rhs, np.array([1.0]), 2.0, ctl, "ssprk3")
    assert not res.completed
    assert res.failure.kind == "inadmissible"
    assert res.failure.time == pytest.approx(res.t)
    assert res.u[0] >= 0.5


def test_integrate_reports_blowup():
    ctl = ti.TimeStepController(h=1.0, degree=0, wave_speed=lambda u: 1.0, cfl=1.0, fallback_dt=1.0)
    res = ti.integrate(lambda u: u**4, np.array([10.0]), 1e3, ctl, "ssprk3")
    assert res.failure is not None and res.failure.kind == "non-finite"
    assert np.all(np.isfinite(res.u))


def test_integrate_validation():
    ctl = ti.TimeStepController(1.0, 1)
    with pytest.raises(ValueError):
        ti.integrate(lambda u: u, np.ones(1), 0.0, ctl)
    with pytest.raises(ValueError):
        ti.integrate(lambda u: u, np.ones(1), 1.0, ctl, "euler")


def test_ec_entropy_drift_is_third_order():
    ops, mesh = build_lgl_operators(3), Mesh1D(10)
    x = mesh.node_coordinates(ops.nodes)
    u0 = np.sin(np.pi * x) + 0.5
    rhs = make_dgsem_rhs(BurgersSchemeConfig(2 / 3, "ec"), ops, mesh)
    s0 = discrete_entropy(u0, ops, mesh)
    drift = []
    for dt in (4e-3, 2e-3):
        u = u0.copy()
        for _ in range(round(0.2 / dt)):
            u = ti.step_ssprk3(rhs, u, dt)
        drift.append(abs(discrete_entropy(u, ops, mesh) - s0))
    assert drift[0] / drift[1] == pytest.approx(8.0, rel=0.2)
