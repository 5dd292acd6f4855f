import numpy as np
import pytest

from splitstab import flux_euler as fe

TWO_POINT = ["euler-central", "euler-ec-chandrashekar", "euler-kg", "euler-rusanov"]


def random_states(rng, n):
    rho = rng.uniform(0.05, 5.0, n)
    v1 = rng.uniform(-2.0, 2.0, n)
    v2 = rng.uniform(-2.0, 2.0, n)
    p = rng.uniform(0.05, 30.0, n)
    return fe.state_from_primitive(rho, v1, v2, p)


@pytest.fixture(scope="module")
def pairs():
    rng = np.random.default_rng(7)
    return random_states(rng, 10_000), random_states(rng, 10_000)


def test_stagnation_flux():
    u = fe.state_from_primitive(1.0, 0.0, 0.0, 1.0)
    np.testing.assert_allclose(fe.physical_flux(u, 0), [0.0, 1.0, 0.0, 0.0], atol=1e-15)


def test_background_state_flux():
    u = fe.state_from_primitive(1.0, 0.1, 0.0, 20.0)
    assert u[3] == pytest.approx(50.005, abs=1e-12)
    np.testing.assert_allclose(fe.physical_flux(u, 0), [0.1, 20.01, 0.0, 7.0005], atol=1e-12)


def test_primitive_round_trip(pairs):
    u, _ = pairs
    np.testing.assert_allclose(fe.state_from_primitive(*fe.primitive_from_state(u)), u, rtol=1e-13)


def test_log_mean_values():
    assert fe.log_mean(2.0, 2.0) == 2.0
    assert fe.log_mean(1.0, np.e) == pytest.approx(np.e - 1.0, abs=1e-14)
    assert abs(fe.log_mean(1.0, 1.0 + 1e-12) - (1.0 + 5e-13)) <= 1e-15


def test_log_mean_bounds():
    rng = np.random.default_rng(3)
    a = 10.0 ** rng.uniform(-3, 3, 100_000)
    b = 10.0 ** rng.uniform(-3, 3, 100_000)
    m = fe.log_mean(a, b)
    assert np.all(m >= np.minimum(a, b) * (1 - 1e-14))
    assert np.all(m <= 0.5 * (a + b) * (1 + 1e-14))


def test_log_mean_continuous_across_series_branch():
    # |b - a| / (b + a) crosses 1e-4 between the two samples
    a = 1.0
    f = np.array([1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)])
    b = a * (1 + f) / (1 - f)
    lo, hi = fe.log_mean(a, b)
    slope = 0.5 * (b[1] - b[0])
    assert abs((hi - lo) - slope) / hi <= 1e-12


@pytest.mark.parametrize("flux_id", TWO_POINT)
@pytest.mark.parametrize("direction", [0, 1])
def test_consistency(flux_id, direction, pairs):
    u, _ = pairs
    f = fe.get_flux(flux_id)
    ref = fe.physical_flux(u, direction)
    assert np.max(np.abs(f(u, u, direction) - ref) / (1 + np.abs(ref))) <= 1e-12


@pytest.mark.parametrize("flux_id", ["euler-central", "euler-ec-chandrashekar", "euler-kg"])
@pytest.mark.parametrize("direction", [0, 1])
def test_symmetry(flux_id, direction, pairs):
    ul, ur = pairs
    f = fe.get_flux(flux_id)
    assert np.max(np.abs(f(ul, ur, direction) - f(ur, ul, direction))) <= 1e-12


@pytest.mark.parametrize("direction", [0, 1])
def test_chandrashekar_entropy_conservation(direction, pairs):
    ul, ur = pairs
    res = fe.ec_condition_residual("euler-ec-chandrashekar", ul, ur, direction)
    assert np.max(np.abs(res)) <= 1e-10


def test_chandrashekar_near_coincident_states(pairs):
    u, _ = pairs
    v = u * (1 + 1e-9)
    assert np.max(np.abs(fe.ec_condition_residual("euler-ec-chandrashekar", u, v))) <= 1e-10


@pytest.mark.parametrize("direction", [0, 1])
def test_rusanov_entropy_inequality(direction, pairs):
    ul, ur = pairs
    assert np.max(fe.ec_condition_residual("euler-rusanov", ul, ur, direction)) <= 1e-10


def test_kg_differs_from_central(pairs):
    ul, ur = pairs
    gap = fe.flux_kennedy_gruber(ul, ur) - fe.flux_central_euler(ul, ur)
    assert np.max(np.abs(gap)) > 1e-3


def test_density_wave_states_advect():
    # constant velocity and pressure: every flux moves only density
    rho = np.array([0.3, 1.7])
    u = fe.state_from_primitive(rho, 0.1, 0.2, 20.0)
    ul, ur = u[0], u[1]
    for flux in (fe.flux_central_euler, fe.flux_kennedy_gruber, fe.flux_chandrashekar_ec):
        f = flux(ul, ur, 0)
        assert f[1] / f[0] == pytest.approx(0.1 + 20.0 / f[0], rel=1e-12)


def test_wave_speed_for_density_wave():
    u = fe.state_from_primitive(0.5, 0.1, 0.2, 20.0)
    assert fe.max_wave_speed(u, 0) == pytest.approx(0.1 + np.sqrt(1.4 * 20 / 0.5), rel=1e-14)
    assert fe.max_wave_speed(u, 1) == pytest.approx(0.2 + np.sqrt(1.4 * 20 / 0.5), rel=1e-14)


def test_entropy_variables_match_gradient(pairs):
    u = pairs[0][:200]
    w = fe.entropy_variables(u)
    for k in range(4):
        e = np.zeros_like(u)
        e[:, k] = 1e-7 * np.maximum(np.abs(u[:, k]), 1.0)
        grad = (fe.entropy(u + e) - fe.entropy(u - e)) / (2 * e[:, k])
        np.testing.assert_allclose(w[:, k], grad, rtol=1e-6, atol=1e-6)


def test_mass_dissipation_reconstructs_ec_mass_flux(pairs):
    ul, ur = pairs
    r = fe.mass_dissipation_coefficient_ec(ul, ur)
    central = fe.flux_central_euler(ul, ur)[..., 0]
    ec = fe.flux_chandrashekar_ec(ul, ur)[..., 0]
    drho = ur[..., 0] - ul[..., 0]
    # mass fluxes agree once the pressure-weighted velocity difference is accounted for
    np.testing.assert_allclose(central - 0.5 * r * drho, ec, atol=1e-12, rtol=1e-12)


def test_mass_dissipation_sign_follows_density_slope():
    ul = fe.state_from_primitive(1.5, 0.1, 0.2, 20.0)
    ur = fe.state_from_primitive(0.5, 0.1, 0.2, 20.0)
    assert fe.mass_dissipation_coefficient_ec(ul, ur) < 0
    assert fe.mass_dissipation_coefficient_ec(ur, ul) > 0
    rest = fe.state_from_primitive(np.array([1.0, 2.0]), 0.0, 0.0, 1.0)
    assert fe.mass_dissipation_coefficient_ec(rest[0], rest[1]) == 0.0


def test_inadmissible_state_rejected():
    bad = fe.state_from_primitive(-0.1, 0.0, 0.0, 1.0)
    assert not fe.is_admissible(bad)
    with pytest.raises(fe.InadmissibleStateError):
        fe.check_admissible(bad)
    with pytest.raises(ValueError):
        fe.physical_flux(bad, 2)
