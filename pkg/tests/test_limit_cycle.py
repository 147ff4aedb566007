import numpy as np
import pytest

from pharec import limit_cycle, models
from pharec.errors import ComplexMultiplier


@pytest.fixture(scope="module")
def ric_cycle():
    spec = models.default_spec("radial_isochron_clock")
    vf = models.uncoupled_vf(spec, 0)
    jac = models.uncoupled_jacobian(spec, 0)
    cycle = limit_cycle.find_limit_cycle(vf, np.array([0.3, 1.4]))
    return spec, vf, jac, limit_cycle.floquet_from_monodromy(vf, jac, cycle)


def test_unit_circle_cycle_located(ric_cycle):
    _, _, _, cycle = ric_cycle
    assert cycle.period == pytest.approx(2 * np.pi, abs=1e-9)
    assert cycle.omega == pytest.approx(1.0, abs=1e-9)
    theta = np.linspace(0, 2 * np.pi, 50)
    np.testing.assert_allclose(cycle.gamma_at(theta), 1.0, atol=1e-9)
    assert cycle.anchor[1] == pytest.approx(1.0, abs=1e-9)
    assert cycle.gamma_resid < 1e-8


def test_floquet_exponent_from_monodromy(ric_cycle):
    spec, _, _, cycle = ric_cycle
    a = spec.param("a", 0)
    assert cycle.lam == pytest.approx(-2.0 * a, rel=1e-8)
    eig = np.sort(np.abs(np.linalg.eigvals(cycle.monodromy)))
    assert eig[1] == pytest.approx(1.0, abs=1e-8)
    assert eig[0] == pytest.approx(np.exp(cycle.lam * cycle.period), rel=1e-6)


def test_canonical_frequency_includes_shear():
    spec = models.default_spec("canonical")
    vf = models.uncoupled_vf(spec, 0)
    cycle = limit_cycle.find_limit_cycle(vf, np.array([0.0, 1.3]))
    a, alpha = spec.param("a", 0), spec.param("alpha", 0)
    assert cycle.omega == pytest.approx(1.0 + alpha * a, rel=1e-9)


def test_cycle_round_trip(ric_cycle):
    _, _, _, cycle = ric_cycle
    again = limit_cycle.LimitCycle.from_dict(cycle.to_dict())
    assert again.period == cycle.period
    assert again.lam == cycle.lam
    np.testing.assert_array_equal(again.monodromy, cycle.monodromy)
    np.testing.assert_array_equal(again.gamma.coefficients,
                                  cycle.gamma.coefficients)


def test_expanding_cycle_rejected(ric_cycle):
    _, vf, _, cycle = ric_cycle

    def bad_jac(state):
        return np.array([[0.0, 0.0], [0.0, 1.0]])  # expanding transverse flow

    with pytest.raises(ComplexMultiplier):
        limit_cycle.floquet_from_monodromy(vf, bad_jac, cycle)


def test_linear_response_curve_periodic(ric_cycle):
    _, vf, jac, cycle = ric_cycle
    phis, curves = limit_cycle.k1_oracle(vf, jac, cycle, cycle.lam, n_phi=128)
    assert phis[0] == 0.0 and phis[-1] == pytest.approx(2 * np.pi, rel=1e-9)
    assert curves[0, 1] == pytest.approx(1.0)
    np.testing.assert_allclose(curves[-1], curves[0], atol=1e-6)


def test_noncircular_cycle_profile():
    spec = models.default_spec("van_der_pol")
    frame = models.estimate_frame(spec, 0)
    vf = models.polar_uncoupled_vf(spec, 0, frame)
    seed = models.cart_to_polar(models._settle_seed(spec, 0), frame)
    cycle = limit_cycle.find_limit_cycle(vf, seed, n_gamma=32)
    theta = np.linspace(0, 2 * np.pi, 200)
    gamma = cycle.gamma_at(theta)
    assert gamma.min() > 0
    assert gamma.max() / gamma.min() > 1.05  # genuinely non-circular
    assert cycle.gamma_resid < 1e-5
