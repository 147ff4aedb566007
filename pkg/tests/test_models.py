import numpy as np
import pytest

from pharec import models
from pharec.errors import NoAnalyticForm, NonPositiveRadius, UnknownKind

KINDS = ("radial_isochron_clock", "canonical", "van_der_pol", "wilson_cowan")


def test_default_specs_are_unidirectional():
    for kind in KINDS:
        spec = models.default_spec(kind)
        assert spec.n_oscillators == 2
        assert spec.coupling[0, 1] == 0.0
        assert spec.coupling[1, 0] > 0.0


def test_unknown_kind_raises():
    with pytest.raises(UnknownKind):
        models.default_spec("pendulum")


def test_spec_round_trip():
    for kind in KINDS:
        spec = models.default_spec(kind)
        again = models.ModelSpec.from_dict(spec.to_dict())
        assert again.kind == spec.kind
        np.testing.assert_array_equal(again.coupling, spec.coupling)


def test_radial_isochron_clock_uncoupled_field():
    spec = models.default_spec("radial_isochron_clock")
    vf = models.uncoupled_vf(spec, 1)
    a = spec.param("a", 1)
    for r in (0.5, 1.0, 1.7):
        d = vf(np.array([0.3, r]))
        assert d[0] == pytest.approx(1.0)
        assert d[1] == pytest.approx(a * r * (1.0 - r ** 2))


def test_canonical_uncoupled_field():
    spec = models.default_spec("canonical")
    vf = models.uncoupled_vf(spec, 0)
    a, alpha = spec.param("a", 0), spec.param("alpha", 0)
    d = vf(np.array([1.0, 1.3]))
    assert d[0] == pytest.approx(1.0 + alpha * a * 1.3 ** 2)
    assert d[1] == pytest.approx(alpha * 1.3 * (1.0 - 1.3 ** 2))


def test_polar_kind_rejects_nonpositive_radius():
    spec = models.default_spec("radial_isochron_clock")
    with pytest.raises(NonPositiveRadius):
        models.eval_model_vf(spec, np.array([[0.0, 1.0], [0.0, -0.1]]))


def test_network_field_coupling_direction():
    spec = models.default_spec("radial_isochron_clock")
    state = np.array([[0.5, 1.1], [1.2, 0.9]])
    net = models.eval_model_vf(spec, state)
    unc = np.stack([models.uncoupled_vf(spec, i)(state[i]) for i in range(2)])
    # Oscillator 0 is undriven, oscillator 1 receives the drive.
    np.testing.assert_allclose(net[0], unc[0])
    assert np.abs(net[1] - unc[1]).max() > 1e-3


def test_jacobians_match_finite_differences():
    h = 1e-6
    for kind in KINDS:
        spec = models.default_spec(kind)
        for i in range(2):
            vf = models.uncoupled_vf(spec, i)
            jac = models.uncoupled_jacobian(spec, i)
            state = np.array([0.4, 0.9])
            num = np.empty((2, 2))
            for k in range(2):
                dp = np.zeros(2)
                dp[k] = h
                num[:, k] = (vf(state + dp) - vf(state - dp)) / (2 * h)
            np.testing.assert_allclose(jac(state), num, atol=1e-6)


def test_wilson_cowan_equilibrium_is_fixed_point():
    spec = models.default_spec("wilson_cowan")
    for i in range(2):
        x0, y0 = models.wc_equilibrium(spec, i)
        d = models.uncoupled_vf(spec, i)(np.array([x0, y0]))
        assert np.abs(d).max() < 1e-12


def test_frames_polar_identity_cartesian_centered():
    for kind in ("radial_isochron_clock", "canonical"):
        frame = models.estimate_frame(models.default_spec(kind), 0)
        assert frame.center == (0.0, 0.0)
        assert frame.orientation == 1.0
    vdp = models.estimate_frame(models.default_spec("van_der_pol"), 0)
    assert vdp.orientation == -1.0
    wc = models.estimate_frame(models.default_spec("wilson_cowan"), 0)
    assert 0.0 < wc.center[0] < 1.0 and 0.0 < wc.center[1] < 1.0


def test_polar_cartesian_round_trip():
    frame = models.ObservableFrame(center=(0.3, -0.2), orientation=-1.0)
    tr = np.array([[0.5, 1.2], [4.0, 0.7]])
    back = models.cart_to_polar(models.polar_to_cart(tr, frame), frame)
    np.testing.assert_allclose(np.mod(back[:, 0], 2 * np.pi),
                               np.mod(tr[:, 0], 2 * np.pi), atol=1e-12)
    np.testing.assert_allclose(back[:, 1], tr[:, 1], atol=1e-12)


def test_polar_field_conversion_consistent():
    spec = models.default_spec("van_der_pol")
    frame = models.estimate_frame(spec, 0)
    polar_vf = models.polar_uncoupled_vf(spec, 0, frame)
    cart_vf = models.uncoupled_vf(spec, 0)
    state = np.array([1.0, 2.0])
    xy = models.polar_to_cart(state, frame)
    f_pol = polar_vf(state)
    # Push the polar derivative back to Cartesian and compare.
    s = frame.orientation
    ang = s * state[0]
    dx = f_pol[1] * np.cos(ang) - state[1] * np.sin(ang) * s * f_pol[0]
    dy = f_pol[1] * np.sin(ang) + state[1] * np.cos(ang) * s * f_pol[0]
    np.testing.assert_allclose([dx, dy], cart_vf(xy), atol=1e-12)


def test_analytic_ground_truth_values():
    spec = models.default_spec("radial_isochron_clock")
    gt = models.analytic_ground_truth(spec, 0)
    assert gt.lam == -2.0 and gt.omega == 1.0
    assert gt.phi(0.7, 1.3) == pytest.approx(0.7)
    assert gt.sigma(0.0, 1.0) == 0.0
    r = 1.2
    sig = gt.sigma(0.0, r)
    assert gt.k_r(0.0, sig) == pytest.approx(r)

    can = models.analytic_ground_truth(models.default_spec("canonical"), 1)
    a, alpha = 1.0, 2.0
    assert can.lam == -2.0 * alpha and can.omega == pytest.approx(1.0 + alpha * a)
    assert can.phi(0.5, 1.4) == pytest.approx(0.5 + a * np.log(1.4))
    s = can.sigma(0.0, 1.4)
    assert can.k_r(0.0, s) == pytest.approx(1.4)
    assert can.k_theta(0.5 + a * np.log(1.4), s) == pytest.approx(0.5)


def test_analytic_forms_missing_for_cartesian_kinds():
    for kind in ("van_der_pol", "wilson_cowan"):
        with pytest.raises(NoAnalyticForm):
            models.analytic_ground_truth(models.default_spec(kind), 0)
        with pytest.raises(NoAnalyticForm):
            models.analytic_reduced_coupling_terms(models.default_spec(kind), 1, 0)


def test_reduced_coupling_tables_scale_with_strength():
    spec = models.default_spec("radial_isochron_clock")
    tables = models.analytic_reduced_coupling_terms(spec, 1, 0)
    eps = spec.coupling[1, 0]
    assert tables["phi"][(0, 0)][("cos", "sin")] == pytest.approx(eps)
    assert tables["sigma"][(0, 0)][("sin", "sin")] == pytest.approx(eps)
    assert tables["phi"][(1, 0)][("cos", "sin")] == pytest.approx(-eps)
    assert tables["phi"][(0, 1)][("cos", "sin")] == pytest.approx(eps)
