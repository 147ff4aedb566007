import numpy as np
import pytest

from pharec import vf_reconstruction as vfr
from pharec.basis import PairBasisSpec, SingleBasisSpec
from pharec.errors import InsufficientCoverage, NonUniformSampling, TooShort


def synthetic_trial(n=200, step=0.01, n_osc=2):
    t = np.arange(n) * step
    theta = np.stack([1.3 * t + 0.2, 0.9 * t + 1.0], axis=1)[:, :n_osc]
    r = np.stack([1.0 + 0.1 * np.sin(t), 1.1 + 0.05 * np.cos(t)], axis=1)[:, :n_osc]
    return vfr.Trial(times=t, theta=theta, r=r)


def test_differentiation_second_order():
    trial = synthetic_trial()
    dth, dr = vfr.differentiate_trial(trial)
    t = trial.times
    np.testing.assert_allclose(dth[:, 0], 1.3, atol=1e-6)
    np.testing.assert_allclose(dr[:, 0], 0.1 * np.cos(t), atol=1e-4)


def test_differentiation_handles_wrapped_angles():
    t = np.arange(400) * 0.02
    theta = np.mod(2.0 * t, 2 * np.pi)[:, None]
    r = np.ones_like(theta)
    dth, _ = vfr.differentiate_trial(vfr.Trial(times=t, theta=theta, r=r))
    np.testing.assert_allclose(dth, 2.0, atol=1e-8)


def test_nonuniform_and_short_trials_rejected():
    trial = synthetic_trial()
    bad = vfr.Trial(times=trial.times ** 1.01, theta=trial.theta, r=trial.r)
    with pytest.raises(NonUniformSampling):
        vfr.differentiate_trial(bad)
    with pytest.raises(TooShort):
        vfr.differentiate_trial(vfr.Trial(times=trial.times[:4],
                                          theta=trial.theta[:4], r=trial.r[:4]))


def test_fit_recovers_known_separable_field():
    # dtheta_i = 1 + 0.2 r_i cos(theta_i); dr_i = r_i - r_i^2
    # coupling into oscillator 1: 0.3 r_2... none; pure uncoupled network.
    rng = np.random.default_rng(0)
    n_rows = 4000
    theta = rng.uniform(0, 2 * np.pi, size=(n_rows, 2))
    r = rng.uniform(0.7, 1.3, size=(n_rows, 2))
    dth = 1.0 + 0.2 * r * np.cos(theta)
    dr = r - r ** 2 + 0.3 * r[:, ::-1] * np.sin(theta[:, ::-1]) * np.array([0.0, 1.0])
    # Build a fake trial set via a monkeypatched pooled path: use fit directly.
    single = SingleBasisSpec(2, 2)
    pair = PairBasisSpec(2, 1, 1, "observable")
    # Emulate fit_network_vf's internals through the public API by building
    # one long "trial" whose finite differences we bypass: instead fit ridge
    # directly using eval helpers for the assertion.
    from pharec.basis import FittedSeries, pair_row, single_row
    from pharec.ridge import ridge_fit_multi
    uncoupled = {}
    coupling = {}
    for i in range(2):
        j = 1 - i
        design = np.concatenate([single_row(single, theta[:, i], r[:, i]),
                                 pair_row(pair, theta[:, i], r[:, i],
                                          theta[:, j], r[:, j])], axis=1)
        fits = ridge_fit_multi(design, np.stack([dth[:, i], dr[:, i]], axis=1))
        for comp, fit in zip(("theta", "r"), fits):
            uncoupled[(i, comp)] = FittedSeries(single, fit.coefficients[:single.size])
            coupling[(i, j, comp)] = FittedSeries(pair, fit.coefficients[single.size:])
    nvf = vfr.NetworkVF(2, single, pair, uncoupled, coupling)
    # Uncoupled parts recovered.
    q = nvf.uncoupled[(0, "r")]
    assert q.coefficient(n=1, k=0) == pytest.approx(1.0, abs=1e-6)
    assert q.coefficient(n=2, k=0) == pytest.approx(-1.0, abs=1e-6)
    # Driven coupling recovered, silent direction empty.
    c = nvf.coupling[(1, 0, "r")]
    assert c.coefficient(mi=0, mj=1, own_k=0, own_trig="1", inp_k=1,
                         inp_trig="sin") == pytest.approx(0.3, abs=1e-6)
    assert np.abs(nvf.coupling[(0, 1, "r")].coefficients).max() < 1e-8
    # Evaluation helpers agree with the generating field.
    state = np.array([[0.3, 1.1], [1.2, 0.9]])
    out = vfr.eval_network_vf(nvf, state)
    assert out[0, 0] == pytest.approx(1.0 + 0.2 * 1.1 * np.cos(0.3), abs=1e-6)


def test_network_round_trip():
    single = SingleBasisSpec(1, 1)
    pair = PairBasisSpec(1, 1, 1, "observable")
    from pharec.basis import FittedSeries
    rng = np.random.default_rng(2)
    unc = {(i, c): FittedSeries(single, rng.normal(size=single.size))
           for i in range(2) for c in ("theta", "r")}
    cpl = {(i, 1 - i, c): FittedSeries(pair, rng.normal(size=pair.size))
           for i in range(2) for c in ("theta", "r")}
    nvf = vfr.NetworkVF(2, single, pair, unc, cpl)
    again = vfr.NetworkVF.from_dict(nvf.to_dict())
    state = np.array([[0.3, 1.1], [1.2, 0.9]])
    np.testing.assert_allclose(vfr.eval_network_vf(again, state),
                               vfr.eval_network_vf(nvf, state), atol=1e-12)


def test_coverage_check_rejects_arc_data():
    theta = np.full((100, 1), 0.5) + np.linspace(0, 0.1, 100)[:, None]
    with pytest.raises(InsufficientCoverage):
        vfr._check_coverage(theta)
