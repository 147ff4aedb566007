"""Limit-cycle location, period/frequency estimation, radial Fourier profile
and Floquet exponent via the monodromy matrix.

Works on planar vector fields expressed in polar observable coordinates
(theta, r); theta integrates unwrapped, so Poincare-section crossings are
passages of theta through multiples of 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import ode
from .basis import FittedSeries, SingleBasisSpec, single_row
from .errors import ComplexMultiplier, NoConvergence

__all__ = [
    "LimitCycle",
    "find_limit_cycle",
    "floquet_from_monodromy",
    "k1_oracle",
]

STEPS_PER_PERIOD = 2000
DEFAULT_N_G = 8


@dataclass(frozen=True)
class LimitCycle:
    """Period, frequency, radial profile gamma(theta) and Floquet data."""

    period: float
    omega: float
    gamma: FittedSeries          # r = gamma(theta), pure harmonic series
    anchor: tuple[float, float]  # on-cycle state at theta = 0
    gamma_resid: float = 0.0     # max |r - gamma(theta)| of the profile fit
    lam: float | None = None
    monodromy: np.ndarray | None = None

    def gamma_at(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return single_row(self.gamma.spec, theta, np.ones_like(theta)) @ self.gamma.coefficients

    @property
    def step(self) -> float:
        return self.period / STEPS_PER_PERIOD

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "omega": self.omega,
            "gamma": self.gamma.to_dict(),
            "anchor": [self.anchor[0], self.anchor[1]],
            "gamma_resid": self.gamma_resid,
            "lam": self.lam,
            "monodromy": None if self.monodromy is None else self.monodromy.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LimitCycle":
        return cls(period=d["period"], omega=d["omega"],
                   gamma=FittedSeries.from_dict(d["gamma"]),
                   anchor=(d["anchor"][0], d["anchor"][1]),
                   gamma_resid=d.get("gamma_resid", 0.0),
                   lam=d["lam"],
                   monodromy=None if d["monodromy"] is None else np.asarray(d["monodromy"]))


def _rough_period(vf, state) -> tuple[float, np.ndarray]:
    """Coarse period estimate from 2*pi advances of theta after settling."""
    duration, dt = 100.0, 0.02
    for _ in range(5):
        traj = ode.integrate(vf, state, duration, dt)
        theta = traj.states[:, 0]
        half = theta.shape[0] // 2
        # Crossing times of 2*pi multiples in the second half, linear interp.
        th = theta[half:]
        t = traj.times[half:]
        k_lo = np.ceil(th[0] / (2 * np.pi))
        k_hi = np.floor(th[-1] / (2 * np.pi))
        targets = 2 * np.pi * np.arange(k_lo, k_hi + 1)
        if targets.size >= 3:
            idx = np.searchsorted(th, targets)
            idx = np.clip(idx, 1, th.shape[0] - 1)
            frac = (targets - th[idx - 1]) / (th[idx] - th[idx - 1])
            times = t[idx - 1] + frac * dt
            return float(np.mean(np.diff(times))), traj.final_state
        duration *= 2
    raise NoConvergence("could not estimate a rotation period")


def find_limit_cycle(vf, seed_state, settle_periods_hint: int = 5,
                     n_gamma: int = DEFAULT_N_G) -> LimitCycle:
    """Locate the attracting cycle of a polar vector field.

    Integrates from ``seed_state`` until successive Poincare-section returns
    (theta through multiples of 2*pi, increasing) agree in r within 1e-10,
    then fits the radial profile gamma(theta) over one final period.
    """
    seed_state = np.asarray(seed_state, dtype=float)
    t_est, settled = _rough_period(vf, seed_state)
    step = t_est / STEPS_PER_PERIOD

    state = settled
    t_now = 0.0
    target = 2 * np.pi * np.ceil(state[0] / (2 * np.pi) + 1e-9)
    prev = None        # (time, r) at previous refined crossing
    result = None
    for _ in range(500 * STEPS_PER_PERIOD):
        nxt = ode.rk4_step(vf, state, step)
        if nxt[0] >= target:
            base = state

            def excess(h):
                return ode.rk4_step(vf, base, h)[0] - target

            h = brentq(excess, 0.0, step, xtol=1e-14)
            cross_state = ode.rk4_step(vf, base, h)
            t_cross = t_now + h
            if vf(cross_state)[0] > 0:
                if prev is not None and abs(cross_state[1] - prev[1]) < 1e-10:
                    result = (t_cross - prev[0], cross_state[1])
                    break
                prev = (t_cross, cross_state[1])
            target += 2 * np.pi
        state = nxt
        t_now += step
    if result is None:
        raise NoConvergence("Poincare returns did not converge in 500 periods")

    period, r_star = result
    omega = 2 * np.pi / period
    anchor = np.array([0.0, r_star])
    traj = ode.integrate(vf, anchor, period, period / STEPS_PER_PERIOD)
    spec = SingleBasisSpec(0, n_gamma)
    design = single_row(spec, traj.states[:, 0], np.ones(traj.states.shape[0]))
    coeffs, *_ = np.linalg.lstsq(design, traj.states[:, 1], rcond=None)
    gamma = FittedSeries(spec, coeffs)
    resid = float(np.max(np.abs(design @ coeffs - traj.states[:, 1])))
    return LimitCycle(period=period, omega=omega, gamma=gamma,
                      anchor=(0.0, float(r_star)), gamma_resid=resid)


def floquet_from_monodromy(vf, jacobian, cycle: LimitCycle) -> LimitCycle:
    """Attach the Floquet exponent from one period of the variational flow."""
    tt = ode.integrate_with_tangent(vf, jacobian, np.asarray(cycle.anchor),
                                    cycle.period, cycle.step)
    mono = tt.tangent[-1]
    eigvals = np.linalg.eigvals(mono)
    trivial = int(np.argmin(np.abs(eigvals - 1.0)))
    mult = eigvals[1 - trivial]
    if abs(mult.imag) > 1e-8 * max(1.0, abs(mult.real)) or mult.real <= 0:
        raise ComplexMultiplier(f"nontrivial multiplier {mult} is not positive real")
    lam = float(np.log(mult.real) / cycle.period)
    if lam >= 0:
        raise ComplexMultiplier(f"nontrivial multiplier {mult.real} is not contracting")
    return replace(cycle, lam=lam, monodromy=mono)


def k1_oracle(vf, jacobian, cycle: LimitCycle, lam: float,
              n_phi: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Linear-order forward-response curve K1 on a uniform phase grid.

    Returns (phi values including both endpoints 0 and 2*pi, K1 samples of
    shape (n_phi + 1, 2)).  K1(0) is the contracting monodromy eigenvector,
    normalized to unit radial component.
    """
    sub = max(STEPS_PER_PERIOD // n_phi, 1)
    step = cycle.period / (n_phi * sub)
    tt = ode.integrate_with_tangent(vf, jacobian, np.asarray(cycle.anchor),
                                    cycle.period, step)
    mono = tt.tangent[-1]
    eigvals, eigvecs = np.linalg.eig(mono)
    trivial = int(np.argmin(np.abs(eigvals - 1.0)))
    k1_0 = np.real(eigvecs[:, 1 - trivial])
    if abs(k1_0[1]) < 1e-12:
        raise ComplexMultiplier("contracting eigenvector has no radial component")
    k1_0 = k1_0 / k1_0[1]
    idx = np.arange(n_phi + 1) * sub
    times = tt.base.times[idx]
    phis = cycle.omega * times
    curves = np.exp(-lam * times)[:, None] * np.einsum(
        "nab,b->na", tt.tangent[idx], k1_0)
    return phis, curves
