"""Fixed-step RK4 integration for planar oscillators and variational systems.

Vector fields are callables ``vf(state) -> deriv`` where ``state`` has shape
``(..., d)``; batches of initial conditions integrate in lockstep, which keeps
the grid sweeps elsewhere in the toolkit vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStep, NonFiniteState

__all__ = [
    "Trajectory",
    "TangentTrajectory",
    "integrate",
    "integrate_with_tangent",
    "rk4_step",
]


@dataclass(frozen=True)
class Trajectory:
    """Densely sampled solution of a planar ODE.

    ``states`` has shape ``(n_times, ..., 2)``; the trailing axis is either
    ``(theta, r)`` or ``(x, y)`` depending on ``coords``.
    """

    times: np.ndarray
    states: np.ndarray
    step_size: float
    coords: str = "polar"

    def __post_init__(self):
        if self.states.shape[0] != self.times.shape[0]:
            raise ValueError("states length must equal times length")
        if self.coords not in ("polar", "cartesian"):
            raise ValueError(f"unknown coordinate tag {self.coords!r}")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def validate(self):
        dt = np.diff(self.times)
        if not np.allclose(dt, self.step_size, rtol=1e-12, atol=0.0):
            raise ValueError("times are not uniformly spaced at step_size")
        if self.coords == "polar" and np.any(self.states[..., 1] <= 0):
            raise ValueError("polar trajectory has non-positive radius")


@dataclass(frozen=True)
class TangentTrajectory:
    """Flow plus the fundamental solution M(t) of the variational equation."""

    base: Trajectory
    tangent: np.ndarray  # (n_times, 2, 2)

    def __post_init__(self):
        if self.tangent.shape[0] != self.base.times.shape[0]:
            raise ValueError("tangent length must equal times length")


def rk4_step(vf, state: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step of size h."""
    k1 = vf(state)
    k2 = vf(state + 0.5 * h * k1)
    k3 = vf(state + 0.5 * h * k2)
    k4 = vf(state + h * k3)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _n_steps(duration: float, step: float) -> int:
    if step <= 0:
        raise InvalidStep(f"step must be positive, got {step}")
    if duration < step:
        raise InvalidStep(f"duration {duration} smaller than step {step}")
    return int(round(duration / step))


def integrate(vf, state0, duration: float, step: float, coords: str = "polar") -> Trajectory:
    """Integrate ``vf`` from ``state0`` with fixed-step RK4.

    Samples at t = 0, step, ..., n*step with n = round(duration/step).
    ``state0`` may be a single state ``(d,)`` or a batch ``(..., d)``.
    """
    state0 = np.asarray(state0, dtype=float)
    n = _n_steps(duration, step)
    out = np.empty((n + 1,) + state0.shape)
    out[0] = state0
    state = state0
    for i in range(n):
        state = rk4_step(vf, state, step)
        out[i + 1] = state
        if not np.all(np.isfinite(state)):
            raise NonFiniteState(f"non-finite state at t={(i + 1) * step}")
    times = np.arange(n + 1) * step
    return Trajectory(times=times, states=out, step_size=step, coords=coords)


def integrate_with_tangent(vf, jacobian, state0, duration: float, step: float,
                           coords: str = "polar") -> TangentTrajectory:
    """Integrate the flow together with dM/dt = DF(x(t)) M, M(0) = I."""
    state0 = np.asarray(state0, dtype=float)
    if state0.shape != (2,):
        raise ValueError("tangent integration expects a single planar state")
    n = _n_steps(duration, step)

    def aug_vf(aug):
        x = aug[:2]
        m = aug[2:].reshape(2, 2)
        dx = vf(x)
        dm = jacobian(x) @ m
        return np.concatenate([dx, dm.ravel()])

    aug = np.concatenate([state0, np.eye(2).ravel()])
    states = np.empty((n + 1, 2))
    tangents = np.empty((n + 1, 2, 2))
    states[0] = state0
    tangents[0] = np.eye(2)
    for i in range(n):
        aug = rk4_step(aug_vf, aug, step)
        if not np.all(np.isfinite(aug)):
            raise NonFiniteState(f"non-finite state at t={(i + 1) * step}")
        states[i + 1] = aug[:2]
        tangents[i + 1] = aug[2:].reshape(2, 2)
    times = np.arange(n + 1) * step
    base = Trajectory(times=times, states=states, step_size=step, coords=coords)
    return TangentTrajectory(base=base, tangent=tangents)
