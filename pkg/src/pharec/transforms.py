"""Forward and inverse phase-amplitude transformations fitted from matched
observable/reduced coordinate pairs.

The angle maps are fitted as periodic remainders (phi - theta and
theta - phi, wrapped to (-pi, pi]) so the Fourier-Taylor basis applies; the
linear term is restored on evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .averaging import ReducedSample
from .basis import FittedSeries, SingleBasisSpec, series_eval, series_eval_grad, single_row
from .errors import InsufficientSamples
from .limit_cycle import LimitCycle
from .ridge import ridge_fit

__all__ = [
    "TransformSet",
    "generate_ic_grid",
    "fit_inverse_transform",
    "fit_forward_transform",
    "fit_transform_set",
]


@dataclass(frozen=True)
class TransformSet:
    """Fitted maps between observable (theta, r) and reduced (phi, sigma).

    ``inverse_phase`` holds Phi(theta, r) - theta, ``forward_angle`` holds
    K_theta(phi, sigma) - phi; the other two series are the raw amplitude
    maps.  ``r_domain`` and ``sigma_domain`` record the ranges covered by the
    fitting samples.
    """

    inverse_phase: FittedSeries
    inverse_amplitude: FittedSeries
    forward_angle: FittedSeries
    forward_radius: FittedSeries
    r_domain: tuple[float, float]
    sigma_domain: tuple[float, float]

    def phi(self, theta, r):
        return np.asarray(theta, dtype=float) + series_eval(self.inverse_phase, theta, r)

    def sigma(self, theta, r):
        return series_eval(self.inverse_amplitude, theta, r)

    def phi_grad(self, theta, r):
        """(Phi, dPhi/dtheta, dPhi/dr) with the linear angle term included."""
        val, dth, dr = series_eval_grad(self.inverse_phase, theta, r)
        return np.asarray(theta, dtype=float) + val, 1.0 + dth, dr

    def sigma_grad(self, theta, r):
        return series_eval_grad(self.inverse_amplitude, theta, r)

    def k_theta(self, phi, sigma):
        return np.asarray(phi, dtype=float) + series_eval(self.forward_angle, phi, sigma)

    def k_r(self, phi, sigma):
        return series_eval(self.forward_radius, phi, sigma)

    def to_dict(self) -> dict:
        return {
            "inverse_phase": self.inverse_phase.to_dict(),
            "inverse_amplitude": self.inverse_amplitude.to_dict(),
            "forward_angle": self.forward_angle.to_dict(),
            "forward_radius": self.forward_radius.to_dict(),
            "r_domain": list(self.r_domain),
            "sigma_domain": list(self.sigma_domain),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransformSet":
        return cls(
            inverse_phase=FittedSeries.from_dict(d["inverse_phase"]),
            inverse_amplitude=FittedSeries.from_dict(d["inverse_amplitude"]),
            forward_angle=FittedSeries.from_dict(d["forward_angle"]),
            forward_radius=FittedSeries.from_dict(d["forward_radius"]),
            r_domain=tuple(d["r_domain"]),
            sigma_domain=tuple(d["sigma_domain"]),
        )


def generate_ic_grid(cycle: LimitCycle, n_angles: int = 21, n_radii: int = 15,
                     radial_span: tuple[float, float] = (0.75, 1.35)) -> np.ndarray:
    """Observable initial conditions on an angle x relative-radius grid.

    Radii scale the cycle profile: r = u * gamma(theta) for u in the span, so
    the grid follows non-circular cycles.
    """
    angles = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    factors = np.linspace(radial_span[0], radial_span[1], n_radii)
    th = np.repeat(angles, n_radii)
    u = np.tile(factors, n_angles)
    return np.stack([th, u * cycle.gamma_at(th)], axis=1)


def _wrap(x):
    """Wrap to the branch nearest zero, (-pi, pi]."""
    return -(np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi) - np.pi)


def _check_samples(n_samples: int, angles: np.ndarray, spec: SingleBasisSpec):
    if n_samples < 3 * spec.size:
        raise InsufficientSamples(
            f"need at least {3 * spec.size} samples, got {n_samples}")
    bins = np.unique((np.mod(angles, 2.0 * np.pi) / (2.0 * np.pi) * 20).astype(int))
    if bins.size < 18:
        raise InsufficientSamples("samples cover less than 0.9 of the circle")


def fit_inverse_transform(samples: list[ReducedSample], spec: SingleBasisSpec):
    """Fit Phi - theta and Sigma against the observable coordinates.

    Returns (inverse_phase, inverse_amplitude, r_domain, sigma_domain).
    """
    th = np.array([s.theta0 for s in samples])
    r = np.array([s.r0 for s in samples])
    phi = np.array([s.phi0 for s in samples])
    sig = np.array([s.sigma0 for s in samples])
    _check_samples(len(samples), th, spec)
    design = single_row(spec, th, r)
    phase_fit = ridge_fit(design, _wrap(phi - th))
    amp_fit = ridge_fit(design, sig)
    return (FittedSeries(spec, phase_fit.coefficients),
            FittedSeries(spec, amp_fit.coefficients),
            (float(r.min()), float(r.max())),
            (float(sig.min()), float(sig.max())))


def fit_forward_transform(samples: list[ReducedSample], spec: SingleBasisSpec):
    """Fit K_theta - phi and K_r against the reduced coordinates.

    Returns (forward_angle, forward_radius).
    """
    th = np.array([s.theta0 for s in samples])
    r = np.array([s.r0 for s in samples])
    phi = np.array([s.phi0 for s in samples])
    sig = np.array([s.sigma0 for s in samples])
    _check_samples(len(samples), phi, spec)
    design = single_row(spec, phi, sig)
    angle_fit = ridge_fit(design, _wrap(th - phi))
    radius_fit = ridge_fit(design, r)
    return (FittedSeries(spec, angle_fit.coefficients),
            FittedSeries(spec, radius_fit.coefficients))


def fit_transform_set(samples: list[ReducedSample], spec: SingleBasisSpec) -> TransformSet:
    inv_phase, inv_amp, r_dom, sig_dom = fit_inverse_transform(samples, spec)
    fwd_angle, fwd_radius = fit_forward_transform(samples, spec)
    return TransformSet(inverse_phase=inv_phase, inverse_amplitude=inv_amp,
                        forward_angle=fwd_angle, forward_radius=fwd_radius,
                        r_domain=r_dom, sigma_domain=sig_dom)
