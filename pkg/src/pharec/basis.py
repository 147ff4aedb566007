"""Real Fourier-Taylor bases: polynomial in amplitude, trigonometric in angle.

Three layouts are used across the toolkit: single-oscillator rows r^n * {1,
cos k*theta, sin k*theta}, and pairwise rows r_i^mi r_j^mj * f(theta_i) *
g(theta_j) where f runs over {1, cos, sin} harmonics of the oscillator's own
angle and g over {cos, sin} harmonics of the input angle.  The input factor
never contains a constant, so every pairwise element genuinely depends on the
driving oscillator.  Enumeration orders are fixed and exposed as term
descriptor lists so fitted coefficients can be addressed symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch

__all__ = [
    "SingleBasisSpec",
    "PairBasisSpec",
    "FittedSeries",
    "SingleTerm",
    "PairTerm",
    "single_terms",
    "pair_terms",
    "single_row",
    "pair_row",
    "series_eval",
    "series_eval_grad",
]

CONST = "1"
COS = "cos"
SIN = "sin"


@dataclass(frozen=True)
class SingleBasisSpec:
    """Max radial power ``n_max`` and max harmonic ``k_max`` of a single-oscillator basis."""

    n_max: int
    k_max: int

    def __post_init__(self):
        if self.n_max < 0 or self.k_max < 0:
            raise ValueError("basis orders must be nonnegative")

    @property
    def size(self) -> int:
        return (self.n_max + 1) * (2 * self.k_max + 1)

    def to_dict(self) -> dict:
        return {"type": "single", "n_max": self.n_max, "k_max": self.k_max}


@dataclass(frozen=True)
class PairBasisSpec:
    """Pairwise basis over (theta_i, r_i, theta_j, r_j) or the reduced analogue.

    ``mode`` selects the amplitude-power constraint: "observable" enforces
    m_i + m_j <= m_max (total power), "reduced" allows independent powers up
    to m_max each.
    """

    m_max: int
    ki_max: int
    kj_max: int
    mode: str = "observable"

    def __post_init__(self):
        if self.m_max < 0 or self.ki_max < 0 or self.kj_max < 1:
            raise ValueError("need m_max, ki_max >= 0 and kj_max >= 1")
        if self.mode not in ("observable", "reduced"):
            raise ValueError(f"unknown pair basis mode {self.mode!r}")

    def amplitude_pairs(self) -> list[tuple[int, int]]:
        out = []
        for mi in range(self.m_max + 1):
            mj_top = self.m_max - mi if self.mode == "observable" else self.m_max
            for mj in range(mj_top + 1):
                out.append((mi, mj))
        return out

    @property
    def n_own(self) -> int:
        return 2 * self.ki_max + 1

    @property
    def n_inp(self) -> int:
        return 2 * self.kj_max

    @property
    def size(self) -> int:
        return len(self.amplitude_pairs()) * self.n_own * self.n_inp

    def to_dict(self) -> dict:
        return {"type": "pair", "m_max": self.m_max, "ki_max": self.ki_max,
                "kj_max": self.kj_max, "mode": self.mode}


def spec_from_dict(d: dict):
    if d["type"] == "single":
        return SingleBasisSpec(d["n_max"], d["k_max"])
    return PairBasisSpec(d["m_max"], d["ki_max"], d["kj_max"], d["mode"])


@dataclass(frozen=True)
class SingleTerm:
    index: int
    n: int          # radial power
    k: int          # harmonic
    trig: str       # "1", "cos" or "sin"


@dataclass(frozen=True)
class PairTerm:
    index: int
    mi: int
    mj: int
    own_k: int
    own_trig: str   # "1", "cos" or "sin"
    inp_k: int
    inp_trig: str   # "cos" or "sin"


def single_terms(spec: SingleBasisSpec) -> list[SingleTerm]:
    terms = []
    for n in range(spec.n_max + 1):
        terms.append(SingleTerm(len(terms), n, 0, CONST))
        for k in range(1, spec.k_max + 1):
            terms.append(SingleTerm(len(terms), n, k, COS))
            terms.append(SingleTerm(len(terms), n, k, SIN))
    return terms


def pair_terms(spec: PairBasisSpec) -> list[PairTerm]:
    own = [(0, CONST)] + [kt for k in range(1, spec.ki_max + 1)
                          for kt in ((k, COS), (k, SIN))]
    inp = [kt for k in range(1, spec.kj_max + 1) for kt in ((k, COS), (k, SIN))]
    terms = []
    for mi, mj in spec.amplitude_pairs():
        for ok, ot in own:
            for ik, it in inp:
                terms.append(PairTerm(len(terms), mi, mj, ok, ot, ik, it))
    return terms


def _angular_factors(theta: np.ndarray, k_max: int, constant: bool):
    """Stack of {1,} cos k*theta, sin k*theta along a new trailing axis."""
    cols = []
    if constant:
        cols.append(np.ones_like(theta))
    for k in range(1, k_max + 1):
        cols.append(np.cos(k * theta))
        cols.append(np.sin(k * theta))
    return np.stack(cols, axis=-1)


def _angular_dfactors(theta: np.ndarray, k_max: int, constant: bool):
    cols = []
    if constant:
        cols.append(np.zeros_like(theta))
    for k in range(1, k_max + 1):
        cols.append(-k * np.sin(k * theta))
        cols.append(k * np.cos(k * theta))
    return np.stack(cols, axis=-1)


def _powers(r: np.ndarray, n_max: int):
    return np.stack([r ** n for n in range(n_max + 1)], axis=-1)


def _dpowers(r: np.ndarray, n_max: int):
    cols = [np.zeros_like(r)]
    for n in range(1, n_max + 1):
        cols.append(n * r ** (n - 1))
    return np.stack(cols, axis=-1)


def single_row(spec: SingleBasisSpec, theta, radius) -> np.ndarray:
    """Basis row(s) at (theta, radius); broadcasts over leading axes."""
    theta = np.asarray(theta, dtype=float)
    radius = np.asarray(radius, dtype=float)
    pw = _powers(radius, spec.n_max)                       # (..., n_max+1)
    ang = _angular_factors(theta, spec.k_max, True)        # (..., 2k+1)
    return (pw[..., :, None] * ang[..., None, :]).reshape(*pw.shape[:-1], spec.size)


def pair_row(spec: PairBasisSpec, theta_i, r_i, theta_j, r_j) -> np.ndarray:
    theta_i = np.asarray(theta_i, dtype=float)
    r_i = np.asarray(r_i, dtype=float)
    theta_j = np.asarray(theta_j, dtype=float)
    r_j = np.asarray(r_j, dtype=float)
    own = _angular_factors(theta_i, spec.ki_max, True)     # (..., n_own)
    inp = _angular_factors(theta_j, spec.kj_max, False)    # (..., n_inp)
    pairs = spec.amplitude_pairs()
    amp = np.stack([r_i ** mi * r_j ** mj for mi, mj in pairs], axis=-1)
    block = (amp[..., :, None, None] * own[..., None, :, None]
             * inp[..., None, None, :])
    return block.reshape(*amp.shape[:-1], spec.size)


@dataclass(frozen=True)
class FittedSeries:
    """Coefficient vector aligned to a basis spec's enumeration order."""

    spec: object
    coefficients: np.ndarray

    def __post_init__(self):
        if len(self.coefficients) != self.spec.size:
            raise ValueError("coefficient length must equal basis size")

    def coefficient(self, **kwargs) -> float:
        """Look up one coefficient by term attributes, e.g. (n=1, k=0)."""
        terms = (single_terms(self.spec) if isinstance(self.spec, SingleBasisSpec)
                 else pair_terms(self.spec))
        hits = [t for t in terms
                if all(getattr(t, key) == val for key, val in kwargs.items())]
        if len(hits) != 1:
            raise KeyError(f"term lookup {kwargs} matched {len(hits)} terms")
        return float(self.coefficients[hits[0].index])

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(),
                "coefficients": [float(c) for c in self.coefficients]}

    @classmethod
    def from_dict(cls, d: dict) -> "FittedSeries":
        return cls(spec_from_dict(d["spec"]),
                   np.asarray(d["coefficients"], dtype=float))


def series_eval(series: FittedSeries, *point) -> np.ndarray:
    spec = series.spec
    if isinstance(spec, SingleBasisSpec):
        if len(point) != 2:
            raise ArityMismatch("single-oscillator series takes (theta, radius)")
        return single_row(spec, *point) @ series.coefficients
    if len(point) != 4:
        raise ArityMismatch("pairwise series takes (theta_i, r_i, theta_j, r_j)")
    return pair_row(spec, *point) @ series.coefficients


def series_eval_grad(series: FittedSeries, *point):
    """Value and analytic partial derivatives of a fitted series.

    Single series return (value, d/dtheta, d/dradius); pairwise series return
    (value, (d/dtheta_i, d/dtheta_j), (d/dr_i, d/dr_j)).
    """
    spec = series.spec
    q = series.coefficients
    if isinstance(spec, SingleBasisSpec):
        if len(point) != 2:
            raise ArityMismatch("single-oscillator series takes (theta, radius)")
        theta = np.asarray(point[0], dtype=float)
        radius = np.asarray(point[1], dtype=float)
        pw = _powers(radius, spec.n_max)
        dpw = _dpowers(radius, spec.n_max)
        ang = _angular_factors(theta, spec.k_max, True)
        dang = _angular_dfactors(theta, spec.k_max, True)

        def contract(p, a):
            return (p[..., :, None] * a[..., None, :]).reshape(*p.shape[:-1], spec.size) @ q

        return contract(pw, ang), contract(pw, dang), contract(dpw, ang)
    if len(point) != 4:
        raise ArityMismatch("pairwise series takes (theta_i, r_i, theta_j, r_j)")
    ti, ri, tj, rj = (np.asarray(p, dtype=float) for p in point)
    own = _angular_factors(ti, spec.ki_max, True)
    down = _angular_dfactors(ti, spec.ki_max, True)
    inp = _angular_factors(tj, spec.kj_max, False)
    dinp = _angular_dfactors(tj, spec.kj_max, False)
    pairs = spec.amplitude_pairs()
    amp = np.stack([ri ** mi * rj ** mj for mi, mj in pairs], axis=-1)
    damp_i = np.stack([mi * ri ** max(mi - 1, 0) * rj ** mj if mi else np.zeros_like(ri)
                       for mi, mj in pairs], axis=-1)
    damp_j = np.stack([mj * ri ** mi * rj ** max(mj - 1, 0) if mj else np.zeros_like(rj)
                       for mi, mj in pairs], axis=-1)

    def contract(a, o, p):
        block = a[..., :, None, None] * o[..., None, :, None] * p[..., None, None, :]
        return block.reshape(*a.shape[:-1], spec.size) @ q

    value = contract(amp, own, inp)
    dti = contract(amp, down, inp)
    dtj = contract(amp, own, dinp)
    dri = contract(damp_i, own, inp)
    drj = contract(damp_j, own, inp)
    return value, (dti, dtj), (dri, drj)
