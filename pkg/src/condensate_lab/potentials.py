"""Repulsive radial interaction potentials and their short-range rescaling.

Supported families: zero, soft-sphere (piecewise constant ball), gaussian,
and tabulated radial samples.  A potential knows its decay exponent sigma,
an effective range used to size radial grids, and the breakpoints where
its evaluator is non-smooth.  Rescaling by N maps V to N^2 V(N r), which
divides the effective range and the scattering length by N.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    """Radial repulsive potential V(r) >= 0.

    family: one of "zero", "soft-sphere", "gaussian", "tabulated"
    params: family parameters (see factory functions below)
    sigma: decay exponent in V(r) <= C (1+r)^(-sigma); inf for compact
        or super-exponential tails.  Stored metadata; the sigma > 5
        hypothesis is reported, not enforced.
    """

    family: str
    params: dict
    sigma: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    range_hint: float
    breakpoints: tuple[float, ...] = ()

    def __call__(self, r):
        return self.evaluator(np.asarray(r, dtype=np.float64))

    @property
    def meets_decay_hypothesis(self) -> bool:
        return self.sigma > 5.0

    def describe(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}


@dataclass(frozen=True)
class ScaledPotential:
    """V_N(r) = N^2 V(N r); evaluator shares the base arithmetic path."""

    base: Potential
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise PotentialError("invalid scale: N must be >= 1")

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        return self.N**2 * self.base.evaluator(self.N * r)

    @property
    def evaluator(self):
        return self.__call__

    @property
    def family(self) -> str:
        return self.base.family

    @property
    def sigma(self) -> float:
        return self.base.sigma

    @property
    def range_hint(self) -> float:
        return self.base.range_hint / self.N

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(b / self.N for b in self.base.breakpoints)

    def describe(self) -> dict:
        d = self.base.describe()
        d["scale_N"] = self.N
        return d


def zero_potential() -> Potential:
    return Potential(
        family="zero",
        params={},
        sigma=np.inf,
        evaluator=lambda r: np.zeros_like(np.asarray(r, dtype=np.float64)),
        range_hint=1.0,
    )


def soft_sphere(v0: float, radius: float) -> Potential:
    if v0 < 0:
        raise PotentialError("repulsivity violated: v0 < 0")
    if radius <= 0:
        raise PotentialError("radius must be positive")
    v0 = float(v0)
    radius = float(radius)

    def ev(r):
        r = np.asarray(r, dtype=np.float64)
        return np.where(r <= radius, v0, 0.0)

    return Potential(
        family="soft-sphere",
        params={"v0": v0, "radius": radius},
        sigma=np.inf,
        evaluator=ev,
        range_hint=radius,
        breakpoints=(radius,),
    )


def gaussian(v0: float, width: float) -> Potential:
    if v0 < 0:
        raise PotentialError("repulsivity violated: v0 < 0")
    if width <= 0:
        raise PotentialError("width must be positive")
    v0 = float(v0)
    width = float(width)

    def ev(r):
        r = np.asarray(r, dtype=np.float64)
        return v0 * np.exp(-((r / width) ** 2))

    return Potential(
        family="gaussian",
        params={"v0": v0, "width": width},
        sigma=np.inf,
        evaluator=ev,
        range_hint=6.0 * width,
    )


def tabulated(r_samples, v_samples, sigma: float = np.inf) -> Potential:
    r_samples = np.asarray(r_samples, dtype=np.float64)
    v_samples = np.asarray(v_samples, dtype=np.float64)
    if r_samples.ndim != 1 or r_samples.shape != v_samples.shape:
        raise PotentialError("tabulated data must be two matching 1-d columns")
    if not np.all(np.diff(r_samples) > 0):
        raise PotentialError("tabulated radii must be strictly ascending")
    if np.any(v_samples < 0):
        raise PotentialError("repulsivity violated")
    interp = PchipInterpolator(r_samples, v_samples, extrapolate=False)
    r_lo, r_hi = float(r_samples[0]), float(r_samples[-1])
    v_lo = float(v_samples[0])

    def ev(r):
        r = np.asarray(r, dtype=np.float64)
        out = np.where(r < r_lo, v_lo, 0.0)
        inside = (r >= r_lo) & (r <= r_hi)
        if np.any(inside):
            vals = interp(r[inside])
            out = out.astype(np.float64)
            out[inside] = np.maximum(vals, 0.0)
        return out

    return Potential(
        family="tabulated",
        params={"r": r_samples.tolist(), "v": v_samples.tolist()},
        sigma=float(sigma),
        evaluator=ev,
        range_hint=r_hi,
    )


def tabulated_from_csv(path, sigma: float = np.inf) -> Potential:
    rs, vs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rs.append(float(row[0]))
                vs.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise PotentialError(f"bad tabulated row {row!r}") from exc
    return tabulated(rs, vs, sigma=sigma)


def scale(p: Potential, N: int) -> ScaledPotential:
    """Short-range rescaling V -> N^2 V(N r)."""
    if int(N) != N or N < 1:
        raise PotentialError("invalid scale: N must be a positive integer")
    return ScaledPotential(base=p, N=int(N))


@dataclass(frozen=True)
class PotentialNorms:
    l1: float
    l2: float
    l3half: float
    first_moment: float
    second_moment_sup: float
    hardy_integral: float
    rho: float

    def as_dict(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "l3half": self.l3half,
            "first_moment": self.first_moment,
            "second_moment_sup": self.second_moment_sup,
            "hardy_integral": self.hardy_integral,
            "rho": self.rho,
        }


def _radial_integral(p, weight, quad_opts) -> float:
    """integral over R^3 of weight(r, V(r)) reduced to 4 pi int r^2 ... dr."""
    ev = p.evaluator

    def f(r):
        return 4.0 * np.pi * weight(r, float(ev(np.asarray([r]))[0]))

    edges = [0.0, *p.breakpoints, max(4.0 * p.range_hint, 1.0)]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = quad(f, a, b, **quad_opts)
        total += val
    tail, _ = quad(f, edges[-1], np.inf, **quad_opts)
    return total + tail


def _second_moment_sup(p) -> float:
    fam = p.family
    if fam == "zero":
        return 0.0
    if fam == "soft-sphere":
        if isinstance(p, ScaledPotential):
            v0 = p.base.params["v0"] * p.N**2
            radius = p.base.params["radius"] / p.N
        else:
            v0 = p.params["v0"]
            radius = p.params["radius"]
        return v0 * radius**2
    if fam == "gaussian":
        if isinstance(p, ScaledPotential):
            v0 = p.base.params["v0"] * p.N**2
            width = p.base.params["width"] / p.N
        else:
            v0 = p.params["v0"]
            width = p.params["width"]
        return v0 * width**2 / np.e
    # tabulated: dense scan; r^2 V is bounded on the compact support
    rr = np.linspace(0.0, p.range_hint, 20001)
    return float(np.max(rr**2 * p.evaluator(rr)))


def norms(p: Potential | ScaledPotential) -> PotentialNorms:
    """Lp norms, moments and the dimensionless size parameter of V.

    Entries are adaptive radial quadratures (relative error <= 1e-8);
    rho = sup |x|^2 V + int V / |x|.
    """
    if p.sigma <= 3.0:
        raise PotentialError("divergent norm: decay exponent sigma <= 3")
    if p.family == "zero":
        return PotentialNorms(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    opts = {"epsabs": 1e-13, "epsrel": 1e-10, "limit": 200}
    l1 = _radial_integral(p, lambda r, v: r**2 * v, opts)
    l2sq = _radial_integral(p, lambda r, v: r**2 * v**2, opts)
    l32 = _radial_integral(p, lambda r, v: r**2 * v**1.5, opts)
    first = _radial_integral(p, lambda r, v: r**3 * v, opts)
    hardy = _radial_integral(p, lambda r, v: r * v, opts)
    sup2 = _second_moment_sup(p)
    return PotentialNorms(
        l1=l1,
        l2=float(np.sqrt(l2sq)),
        l3half=float(l32 ** (2.0 / 3.0)),
        first_moment=first,
        second_moment_sup=sup2,
        hardy_integral=hardy,
        rho=sup2 + hardy,
    )


def born_scattering_length(p) -> float:
    """First Born approximation (1/8 pi) int V; upper bound for V >= 0."""
    if p.family == "zero":
        return 0.0
    return norms(p).l1 / (8.0 * np.pi)


def unit_l1(p: Potential) -> Potential:
    """Rescale the amplitude so that int V = 1."""
    l1 = norms(p).l1
    if l1 <= 0.0:
        raise PotentialError("cannot normalize a vanishing potential")
    base_ev = p.evaluator
    return Potential(
        family=p.family,
        params={**p.params, "l1_rescale": 1.0 / l1},
        sigma=p.sigma,
        evaluator=lambda r: base_ev(r) / l1,
        range_hint=p.range_hint,
        breakpoints=p.breakpoints,
    )


def from_config(spec: dict) -> Potential:
    """Build a potential from its {family, params} serialization."""
    fam = spec.get("family")
    if fam == "zero":
        return zero_potential()
    if fam == "soft-sphere":
        return soft_sphere(spec["v0"], spec["radius"])
    if fam == "gaussian":
        return gaussian(spec["v0"], spec["width"])
    if fam == "tabulated":
        sigma = float(spec.get("sigma", np.inf))
        if "path" in spec:
            return tabulated_from_csv(spec["path"], sigma=sigma)
        return tabulated(spec["r"], spec["v"], sigma=sigma)
    raise PotentialError(f"unknown potential family: {fam!r}")
