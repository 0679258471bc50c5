"""Zero-energy scattering, phase shifts, and the s-wave scattering transform.

The radial problem is -u'' + (1/2) V u = k^2 u on the half line with
u(0) = 0.  At k = 0 the solution is affine beyond the range of V and its
intercept is the scattering length; three independent routes to that number
are provided (asymptotic fit, weighted integral of the profile, and the
low-k limit of the s-wave phase shift).

The transform built here diagonalizes -d^2/dr^2 + (1/2) V with multiplier
k^2: regular solutions u_k normalized to sin(k r + delta(k)) at infinity
form the analysis/synthesis kernels, and the composition
(interacting synthesis) o (free sine analysis) realizes the two-body wave
operator on the radially symmetric sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .potentials import PotentialError, born_scattering_length
from .radial import RadialGrid, build_grid, half_step_samples


@dataclass(frozen=True)
class GridSpec:
    rmax: float | None = None
    h: float | None = None
    fit_lo: float = 0.6
    fit_hi: float = 0.9


def _default_zero_energy_grid(p, spec: GridSpec | None) -> tuple[RadialGrid, GridSpec]:
    spec = spec or GridSpec()
    rng = max(p.range_hint, 1e-6)
    if spec.rmax is not None:
        rmax = spec.rmax
    else:
        a0_guess = abs(born_scattering_length(p))
        rmax = max(50.0 * rng, 50.0 * a0_guess)
    if rmax < 25.0 * rng:
        raise ValueError("R_max below 25 effective ranges")
    h = spec.h if spec.h is not None else rng / 200.0
    return build_grid(rmax, h, breakpoints=p.breakpoints), spec


def _check_repulsive(p, grid: RadialGrid):
    vals = p(grid.r)
    if np.any(vals < 0):
        raise PotentialError("repulsivity violated: V < 0 sample")


def potential_node_samples(p, grid: RadialGrid) -> np.ndarray:
    """V at the grid nodes, with jump nodes carrying the two-sided average.

    With piece-aligned Simpson weights this makes node-sampled integrals of
    V times a continuous factor correct to full order: the O(h) errors of
    the two adjacent pieces cancel exactly.
    """
    vals = np.asarray(p(grid.r), dtype=np.float64).copy()
    eps = 1e-9 * grid.h
    for b in grid.breakpoints:
        idx = int(round(b / grid.h))
        left = float(p(np.asarray([b - eps]))[0])
        right = float(p(np.asarray([b + eps]))[0])
        vals[idx] = 0.5 * (left + right)
    return vals


def _integrate_radial(p, grid: RadialGrid, k2: np.ndarray, r_stop: float | None = None):
    """March u'' = (V/2 - k^2) u from u(0)=0, u'(0)=1 over the grid pieces.

    Returns (U, up_end, i_stop): U holds u at nodes 0..i_stop per k column.
    """
    k2 = np.atleast_1d(np.asarray(k2, dtype=np.float64))
    nk = k2.shape[0]
    if r_stop is None:
        i_stop = grid.n - 1
    else:
        i_stop = min(grid.n - 1, int(np.ceil(r_stop / grid.h - 1e-9)))
    U = np.empty((i_stop + 1, nk))
    u = np.zeros(nk)
    up = np.ones(nk)
    U[0] = u
    for sl in grid.piece_slices():
        ia = sl.start
        ib = min(sl.stop - 1, i_stop)
        if ib <= ia:
            break
        nsteps = ib - ia
        q_half = 0.5 * half_step_samples(
            p, grid.r[ia], grid.h, nsteps, grid.r[ia], grid.r[ib]
        )
        block, u, up = _kernels.rk4_radial_batch(q_half, k2, grid.h, u, up)
        U[ia : ib + 1] = block
        if ib == i_stop:
            break
    return U, up, i_stop


@dataclass
class ZeroEnergySolution:
    grid: RadialGrid
    u: np.ndarray
    a0_asym: float
    a0_int: float
    fit_window: tuple[float, float]
    fit_nonlinearity: float
    residual: float

    @property
    def f(self) -> np.ndarray:
        """Profile f(r) = u(r)/r with the r -> 0 limit filled in."""
        out = np.empty_like(self.u)
        out[1:] = self.u[1:] / self.grid.r[1:]
        # u(0) = 0 and u ~ u'(0) r near the origin
        out[0] = (4.0 * self.u[1] - self.u[2]) / (2.0 * self.grid.h)
        return out


def _ode_residual(p, grid: RadialGrid, u: np.ndarray) -> float:
    worst = 0.0
    scale = max(np.max(np.abs(u)), 1.0)
    for sl in grid.piece_slices():
        seg = u[sl]
        if seg.shape[0] < 5:
            continue
        rr = grid.r[sl][1:-1]
        upp = (seg[2:] - 2.0 * seg[1:-1] + seg[:-2]) / grid.h**2
        res = upp - 0.5 * p(rr) * seg[1:-1]
        denom = scale * (0.5 * np.max(np.abs(p(rr))) + 1.0)
        worst = max(worst, float(np.max(np.abs(res)) / denom))
    return worst


def solve_zero_energy(p, grid_spec: GridSpec | None = None) -> ZeroEnergySolution:
    """Outward integration of the k = 0 radial problem plus affine fit.

    The returned u is rescaled so that u(r) = r - a0 beyond the potential;
    the scattering length a0_asym is the intercept of the least-squares
    affine fit over the fit window, and a0_int the weighted-profile value.
    """
    grid, spec = _default_zero_energy_grid(p, grid_spec)
    _check_repulsive(p, grid)
    U, _, _ = _integrate_radial(p, grid, np.array([0.0]))
    u = U[:, 0]
    lo, hi = spec.fit_lo * grid.rmax, spec.fit_hi * grid.rmax
    mask = (grid.r >= lo) & (grid.r <= hi)
    rr, uu = grid.r[mask], u[mask]
    alpha, beta = np.polyfit(rr, uu, 1)
    dev = float(np.max(np.abs(uu - (alpha * rr + beta))))
    nonlin = dev / (abs(alpha) * grid.rmax)
    if nonlin > 1e-6:
        raise RuntimeError("asymptotic regime not reached (increase R_max)")
    a0 = -beta / alpha
    u = u / alpha
    sol = ZeroEnergySolution(
        grid=grid,
        u=u,
        a0_asym=float(a0),
        a0_int=np.nan,
        fit_window=(lo, hi),
        fit_nonlinearity=nonlin,
        residual=_ode_residual(p, grid, u),
    )
    sol.a0_int = scattering_length_integral(sol, p)
    return sol


def scattering_length_integral(sol: ZeroEnergySolution, p) -> float:
    """(1/8 pi) int V f over R^3, reduced to (1/2) int V(r) u(r) r dr."""
    g = sol.grid
    vals = 0.5 * potential_node_samples(p, g) * sol.u * g.r
    out = float(np.sum(g.weights * vals))
    if not np.isfinite(out):
        raise RuntimeError("divergent quadrature in scattering length integral")
    return out


def zero_energy_state_integral(p, sol: ZeroEnergySolution | None = None) -> dict:
    """Both sides of int V f = 8 pi a0 and their relative gap."""
    sol = sol or solve_zero_energy(p)
    integral = 8.0 * np.pi * scattering_length_integral(sol, p)
    target = 8.0 * np.pi * sol.a0_asym
    denom = max(abs(target), 1e-300)
    gap = abs(integral - target) / denom if abs(target) > 1e-14 else abs(integral - target)
    return {"integral": integral, "eight_pi_a0": target, "relative_gap": gap}


@dataclass(frozen=True)
class PhaseShift:
    k: float
    delta0: float


def phase_shift(p, k: float) -> PhaseShift:
    """s-wave phase shift by outward integration of the phase ODE."""
    if k <= 0:
        raise ValueError("phase shift requires k > 0")
    if not np.isfinite(p.range_hint) or p.sigma <= 1.0:
        raise PotentialError("non-decaying tail")
    rng = max(p.range_hint, 1e-6)
    r_end = rng if p.breakpoints else 1.4 * rng
    h = min(rng / 400.0, 0.15 / k)
    nsteps = int(np.ceil(r_end / h / 2.0)) * 2
    h = r_end / nsteps
    delta = 0.0
    edges = [0.0, *[b for b in p.breakpoints if b < r_end], r_end]
    for a, b in zip(edges[:-1], edges[1:]):
        seg_steps = max(2, int(round((b - a) / h)))
        hh = (b - a) / seg_steps
        q_half = 0.5 * half_step_samples(p, a, hh, seg_steps, a, b)
        delta = _kernels.rk4_phase(q_half, k, hh, r0=a, d0=delta)
    return PhaseShift(k=float(k), delta0=float(delta))


# ---------------------------------------------------------------------------
# Scattering transform
# ---------------------------------------------------------------------------


def _gauss_panels(k_max: float, n_k: int, per_panel: int = 16):
    n_panels = max(1, int(np.ceil(n_k / per_panel)))
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(0.0, k_max, n_panels + 1)
    ks, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        ks.append(mid + half * x)
        ws.append(half * w)
    return np.concatenate(ks), np.concatenate(ws)


@dataclass
class ScatteringTransform:
    """Generalized sine-basis pair for -d^2/dr^2 + V/2 on [0, rmax].

    states[i] is the regular solution at k[i] normalized to unit asymptotic
    amplitude; sines[i] is sin(k[i] r).  Forward maps take u(r) samples to
    coefficients on the k grid, inverse maps synthesize back, and the wave
    operator is inverse-interacting after forward-free (adjoint: swap).
    """

    potential: object
    grid: RadialGrid
    k: np.ndarray
    wk: np.ndarray
    delta0: np.ndarray
    states: np.ndarray = field(repr=False)
    sines: np.ndarray = field(repr=False)
    completeness_defect: float = np.nan

    _SQ = np.sqrt(2.0 / np.pi)

    def forward_free(self, u: np.ndarray) -> np.ndarray:
        return self._SQ * (self.sines @ (self.grid.weights * u))

    def inverse_free(self, c: np.ndarray) -> np.ndarray:
        return self._SQ * ((self.wk * c) @ self.sines)

    def forward_interacting(self, u: np.ndarray) -> np.ndarray:
        return self._SQ * (self.states @ (self.grid.weights * u))

    def inverse_interacting(self, c: np.ndarray) -> np.ndarray:
        return self._SQ * ((self.wk * c) @ self.states)

    def wave_operator(self, u: np.ndarray) -> np.ndarray:
        return self.inverse_interacting(self.forward_free(u))

    def wave_operator_adjoint(self, u: np.ndarray) -> np.ndarray:
        return self.inverse_free(self.forward_interacting(u))

    def multiplier(self) -> np.ndarray:
        return self.k**2


def _calibration_packet(grid: RadialGrid, k_max: float, r0: float = 0.0) -> np.ndarray:
    sigma = max(8.0 / k_max, 12.0 * grid.h)
    u = grid.r * (
        np.exp(-((grid.r - r0) ** 2) / (2.0 * sigma**2))
        + np.exp(-((grid.r + r0) ** 2) / (2.0 * sigma**2))
    )
    u[0] = u[-1] = 0.0
    return u / grid.norm(u)


def build_transform(
    p,
    k_max: float,
    n_k: int,
    grid_spec: GridSpec | None = None,
    tol: float = 1e-5,
    per_panel: int = 16,
) -> ScatteringTransform:
    """Construct the s-wave transform pair for potential p.

    n_k is raised automatically if the k grid would under-resolve the
    oscillation of the synthesis kernels at rmax; a completeness defect
    above tol raises "insufficient k resolution".
    """
    spec = grid_spec or GridSpec()
    rng = max(p.range_hint, 1e-6)
    rmax = spec.rmax if spec.rmax is not None else max(30.0, 5.0 * rng + 20.0)
    h = spec.h if spec.h is not None else min(rng / 200.0, np.pi / (20.0 * k_max), 0.02)
    grid = build_grid(rmax, h, breakpoints=p.breakpoints)
    _check_repulsive(p, grid)

    n_needed = int(np.ceil(4.5 * k_max * grid.rmax / (2.0 * np.pi)))
    n_k = max(n_k, n_needed)
    k, wk = _gauss_panels(k_max, n_k, per_panel)

    r_match = rng if p.breakpoints else min(1.3 * rng, 0.8 * grid.rmax)
    U, up_end, i_stop = _integrate_radial(p, grid, k**2, r_stop=r_match)
    r_m = grid.r[i_stop]
    u_m = U[i_stop]
    amp = np.hypot(u_m, up_end / k)
    if np.any(amp < 1e-8):
        raise RuntimeError("near-singular normalization: resonance suspicion")
    delta = np.arctan2(k * u_m, up_end) - k * r_m

    states = np.empty((k.shape[0], grid.n))
    states[:, : i_stop + 1] = (U / amp).T
    tail_r = grid.r[i_stop + 1 :]
    states[:, i_stop + 1 :] = np.sin(np.outer(k, tail_r) + delta[:, None])
    sines = np.sin(np.outer(k, grid.r))

    t = ScatteringTransform(
        potential=p,
        grid=grid,
        k=k,
        wk=wk,
        delta0=delta,
        states=states,
        sines=sines,
    )
    # Two calibration probes: a wave-operator round trip on a centered packet
    # and a plain interacting round trip on a packet clear of the core (for a
    # discontinuous V the interacting coefficients of a core-hugging packet
    # have algebraic k tails, which is truncation physics, not grid error).
    sigma = max(8.0 / k_max, 12.0 * grid.h)
    cal0 = _calibration_packet(grid, k_max)
    cal_off = _calibration_packet(grid, k_max, r0=max(2.0 * rng, 4.0 * sigma))
    rt_int = t.inverse_interacting(t.forward_interacting(cal_off))
    rt_wave = t.wave_operator_adjoint(t.wave_operator(cal0))
    defect = max(grid.norm(rt_int - cal_off), grid.norm(rt_wave - cal0))
    t.completeness_defect = float(defect)
    if defect > tol:
        raise RuntimeError(
            f"insufficient k resolution: completeness defect {defect:.3e} > {tol:.1e}"
        )
    return t


def apply_wave_operator(t: ScatteringTransform, u: np.ndarray, adjoint: bool = False):
    """Apply W (or W*) to u(r) samples on the transform grid."""
    u = np.asarray(u)
    if u.shape != (t.grid.n,):
        raise ValueError("radial samples do not match the transform grid")
    if np.iscomplexobj(u):
        op = t.wave_operator_adjoint if adjoint else t.wave_operator
        return op(u.real) + 1j * op(u.imag)
    return t.wave_operator_adjoint(u) if adjoint else t.wave_operator(u)


def apply_hamiltonian(grid: RadialGrid, p, u: np.ndarray) -> np.ndarray:
    """(-d^2/dr^2 + V/2) u via the sine-spectral second derivative."""
    c = grid.dst(u)
    k = grid.modes()
    upp = grid.idst(-(k**2) * c)
    return -upp + 0.5 * potential_node_samples(p, grid) * u


def l1_ratio_diagnostic(t: ScatteringTransform, u: np.ndarray, adjoint: bool = False) -> float:
    """||W u||_1 / ||u||_1 on the 3-d radial representation (no assertion)."""
    w = apply_wave_operator(t, u, adjoint=adjoint)
    l1 = np.sqrt(4.0 * np.pi) * np.sum(t.grid.weights * np.abs(u) * t.grid.r)
    l1w = np.sqrt(4.0 * np.pi) * np.sum(t.grid.weights * np.abs(w) * t.grid.r)
    return float(l1w / l1)
