"""Scattering lengths by three routes, phase shifts, and the transform pair."""

import numpy as np
import pytest

from condensate_lab import potentials as pot
from condensate_lab import scattering as sc
from condensate_lab.propagators import gaussian_packet

SOFT_A0 = 1.0 - np.tanh(1.0)  # interior sinh / exterior affine matching, kappa = 1


@pytest.fixture(scope="module")
def soft():
    return pot.soft_sphere(2.0, 1.0)


@pytest.fixture(scope="module")
def soft_solution(soft):
    return sc.solve_zero_energy(soft)


@pytest.fixture(scope="module")
def soft_transform(soft):
    return sc.build_transform(soft, k_max=8.0, n_k=256)


def test_zero_potential_profile_is_one():
    sol = sc.solve_zero_energy(pot.zero_potential())
    assert abs(sol.a0_asym) < 1e-10
    assert np.max(np.abs(sol.f - 1.0)) < 1e-9


def test_soft_sphere_asymptotic_length(soft_solution):
    assert abs(soft_solution.a0_asym - SOFT_A0) < 1e-8 * SOFT_A0


def test_soft_sphere_interior_profile_closed_form(soft, soft_solution):
    # u(r) = sinh(r) / cosh(1) inside the ball once the exterior slope is 1
    g = soft_solution.grid
    inside = g.r <= 1.0
    exact = np.sinh(g.r[inside]) / np.cosh(1.0)
    assert np.max(np.abs(soft_solution.u[inside] - exact)) < 1e-9


def test_profile_bounds_maximum_principle(soft_solution):
    f = soft_solution.f
    assert np.all(f >= -1e-10)
    assert np.all(f <= 1.0 + 1e-10)


def test_integral_route_consistency(soft, soft_solution):
    gap = abs(soft_solution.a0_int - soft_solution.a0_asym) / soft_solution.a0_asym
    assert gap < 1e-6
    gauss = pot.gaussian(1.0, 1.0)
    sol = sc.solve_zero_energy(gauss)
    assert abs(sol.a0_int - sol.a0_asym) / sol.a0_asym < 1e-6


def test_gaussian_refinement_oracle():
    gauss = pot.gaussian(1.0, 1.0)
    coarse = sc.solve_zero_energy(gauss)
    h_fine = coarse.grid.h / 2.0
    fine = sc.solve_zero_energy(gauss, sc.GridSpec(rmax=coarse.grid.rmax, h=h_fine))
    assert abs(coarse.a0_asym - fine.a0_asym) < 1e-9


def test_weak_gaussian_matches_born_to_second_order():
    p = pot.gaussian(0.01, 1.0)
    sol = sc.solve_zero_energy(p)
    born = pot.born_scattering_length(p)
    assert sol.a0_asym < born  # strict for V != 0
    assert abs(sol.a0_asym - born) < 0.02 * born


def test_born_upper_bound_across_families():
    for p in (pot.soft_sphere(0.5, 1.0), pot.soft_sphere(4.0, 1.0), pot.gaussian(2.0, 0.8)):
        sol = sc.solve_zero_energy(p)
        assert sol.a0_asym <= pot.born_scattering_length(p) + 1e-12


def test_monotonic_in_strength():
    for family in ("soft-sphere", "gaussian"):
        prev = -1.0
        for v0 in (0.5, 1.0, 2.0, 4.0):
            p = pot.soft_sphere(v0, 1.0) if family == "soft-sphere" else pot.gaussian(v0, 1.0)
            a0 = sc.solve_zero_energy(p).a0_asym
            assert a0 > prev
            prev = a0


def test_scaling_law_three_values(soft, soft_solution):
    a0 = soft_solution.a0_int
    for N in (1, 10, 100):
        solN = sc.solve_zero_energy(pot.scale(soft, N))
        assert abs(solN.a0_int * N - a0) < 1e-8 * a0


def test_zero_energy_state_integral_identity(soft, soft_solution):
    out = sc.zero_energy_state_integral(soft, soft_solution)
    target = 8.0 * np.pi * SOFT_A0
    assert abs(out["integral"] - target) < 1e-6 * target
    gauss = pot.gaussian(1.0, 1.0)
    assert sc.zero_energy_state_integral(gauss)["relative_gap"] < 1e-6


def test_zero_energy_state_integral_zero_potential():
    out = sc.zero_energy_state_integral(pot.zero_potential())
    assert out["integral"] == 0.0
    assert abs(out["eight_pi_a0"]) < 1e-9


def test_asymptotic_regime_error(soft):
    # a fit window placed inside the potential support is not affine
    with pytest.raises(RuntimeError, match="asymptotic regime not reached"):
        sc.solve_zero_energy(soft, sc.GridSpec(fit_lo=0.002, fit_hi=0.015))


def test_phase_shift_rejects_bad_k(soft):
    with pytest.raises(ValueError):
        sc.phase_shift(soft, 0.0)


def test_phase_shift_zero_potential():
    ps = sc.phase_shift(pot.zero_potential(), 1.0)
    assert ps.delta0 == 0.0


def test_phase_shift_low_k_limit(soft, soft_solution):
    ps = sc.phase_shift(soft, 1e-3)
    assert ps.delta0 < 0.0
    assert abs(-ps.delta0 / ps.k - soft_solution.a0_asym) < 1e-4


def test_phase_shift_closed_form_soft_sphere(soft):
    # interior wavenumber kappa'' = sqrt(V0/2 - k^2) below the barrier
    for k in (0.3, 0.9):
        kpp = np.sqrt(1.0 - k**2)
        exact = np.arctan2(k * np.tanh(kpp), kpp) - k
        ps = sc.phase_shift(soft, k)
        assert abs(ps.delta0 - exact) < 1e-8


def test_phase_shift_born_regime():
    p = pot.gaussian(0.01, 1.0)
    from scipy.integrate import quad

    for k in (0.05, 0.1):
        born, _ = quad(lambda r: -(0.5 * p(np.array([r]))[0] / k) * np.sin(k * r) ** 2, 0, 20)
        ps = sc.phase_shift(p, k)
        assert abs(ps.delta0 - born) < 0.1 * abs(born)


def test_three_route_agreement(soft, soft_solution):
    a_fit = soft_solution.a0_asym
    a_int = soft_solution.a0_int
    a_phase = -sc.phase_shift(soft, 1e-3).delta0 / 1e-3
    for x, y in ((a_fit, a_int), (a_fit, a_phase), (a_int, a_phase)):
        assert abs(x - y) / a_fit < 1e-5


def test_transform_completeness_recorded(soft_transform):
    assert soft_transform.completeness_defect < 1e-5


def test_transform_free_case_is_sine_basis():
    tr = sc.build_transform(pot.zero_potential(), k_max=8.0, n_k=256)
    w = gaussian_packet(tr.grid, sigma=1.0, r0=3.0)
    u = np.real(w.u)
    out = sc.apply_wave_operator(tr, u)
    assert tr.grid.norm(out - u) < 1e-9
    # states equal sines up to the RK4 phase error of the marched segment
    assert np.max(np.abs(tr.states - tr.sines)) < 5e-6


def test_wave_operator_unitarity(soft_transform):
    w = gaussian_packet(soft_transform.grid, sigma=1.0, r0=3.0)
    u = np.real(w.u)
    img = sc.apply_wave_operator(soft_transform, u)
    assert abs(soft_transform.grid.norm(img) - soft_transform.grid.norm(u)) < 1e-6


def test_wave_operator_round_trip(soft_transform):
    w = gaussian_packet(soft_transform.grid, sigma=1.0, r0=2.0)
    u = np.real(w.u)
    back = sc.apply_wave_operator(
        soft_transform, sc.apply_wave_operator(soft_transform, u), adjoint=True
    )
    assert soft_transform.grid.norm(back - u) < 1e-5


def test_intertwining_multiplier(soft, soft_transform):
    w = gaussian_packet(soft_transform.grid, sigma=1.0, r0=0.0)
    u = np.real(w.u)
    hg = sc.apply_hamiltonian(soft_transform.grid, soft, u)
    c1 = soft_transform.forward_interacting(hg)
    c2 = soft_transform.multiplier() * soft_transform.forward_interacting(u)
    num = np.sqrt(np.sum(soft_transform.wk * (c1 - c2) ** 2))
    den = np.sqrt(np.sum(soft_transform.wk * c2**2))
    assert num / den < 1e-6


def test_dilation_covariance(soft, soft_transform):
    from scipy.interpolate import CubicSpline

    base = soft_transform
    w = gaussian_packet(base.grid, sigma=1.0, r0=3.0)
    u = np.real(w.u)
    wg = sc.apply_wave_operator(base, u)
    spl_u = CubicSpline(base.grid.r, u)
    spl_w = CubicSpline(base.grid.r, wg)
    for N in (2, 4):
        pN = pot.scale(soft, N)
        trN = sc.build_transform(
            pN, k_max=8.0 * N, n_k=320 * N, grid_spec=sc.GridSpec(rmax=26.0 / N * 1.3)
        )
        rN = trN.grid.r
        dil = np.sqrt(N) * spl_u(np.clip(rN * N, 0.0, base.grid.rmax))
        dil[0] = dil[-1] = 0.0
        lhs = sc.apply_wave_operator(trN, dil)
        rhs = np.sqrt(N) * spl_w(np.clip(rN * N, 0.0, base.grid.rmax))
        assert trN.grid.norm(lhs - rhs) < 1e-5


def test_insufficient_k_resolution_raises(soft):
    with pytest.raises(RuntimeError, match="insufficient k resolution"):
        sc.build_transform(soft, k_max=8.0, n_k=256, tol=1e-16)


def test_l1_ratio_diagnostic(soft_transform):
    w = gaussian_packet(soft_transform.grid, sigma=1.0, r0=2.0)
    ratio = sc.l1_ratio_diagnostic(soft_transform, np.real(w.u))
    assert np.isfinite(ratio) and ratio > 0.0
