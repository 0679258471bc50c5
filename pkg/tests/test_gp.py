"""Split-step dynamics and imaginary-time ground states on periodic boxes."""

import numpy as np
import pytest

from condensate_lab import gp

TWO_PI = 2.0 * np.pi


def make_1d(M=64, L=TWO_PI, fn=None):
    x = (np.arange(M) - M // 2) * (L / M)
    vals = np.ones(M, dtype=complex) if fn is None else fn(x).astype(complex)
    return gp.Field(vals, (L,))


def test_plane_wave_dispersion():
    M, L = 64, TWO_PI
    x = (np.arange(M) - M // 2) * (L / M)
    A, kmode, g = 0.7, 2.0, 1.3
    f = gp.Field(A * np.exp(1j * kmode * x), (L,))
    cfg = gp.GPConfig(coupling=g, dt=1e-3)
    out = gp.gp_evolve(f, cfg, 1.0)
    omega = kmode**2 + g * A**2
    exact = A * np.exp(1j * (kmode * x - omega))
    assert np.max(np.abs(np.angle(out.values / exact))) < 1e-6
    assert abs(out.mass() - f.mass()) / f.mass() < 1e-10


def test_free_mode_exact_phase():
    M, L = 64, TWO_PI
    x = (np.arange(M) - M // 2) * (L / M)
    f = gp.Field(np.exp(2j * x), (L,))
    out = gp.gp_evolve(f, gp.GPConfig(coupling=0.0, dt=1e-3), 0.5)
    exact = np.exp(2j * x - 4j * 0.5)
    assert np.max(np.abs(out.values - exact)) < 1e-10


def test_plane_wave_energies_analytic():
    M, L = 64, TWO_PI
    x = (np.arange(M) - M // 2) * (L / M)
    A, kmode, g = 0.7, 2.0, 1.3
    f = gp.Field(A * np.exp(1j * kmode * x), (L,))
    e = gp.gp_energy(f, gp.GPConfig(coupling=g))
    assert abs(e["kinetic"] - kmode**2 * A**2 * L) < 1e-10
    assert abs(e["interaction"] - 0.5 * g * A**4 * L) < 1e-10
    const = gp.Field(np.ones(M, dtype=complex), (L,))
    assert gp.gp_energy(const, gp.GPConfig(coupling=0.0))["kinetic"] < 1e-14


def test_free_gaussian_spreading():
    M, L = 256, 40.0
    x = (np.arange(M) - M // 2) * (L / M)
    f = gp.Field(np.exp(-(x**2) / 2.0).astype(complex), (L,))
    t = 0.5
    out = gp.gp_evolve(f, gp.GPConfig(coupling=0.0, dt=2e-4), t)
    s2 = 1.0 + 2j * t
    exact = (1.0 / s2) ** 0.5 * np.exp(-(x**2) / (2.0 * s2))
    assert np.sqrt(np.sum(np.abs(out.values - exact) ** 2) * out.dvol) < 1e-6


def test_energy_conservation():
    f = make_1d(128, fn=lambda x: 1.0 + 0.2 * np.cos(x) + 0.1 * np.sin(2 * x))
    f.normalize()
    cfg = gp.GPConfig(coupling=1.0, dt=2e-4)
    e0 = gp.gp_energy(f, cfg)["total"]
    cur = f
    for _ in range(5):
        cur = gp.gp_evolve(cur, cfg, 0.2)
        e = gp.gp_energy(cur, cfg)["total"]
        assert abs(e - e0) / abs(e0) < 1e-8


def test_time_reversal():
    f = make_1d(64, fn=lambda x: 1.0 + 0.3 * np.cos(x))
    f.normalize()
    cfg = gp.GPConfig(coupling=1.0, dt=5e-4)
    fwd = gp.gp_evolve(f, cfg, 1.0)
    back = gp.gp_evolve(gp.Field(np.conj(fwd.values), fwd.box), cfg, 1.0)
    err = np.sqrt(np.sum(np.abs(np.conj(back.values) - f.values) ** 2) * f.dvol)
    assert err < 1e-8


def test_dt_refinement_slope():
    f = make_1d(64, fn=lambda x: 1.0 + 0.2 * np.cos(x) + 0.1 * np.sin(2 * x))
    f.normalize()
    dts = [2e-3, 1e-3, 5e-4]
    ref = gp.gp_evolve(f, gp.GPConfig(coupling=1.0, dt=1.25e-4), 0.5)
    errs = []
    for dt in dts:
        out = gp.gp_evolve(f, gp.GPConfig(coupling=1.0, dt=dt), 0.5)
        errs.append(np.sqrt(np.sum(np.abs(out.values - ref.values) ** 2) * out.dvol))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(slope - 2.0) < 0.1


def test_kinetic_scale_precondition():
    f = make_1d(256, fn=lambda x: 1.0 + 0.1 * np.cos(x))
    with pytest.raises(ValueError, match="dt too large"):
        gp.gp_evolve(f, gp.GPConfig(coupling=0.0, dt=5e-3), 0.5)


def test_resolution_guard_trips_on_rough_data():
    rng = np.random.default_rng(0)
    f = gp.Field(rng.normal(size=64) + 1j * rng.normal(size=64), (TWO_PI,))
    with pytest.raises(RuntimeError, match="spectral blow-up"):
        gp.gp_evolve(f, gp.GPConfig(coupling=0.0, dt=1e-4), 0.01)


def test_defocusing_requires_nonnegative_coupling():
    with pytest.raises(ValueError):
        gp.GPConfig(coupling=-1.0)


def test_ground_state_harmonic_1d():
    M, L = 256, 16.0
    x = (np.arange(M) - M // 2) * (L / M)
    init = gp.Field(np.exp(-(x**2)).astype(complex), (L,))
    init.normalize()
    res = gp.gp_ground_state(gp.GPConfig(coupling=0.0, trap=gp.harmonic_trap), init)
    assert abs(res["energy"] - 1.0) < 1e-4
    es = res["energies"]
    assert all(b <= a for a, b in zip(es[:-1], es[1:]))


def test_ground_state_monotone_in_coupling():
    M, L = 128, 16.0
    x = (np.arange(M) - M // 2) * (L / M)
    init = gp.Field(np.exp(-(x**2)).astype(complex), (L,))
    init.normalize()
    energies = []
    for g in (0.0, 1.0, 10.0):
        res = gp.gp_ground_state(gp.GPConfig(coupling=g, trap=gp.harmonic_trap), init)
        energies.append(res["energy"])
    assert energies[0] < energies[1] < energies[2]


def test_ground_state_on_torus_with_coupling_is_constant():
    f = make_1d(64, fn=lambda x: 1.0 + 0.3 * np.cos(x))
    f.normalize()
    res = gp.gp_ground_state(gp.GPConfig(coupling=2.0), f, tol=1e-13)
    dens = np.abs(res["field"].values) ** 2
    assert (np.max(dens) - np.min(dens)) / np.mean(dens) < 1e-3


def test_ground_state_requires_minimizer():
    f = make_1d(64)
    f.normalize()
    with pytest.raises(ValueError, match="no minimizer"):
        gp.gp_ground_state(gp.GPConfig(coupling=0.0), f)


def test_ground_state_requires_normalized_init():
    f = make_1d(64, fn=lambda x: 2.0 + 0 * x)
    with pytest.raises(ValueError, match="normalized"):
        gp.gp_ground_state(gp.GPConfig(coupling=1.0), f)


def test_trap_must_be_nonnegative():
    f = make_1d(64)
    cfg = gp.GPConfig(coupling=0.0, trap=lambda x: x)
    with pytest.raises(ValueError, match="nonnegative"):
        cfg.trap_values(f)


def test_field_mass_and_tail():
    f = make_1d(64, fn=lambda x: 1.0 + 0.1 * np.cos(x))
    f.normalize()
    assert abs(f.mass() - 1.0) < 1e-12
    assert f.spectral_tail_fraction() < 1e-12
