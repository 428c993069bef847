import math

import numpy as np
import pytest

from quasilandau.dynamics import (Grid2D, Propagator, absorber_reflectivity,
                                  energy_expectation, evolve, initial_packet,
                                  read_snapshot, survival_probability)
from quasilandau.errors import ArgumentError, GridError, SupportSpillError
from quasilandau.units import PhysParams

LX = 2 * math.pi * 8  # kx = 1 is ring mode 8


def grid(absorber=False, n_y=256, y=16.0, n_x=32):
    return Grid2D(LX, n_x, -y, y, n_y, absorber)


def test_grid_validation():
    with pytest.raises(GridError):
        Grid2D(LX, 48, -1, 1, 64)
    with pytest.raises(GridError):
        Grid2D(LX, 16, -1, 1, 64)
    g = grid()
    assert np.allclose(g.kx / g.k_unit, np.round(g.kx / g.k_unit))


def test_packet_norm_and_spin(nat):
    f = initial_packet(grid(), nat, 1.0, 1.3, "+1")
    assert f.norm() == pytest.approx(1.0, abs=1e-12)
    assert np.all(f.psi_minus == 0)
    sup = initial_packet(grid(), nat, 1.0, 1.0, "superposition")
    assert sup.component_norms() == pytest.approx([0.5, 0.5], abs=1e-12)


def test_packet_off_lattice(nat):
    with pytest.raises(ArgumentError, match="nearest allowed values are 0.875 and 1"):
        initial_packet(grid(), nat, 0.9, 1.0)


def test_packet_bad_spin(nat):
    with pytest.raises(ArgumentError):
        initial_packet(grid(), nat, 1.0, 1.0, "up")


def test_ground_packet_energy(nat):
    f = initial_packet(grid(), nat, 1.0, 1.0, "+1")
    # hbar omega / 2 + hbar^2 kx^2 / 2m with omega = kx = 1
    assert energy_expectation(f, nat) == pytest.approx(1.0, abs=1e-6)


def test_survival_probability_examples(nat):
    f = initial_packet(grid(), nat, 1.0, 1.0, "+1")
    sp, sm = survival_probability(f, 8.0)
    assert sp == pytest.approx(1.0, abs=1e-12) and sm == 0.0
    sup = initial_packet(grid(), nat, 1.0, 1.0, "superposition")
    assert survival_probability(sup, 8.0) == pytest.approx((0.5, 0.5), abs=1e-12)
    with pytest.raises(ArgumentError):
        survival_probability(f, 20.0)


def test_survival_window_quadrature(nat):
    f = initial_packet(grid(), nat, 1.0, 1.0, "+1")
    # density ~ exp(-y^2) / sqrt(pi): inside |y| < a is erf(a)
    for a in (0.5, 1.0, 1.37):
        assert survival_probability(f, a)[0] == pytest.approx(math.erf(a), abs=1e-5)


def test_free_spreading(nat):
    free = PhysParams.natural(alpha=0.0)
    f = initial_packet(grid(), free, 1.0, 1.0, "+1")
    dt, n = 0.01, 300
    _, rep = evolve(f, free, dt, n, stride=50)
    s0 = 1.0 / math.sqrt(2)  # rms y of exp(-y^2)
    for t, w in zip(rep.times, rep.width_plus):
        exact = s0 * math.sqrt(1 + (t / (2 * s0 * s0)) ** 2)
        assert w == pytest.approx(exact, rel=1e-6)


def test_confined_ground_state_is_stationary(nat):
    f = initial_packet(grid(absorber=True), nat, 1.0, 1.0, "+1")
    dt = 0.01
    n = int(round(10 * 2 * math.pi / dt))
    _, rep = evolve(f, nat, dt, n, stride=50, y_trap=4.0, absorber_tau=0.05)
    assert min(rep.survival_plus) >= 0.999
    w = np.array(rep.width_plus)
    assert np.abs(w / w[0] - 1).max() < 1e-4


def test_unconfined_escapes(nat):
    f = initial_packet(grid(absorber=True), nat, 1.0, 1.0, "-1")
    dt = 0.005
    _, rep = evolve(f, nat, dt, int(round(3.0 / dt)), stride=20, y_trap=4.0, absorber_tau=0.05)
    assert rep.times[-1] == pytest.approx(3.0)
    assert rep.survival_minus[-1] < 0.5
    s = np.array(rep.survival_minus)
    assert np.all(np.diff(s) <= 1e-12)


def test_inverted_oscillator_width(nat):
    """Oracle: <y^2>(t) = cosh(2t) / 2 for the ground Gaussian in -y^2/2."""
    f = initial_packet(grid(), nat, 1.0, 1.0, "-1")
    _, rep = evolve(f, nat, 0.002, 500, stride=100)
    for t, w in zip(rep.times, rep.width_minus):
        assert w == pytest.approx(math.sqrt(0.5 * math.cosh(2 * t)), rel=1e-5)


def test_displaced_packet_period(nat):
    y0 = 2.0
    f = initial_packet(grid(), nat, 1.0, 1.0, "+1", y0=y0)
    dt = 0.01
    n = int(round(2 * math.pi / dt))
    _, rep = evolve(f, nat, dt, n, stride=1)
    t = np.array(rep.times)
    m = np.array(rep.mean_y_plus)
    assert np.abs(m - y0 * np.cos(t)).max() < 1e-3 * y0
    assert abs(m[-1] - y0) < 1e-3 * y0


def mirrored_pair(g, nat, y0=0.0):
    """(kx, +1) and (-kx, -1): both components confined."""
    f = initial_packet(g, nat, 1.0, 1.0, "superposition", y0=y0)
    f.psi[1] = np.conj(f.psi[1])
    return f


def test_unitarity_and_spin_conservation(nat):
    f = mirrored_pair(grid(), nat, y0=0.5)
    _, rep = evolve(f, nat, 0.01, 2000, stride=100)
    assert np.abs(np.array(rep.norm_total) - 1).max() < 1e-10
    assert np.abs(np.array(rep.norm_plus) - 0.5).max() < 1e-10
    assert np.abs(np.array(rep.norm_minus) - 0.5).max() < 1e-10


def test_kx_spectrum_conserved(nat):
    g = grid()
    f = mirrored_pair(g, nat, y0=0.3)
    # add a second ring mode
    f.psi[0] += 0.3 * np.exp(1j * 1.5 * g.x)[:, None] * np.exp(-g.y ** 2)[None, :]
    f.psi /= math.sqrt(f.norm())
    before = f.kx_spectrum()
    out, _ = evolve(f, nat, 0.01, 300, stride=300)
    assert np.abs(out.kx_spectrum() - before).max() < 1e-10


def _terminal(nat, dt, t_end=2.0):
    f = initial_packet(grid(), nat, 1.0, 0.7, "+1", y0=1.0)
    out, _ = evolve(f, nat, dt, int(round(t_end / dt)), stride=10 ** 6)
    return out.psi


def test_strang_second_order(nat):
    ref = _terminal(nat, 0.000625)
    e1 = np.linalg.norm(_terminal(nat, 0.01) - ref)
    e2 = np.linalg.norm(_terminal(nat, 0.005) - ref)
    assert 3.5 < e1 / e2 < 4.5


def test_dt_bound(nat):
    g = grid()
    limit = Propagator.max_dt(g, nat)
    Propagator(g, nat, 0.99 * limit)
    with pytest.raises(ArgumentError, match="maximum allowed dt"):
        Propagator(g, nat, 1.01 * limit)


def test_spill_monitor(nat):
    f = initial_packet(grid(), nat, 1.0, 1.0, "-1")
    with pytest.raises(SupportSpillError):
        evolve(f, nat, 0.005, 1000, stride=10, absorber=False)


def test_absorber_reflectivity_calibration(nat):
    g = grid(absorber=True, n_y=512)
    r = absorber_reflectivity(g, nat, k0=10.0, dt=0.002, absorber_tau=0.05)
    print(f"absorber reflectivity at k0=10: {r:.3e}")
    assert r < 1e-3


def test_snapshots(tmp_path, nat):
    g = grid()
    f = initial_packet(g, nat, 1.0, 1.0, "+1")
    out, _ = evolve(f, nat, 0.01, 10, stride=5, snapshot_every=5, snapshot_dir=tmp_path)
    files = sorted(tmp_path.glob("snap_*.bin"))
    assert [p.name for p in files] == ["snap_000000.bin", "snap_000005.bin", "snap_000010.bin"]
    snap = read_snapshot(files[-1])
    assert (snap["nx"], snap["ny"]) == (32, 256)
    assert snap["time"] == pytest.approx(0.1)
    assert snap["y_extent"] == (-16.0, 16.0)
    assert np.allclose(snap["density_plus"], np.abs(out.psi_plus) ** 2)
