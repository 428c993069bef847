import math

import numpy as np
import pytest

from quasilandau.analytic import Sector
from quasilandau.eigensolve import (bisection_eigenvalues, compare_to_analytic,
                                    convergence_study, leading_error_estimate,
                                    lowest_eigenpairs, sturm_count)
from quasilandau.errors import ArgumentError, DomainError
from quasilandau.operators import (Grid1D, TridiagonalOperator, build_effective_1d,
                                   default_grid)
from quasilandau.units import PhysParams


@pytest.fixture(scope="module")
def oscillator():
    p = PhysParams.natural()
    s = Sector(1.0, 1)
    g = Grid1D.symmetric(10.0, 2048)
    return p, s, build_effective_1d(p, s, g)


def test_sturm_count_against_dense():
    rng = np.random.default_rng(3)
    d = rng.normal(size=40)
    e = rng.normal(size=39)
    op = TridiagonalOperator(d, e)
    ev = np.linalg.eigvalsh(op.to_dense())
    shifts = np.linspace(ev.min() - 1, ev.max() + 1, 57)
    assert np.array_equal(sturm_count(d, e, shifts), np.searchsorted(ev, shifts))


def test_bisection_against_dense():
    rng = np.random.default_rng(4)
    d = rng.normal(size=60)
    e = rng.normal(size=59)
    ev = np.linalg.eigvalsh(TridiagonalOperator(d, e).to_dense())
    assert np.allclose(bisection_eigenvalues(d, e, 10), ev[:10], atol=1e-12)


def test_lowest_levels_near_ladder(oscillator):
    p, s, op = oscillator
    res = lowest_eigenpairs(op, 5)
    assert np.all(np.diff(res.values) > 0)
    # h = 20/2047: the stencil lowers level n by about 9.5e-5 * (2n^2+2n+1) / 32
    assert np.all(np.abs(res.values - (np.arange(5) + 0.5)) < 1.3e-4)
    assert abs(res.values[0] - 0.5) < 3.1e-6


def test_two_methods_agree(oscillator):
    p, s, op = oscillator
    a = lowest_eigenpairs(op, 6, "lapack")
    b = lowest_eigenpairs(op, 6, "bisection")
    assert np.allclose(a.values, b.values, rtol=1e-10, atol=0)
    assert np.abs(a.overlaps() - np.eye(6)).max() < 1e-8
    assert np.abs(b.overlaps() - np.eye(6)).max() < 1e-8
    h = op.grid.spacing
    assert np.allclose(np.abs(h * np.sum(a.vectors * b.vectors, axis=0)), 1.0, atol=1e-9)


def test_measured_error_matches_leading_order(oscillator):
    """Oracle: eigenvalue shift of the 3-point stencil is h^2 <p^4> / 24."""
    p, s, op = oscillator
    res = lowest_eigenpairs(op, 8)
    n = np.arange(8)
    pred = leading_error_estimate(p, s, op.grid.spacing, n)
    shift = (n + 0.5) - res.values
    assert np.all(shift > 0)
    assert np.allclose(shift / pred, 1.0, atol=1e-3)


def test_residuals_and_orthonormality(oscillator):
    p, s, op = oscillator
    for method in ("lapack", "bisection"):
        res = lowest_eigenpairs(op, 8, method)
        assert np.all(res.residual_norms / np.abs(res.values) < 1e-10)
        assert np.abs(res.overlaps() - np.eye(8)).max() < 1e-8
        assert np.all(res.values > 0)


def test_parity_alternates(oscillator):
    p, s, op = oscillator
    res = lowest_eigenpairs(op, 6)
    for n in range(6):
        v = res.vectors[:, n]
        assert np.abs(v - (-1) ** n * v[::-1]).max() < 1e-8 * np.abs(v).max()


def test_sign_convention(oscillator):
    p, s, op = oscillator
    res = lowest_eigenpairs(op, 6)
    assert np.all(res.vectors[-300] > 0)


def test_deterministic(oscillator):
    p, s, op = oscillator
    a, b = lowest_eigenpairs(op, 4), lowest_eigenpairs(op, 4)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)


def test_k_range():
    op = TridiagonalOperator(np.array([1.0, 2.0]), np.array([0.5]))
    with pytest.raises(ArgumentError):
        lowest_eigenpairs(op, 1)
    g = Grid1D.symmetric(5.0, 64)
    op = build_effective_1d(PhysParams.natural(), Sector(1.0, 1), g)
    with pytest.raises(ArgumentError):
        lowest_eigenpairs(op, 17)
    with pytest.raises(ArgumentError):
        lowest_eigenpairs(op, 0)


def test_compare_default_grid():
    p, s = PhysParams.natural(), Sector(1.0, 1)
    g = default_grid(p, s, 8)
    dev = compare_to_analytic(lowest_eigenpairs(build_effective_1d(p, s, g), 8), p, s)
    n = np.arange(8)
    pred = leading_error_estimate(p, s, g.spacing, n) / (n + 0.5)
    assert np.allclose(dev.rel_error, pred, rtol=1e-3)
    assert dev.max_overlap_error < 1e-6
    assert dev.kinetic_offset == pytest.approx(0.5)


def test_compare_si_units():
    p = PhysParams(beta_soc=1e-20)
    s = Sector(p.mass * 0.1 / p.hbar, 1)
    g = default_grid(p, s, 4)
    dev = compare_to_analytic(lowest_eigenpairs(build_effective_1d(p, s, g), 4), p, s)
    assert dev.max_rel_error < 5e-5
    assert dev.max_overlap_error < 1e-6


def test_compare_level_mismatch(oscillator):
    p, s, op = oscillator
    res = lowest_eigenpairs(op, 3)
    with pytest.raises(ArgumentError):
        compare_to_analytic(res, p, s, n_levels=4)


def test_zero_coupling_has_no_confined_sector():
    p = PhysParams.natural(alpha=0.0)
    g = Grid1D.symmetric(5.0, 128)
    op = build_effective_1d(PhysParams.natural(), Sector(1.0, 1), g)
    res = lowest_eigenpairs(op, 2)
    with pytest.raises(DomainError):
        compare_to_analytic(res, p, Sector(1.0, 1))
    with pytest.raises(DomainError):
        build_effective_1d(p, Sector(1.0, 1), g)


def test_convergence_ratio():
    p, s = PhysParams.natural(), Sector(1.0, 1)
    t = convergence_study(p, s, [256, 512], 8)
    assert 3.5 <= t.ratios[0] <= 4.5
    assert not t.truncation_dominated
    again = convergence_study(p, s, [256, 512], 8)
    assert again.max_rel_error == t.max_rel_error


def test_convergence_flags_truncation():
    p, s = PhysParams.natural(), Sector(1.0, 1)
    t = convergence_study(p, s, [256, 512], 8, extent=3.0)
    assert t.truncation_dominated
    # the flag is not just the extent rule: the enlarged run disagrees
    assert abs(t.max_rel_error[-1] - t.details["enlarged_extent_error"]) > \
        0.1 * t.details["enlarged_extent_error"]


def test_convergence_input_checks():
    p, s = PhysParams.natural(), Sector(1.0, 1)
    with pytest.raises(ArgumentError):
        convergence_study(p, s, [512, 256], 4)
    with pytest.raises(ArgumentError):
        convergence_study(p, s, [32, 64], 4)
