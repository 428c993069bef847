import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.special import erf

from quasilandau.errors import ArgumentError, DomainError
from quasilandau.thermal import (ThermalEnsemble, detect_peaks, gap_visibility,
                                 kx_quadrature, momentum_weight, partition_function,
                                 rms_kx, smeared_spectrum, sweep_visibility)
from quasilandau.units import PhysParams

SWEEP = [1e-4, 1e-3, 1e-2, 3e-2, 1e-1]


def test_ensemble_invariants(nat):
    ens = ThermalEnsemble.from_params(nat, 0.3)
    assert ens.beta_th * ens.kB * ens.temperature == pytest.approx(1.0)
    a, b = ens.kx_domain
    assert a == 0.0
    assert ens.unnormalized(b) == pytest.approx(1e-12, rel=1e-9)
    with pytest.raises(DomainError):
        ThermalEnsemble.from_params(nat, 0.0)
    with pytest.raises(DomainError):
        ThermalEnsemble.from_params(nat)


def test_partition_function_closed_form(nat):
    ens = ThermalEnsemble.from_params(nat, 0.3)
    kt = math.sqrt(0.3)
    b = ens.kx_domain[1]
    exact = kt * math.sqrt(math.pi / 2) * erf(b / (kt * math.sqrt(2)))
    assert partition_function(ens) == pytest.approx(exact, rel=1e-12)


def test_weight_normalized_and_decreasing(nat):
    ens = ThermalEnsemble.from_params(nat, 0.3)
    nodes, q, _ = kx_quadrature(ens)
    assert q.sum() == pytest.approx(1.0, abs=1e-12)
    k = np.linspace(1e-6, ens.kx_domain[1], 500)
    w = momentum_weight(ens, k)
    assert np.all(np.diff(w) < 0)
    # independent trapezoid check of the normalization
    kk = np.linspace(0, ens.kx_domain[1], 200001)
    ww = ens.unnormalized(kk) / partition_function(ens)
    assert trapezoid(ww, kk) == pytest.approx(1.0, abs=1e-9)


def test_weight_domain(nat):
    ens = ThermalEnsemble.from_params(nat, 0.3)
    with pytest.raises(DomainError):
        momentum_weight(ens, 0.0)
    with pytest.raises(DomainError):
        momentum_weight(ens, -1.0)


def test_rms_kx_scales_with_sqrt_temperature(nat):
    a = rms_kx(ThermalEnsemble.from_params(nat, 0.01))
    b = rms_kx(ThermalEnsemble.from_params(nat, 0.04))
    assert b / a == pytest.approx(2.0, rel=1e-9)
    # half-Gaussian second moment is k_T^2
    assert a == pytest.approx(0.1, rel=1e-9)


def test_total_weight(nat):
    for t in (1e-3, 0.1, 1.0):
        d = smeared_spectrum(ThermalEnsemble.from_params(nat, t), nat, 5, 256, 0.05)
        assert d.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(d.weights >= 0)


def test_kernel_consistency(nat):
    ens = ThermalEnsemble.from_params(nat, 0.05, k_drift=1.0)
    a = smeared_spectrum(ens, nat, 4, 256, 0.04)
    b = smeared_spectrum(ens, nat, 4, 512, 0.02)
    assert abs(a.weights.sum() - b.weights.sum()) < 1e-9


def test_cold_peaks_on_levels(nat):
    ens = ThermalEnsemble.from_params(nat, 1e-6, k_drift=1.0)
    d = smeared_spectrum(ens, nat, 4, 2048, 0.01)
    peaks = d.energy_bins[detect_peaks(d)]
    # E_n(1) = (n + 1/2) + 1/2
    assert np.allclose(peaks, [1, 2, 3, 4], atol=2 * d.bin_width)
    assert np.allclose(np.diff(peaks), 1.0, atol=2 * d.bin_width)


def test_peaks_merge_when_thermal_spread_reaches_gap(nat):
    n = 4
    cold = smeared_spectrum(ThermalEnsemble.from_params(nat, 1e-3, k_drift=1.0), nat, n, 1024, 0.02)
    hot = smeared_spectrum(ThermalEnsemble.from_params(nat, 1e-1, k_drift=1.0), nat, n, 1024, 0.02)
    assert len(detect_peaks(cold)) == n
    assert len(detect_peaks(hot)) < n


def test_visibility_cases(nat):
    cold = smeared_spectrum(ThermalEnsemble.from_params(nat, 1e-5, k_drift=1.0), nat, 3, 1024, 0.02)
    assert gap_visibility(cold) > 0.99
    single = smeared_spectrum(ThermalEnsemble.from_params(nat, 1e-5, k_drift=1.0), nat, 1, 256, 0.02)
    assert gap_visibility(single) == 0.0


def test_visibility_sweep_monotone(nat):
    v = sweep_visibility(nat, SWEEP, 4, 1024, 0.02, k_drift=1.0)
    assert np.all(np.diff(v) <= 1e-12)
    assert v[0] > 0.99 and v[-1] < 0.2


def test_argument_checks(nat):
    ens = ThermalEnsemble.from_params(nat, 0.1)
    with pytest.raises(ArgumentError):
        smeared_spectrum(ens, nat, 3, 32, 0.1)
    with pytest.raises(ArgumentError):
        smeared_spectrum(ens, nat, 3, 128, 0.0)
    with pytest.raises(ArgumentError, match="must cover"):
        smeared_spectrum(ens, nat, 3, 128, 0.1, energy_range=(0.0, 1.0))


def test_si_parameters():
    p = PhysParams(beta_soc=1e-20)
    ens = ThermalEnsemble.from_params(p, 3.25e-5)
    d = smeared_spectrum(ens, p, 5, 256, 1e-29)
    assert d.weights.sum() == pytest.approx(1.0, abs=1e-9)
    assert d.reference_kx == pytest.approx(math.sqrt(p.mass * p.kB * 3.25e-5) / p.hbar, rel=1e-9)


def test_deterministic(nat):
    ens = ThermalEnsemble.from_params(nat, 0.02, k_drift=1.0)
    a = smeared_spectrum(ens, nat, 4, 256, 0.03)
    b = smeared_spectrum(ens, nat, 4, 256, 0.03)
    assert np.array_equal(a.weights, b.weights)
