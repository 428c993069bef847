"""Thermally smeared quasi-Landau spectrum.

Atoms on the ring carry kx > 0 with a Boltzmann weight
exp(-hbar^2 (kx - k_drift)^2 / (2 m kB T)); ``k_drift = 0`` is the plain
thermal gas.  The transverse quantization removes any p_y dependence, so only
the kx marginal enters.  Each level gets equal a-priori weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks
from scipy.special import ndtr

from .analytic import Sector, kinetic_offset
from .errors import ArgumentError, DomainError
from .units import PhysParams, cyclotron_frequency

TAIL = 1e-12
GL_ORDER = 8
DRIFT_TOL = 1e-9


@dataclass(frozen=True)
class ThermalEnsemble:
    temperature: float
    kB: float
    hbar: float
    mass: float
    k_drift: float = 0.0
    n_kx_samples: int = 512

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError("temperature must be positive")
        if self.k_drift < 0:
            raise DomainError("k_drift must be non-negative")

    @classmethod
    def from_params(cls, params: PhysParams, temperature: float | None = None,
                    k_drift: float = 0.0, n_kx_samples: int = 512) -> "ThermalEnsemble":
        t = temperature if temperature is not None else params.temperature
        if t is None:
            raise DomainError("temperature is required")
        return cls(t, params.kB, params.hbar, params.mass, k_drift, n_kx_samples)

    @property
    def beta_th(self) -> float:
        return 1.0 / (self.kB * self.temperature)

    @property
    def k_thermal(self) -> float:
        """Standard deviation of kx: sqrt(m kB T) / hbar."""
        return math.sqrt(self.mass * self.kB * self.temperature) / self.hbar

    @property
    def kx_domain(self) -> tuple[float, float]:
        reach = self.k_thermal * math.sqrt(2.0 * math.log(1.0 / TAIL))
        return max(0.0, self.k_drift - reach), self.k_drift + reach

    def unnormalized(self, kx):
        kx = np.asarray(kx, dtype=float)
        return np.exp(-0.5 * ((kx - self.k_drift) / self.k_thermal) ** 2)


def gauss_legendre_panels(a: float, b: float, n_panels: int, order: int = GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def kx_quadrature(ens: ThermalEnsemble):
    """Composite Gauss-Legendre nodes and normalized thermal weights on the domain.

    Panels double until the total unnormalized weight changes by < 1e-9
    (relative).  Returned weights sum to 1.
    """
    a, b = ens.kx_domain
    panels = max(1, ens.n_kx_samples // GL_ORDER)
    nodes, w = gauss_legendre_panels(a, b, panels)
    total = float(np.sum(w * ens.unnormalized(nodes)))
    for _ in range(20):
        n2, w2 = gauss_legendre_panels(a, b, 2 * panels)
        t2 = float(np.sum(w2 * ens.unnormalized(n2)))
        converged = abs(t2 - total) <= DRIFT_TOL * abs(t2)
        nodes, w, total, panels = n2, w2, t2, 2 * panels
        if converged:
            break
    q = w * ens.unnormalized(nodes)
    return nodes, q / q.sum(), total


def partition_function(ens: ThermalEnsemble) -> float:
    return kx_quadrature(ens)[2]


def momentum_weight(ens: ThermalEnsemble, kx) -> np.ndarray:
    """Normalized thermal density of kx over the positive half-line (m)."""
    kx = np.asarray(kx, dtype=float)
    a, b = ens.kx_domain
    if np.any(kx <= 0) or np.any(kx > b):
        raise DomainError(f"kx must lie in (0, {b:.6g}]")
    return ens.unnormalized(kx) / partition_function(ens)


def rms_kx(ens: ThermalEnsemble) -> float:
    nodes, q, _ = kx_quadrature(ens)
    return math.sqrt(float(np.sum(q * nodes ** 2)))


@dataclass
class SpectralDensity:
    energy_edges: np.ndarray  # bins + 1 edges (J)
    weights: np.ndarray  # per-bin probability, sums to 1
    broadening_sigma: float
    n_levels: int
    reference_omega: float
    reference_kx: float

    @property
    def energy_bins(self) -> np.ndarray:
        """Bin centres."""
        return 0.5 * (self.energy_edges[1:] + self.energy_edges[:-1])

    @property
    def bin_width(self) -> float:
        return float(self.energy_edges[1] - self.energy_edges[0])


def smeared_spectrum(ens: ThermalEnsemble, params: PhysParams, n_levels: int,
                     bins: int, sigma_E: float,
                     energy_range: tuple[float, float] | None = None) -> SpectralDensity:
    """Binned D(E) = (1/N) sum_n int dkx w(kx) G_sigma(E - E_n(kx)).

    The Gaussian kernel is integrated exactly over each bin.  The default
    range reaches 8 sigma beyond the sampled levels on both sides so the
    captured weight is 1 to rounding; an explicit range must cover at least
    [0, max E + 5 sigma].
    """
    if not sigma_E > 0:
        raise ArgumentError("sigma_E must be positive")
    if bins < 64:
        raise ArgumentError("bins must be >= 64")
    if n_levels < 1:
        raise ArgumentError("n_levels must be >= 1")
    nodes, q, _ = kx_quadrature(ens)
    omega = np.sqrt(2.0 * params.beta * nodes / params.mass)
    n = np.arange(n_levels)[:, None]
    levels = params.hbar * omega[None, :] * (n + 0.5) + kinetic_offset(params, nodes)[None, :]
    e_max = float(levels.max())
    if energy_range is None:
        lo, hi = -8.0 * sigma_E, e_max + 8.0 * sigma_E
    else:
        lo, hi = map(float, energy_range)
        if lo > 0 or hi < e_max + 5.0 * sigma_E:
            raise ArgumentError(
                f"energy range [{lo:.6g}, {hi:.6g}] must cover [0, {e_max + 5 * sigma_E:.6g}]")
    edges = np.linspace(lo, hi, bins + 1)
    wq = np.broadcast_to(q[None, :] / n_levels, levels.shape).ravel()
    centres = levels.ravel()
    cdf = np.empty(bins + 1)
    # fixed summation order per edge keeps the result deterministic
    for i, e in enumerate(edges):
        cdf[i] = np.dot(wq, ndtr((e - centres) / sigma_E))
    weights = np.diff(cdf)
    k_ref = rms_kx(ens)
    return SpectralDensity(edges, weights, sigma_E, n_levels,
                           cyclotron_frequency(params, k_ref), k_ref)


def detect_peaks(d: SpectralDensity, rel_prominence: float = 1e-3) -> np.ndarray:
    w = d.weights
    idx, _ = find_peaks(w, prominence=rel_prominence * w.max())
    return idx


def gap_visibility(d: SpectralDensity) -> float:
    """(max - min) / (max + min) of the density between the two lowest peaks."""
    peaks = detect_peaks(d)
    if len(peaks) < 2:
        return 0.0
    seg = d.weights[peaks[0]:peaks[1] + 1]
    hi, lo = float(seg.max()), float(seg.min())
    return (hi - lo) / (hi + lo) if hi + lo > 0 else 0.0


def sweep_visibility(params: PhysParams, temperatures, n_levels: int, bins: int,
                     sigma_E: float, k_drift: float = 0.0) -> np.ndarray:
    out = []
    for t in temperatures:
        ens = ThermalEnsemble.from_params(params, t, k_drift)
        out.append(gap_visibility(smeared_spectrum(ens, params, n_levels, bins, sigma_E)))
    return np.array(out)


def reference_sector(d: SpectralDensity) -> Sector:
    return Sector(d.reference_kx, 1)
