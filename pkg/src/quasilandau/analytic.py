"""Closed-form quasi-Landau levels of the spin-orbit coupled channel.

For a fixed wave number ``kx`` and spin ``sigma_z`` the transverse motion is a
harmonic oscillator of frequency ``omega_c = sqrt(2 beta |kx| / m)`` when
``sign(kx) * sigma_z = +1`` and an inverted oscillator otherwise.  Levels are

    E_n(kx) = hbar omega_c(kx) (n + 1/2) + hbar^2 kx^2 / 2m
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DomainError, GridError
from .units import PhysParams, cyclotron_frequency


class Confinement(enum.Enum):
    CONFINED = "confined"
    UNCONFINED = "unconfined"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class Sector:
    kx: float
    sigma_z: int = 1

    def __post_init__(self):
        if self.sigma_z not in (1, -1):
            raise ArgumentError(f"sigma_z must be +1 or -1, got {self.sigma_z}")

    @property
    def orientation(self) -> int:
        """sign(kx) * sigma_z, or 0 for kx == 0."""
        if self.kx == 0:
            return 0
        return int(math.copysign(1, self.kx)) * self.sigma_z


def classify_sector(s: Sector) -> Confinement:
    o = s.orientation
    if o == 0:
        return Confinement.MARGINAL
    return Confinement.CONFINED if o > 0 else Confinement.UNCONFINED


def sector_omega(params: PhysParams, s: Sector) -> float:
    """Oscillator frequency of a confined sector; DomainError otherwise."""
    kind = classify_sector(s)
    if kind is not Confinement.CONFINED:
        raise DomainError(f"{kind.value} sector {s} has no discrete spectrum")
    return cyclotron_frequency(params, abs(s.kx))


def kinetic_offset(params: PhysParams, kx: float) -> float:
    return (params.hbar * kx) ** 2 / (2.0 * params.mass)


def oscillator_length(params: PhysParams, s: Sector) -> float:
    return math.sqrt(params.hbar / (params.mass * sector_omega(params, s)))


def dispersion(params: PhysParams, s: Sector, n: int) -> float:
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    omega = sector_omega(params, s)
    return params.hbar * omega * (n + 0.5) + kinetic_offset(params, s.kx)


@dataclass(frozen=True)
class LevelSet:
    sector: Sector
    energies: np.ndarray
    omega_c: float
    kinetic_offset: float

    @property
    def n_max(self) -> int:
        return len(self.energies) - 1


def level_set(params: PhysParams, s: Sector, n_levels: int) -> LevelSet:
    omega = sector_omega(params, s)
    n = np.arange(n_levels)
    off = kinetic_offset(params, s.kx)
    return LevelSet(s, params.hbar * omega * (n + 0.5) + off, omega, off)


def hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions psi_0..psi_n_max at dimensionless ``x``.

    Uses the three-term recurrence with the 1/sqrt(2^n n! sqrt(pi)) factor
    folded in, which stays finite for large n where 2^n n! overflows.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(2, n_max + 1):
        out[k] = math.sqrt(2.0 / k) * x * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return out


@dataclass(frozen=True)
class EigenfunctionSample:
    grid_y: np.ndarray
    values: np.ndarray
    n: int


def required_extent(n: int) -> float:
    """Half-width in oscillator lengths a grid must reach for level ``n``."""
    return math.sqrt(2 * n + 1) + 4.0


def eigenfunction(params: PhysParams, s: Sector, n: int, grid_y) -> EigenfunctionSample:
    """Transverse profile phi_n(y) of the confined sector, in m^-1/2.

    The sign convention makes the y -> +inf tail positive.
    """
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    ell = oscillator_length(params, s)
    y = np.asarray(grid_y, dtype=float)
    need = required_extent(n) * ell
    if y.size == 0 or y.min() > -need or y.max() < need:
        raise GridError(
            f"grid must cover +-{need:.6g} (= {required_extent(n):.4g} oscillator "
            f"lengths) for n={n}; got [{y.min() if y.size else 'nan'}, "
            f"{y.max() if y.size else 'nan'}]")
    vals = hermite_functions(n, y / ell)[n] / math.sqrt(ell)
    return EigenfunctionSample(y, vals, n)


def probability_density(sample: EigenfunctionSample) -> np.ndarray:
    return np.abs(sample.values) ** 2


def count_nodes(values, rel_tol: float = 1e-10) -> int:
    """Number of sign changes, ignoring samples below rel_tol * max."""
    v = np.asarray(values, dtype=float)
    keep = np.abs(v) > rel_tol * np.abs(v).max()
    # exact zeros on a node are dropped so the neighbours register the change
    signs = np.sign(v[keep])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class SpectrumScan:
    kx_values: np.ndarray
    k_max: float
    omega_max: float
    bands: np.ndarray  # (n_bands, n_k), E_n(kx) / (hbar omega_max)
    omega: np.ndarray  # omega_c at each kx

    @property
    def kx_over_kmax(self) -> np.ndarray:
        return np.arange(1, self.kx_values.size + 1) / self.kx_values.size


def spectrum_scan(params: PhysParams, k_max: float, n_bands: int, n_k: int) -> SpectrumScan:
    """Bands E_n(kx) on kx = k_max * i / n_k, i = 1..n_k (kx = 0 excluded)."""
    if not k_max > 0:
        raise DomainError("k_max must be positive")
    if n_k < 2:
        raise ArgumentError("n_k must be >= 2")
    if n_bands < 1:
        raise ArgumentError("n_bands must be >= 1")
    omega_max = cyclotron_frequency(params, k_max)
    kx = k_max * np.arange(1, n_k + 1) / n_k
    omega = np.sqrt(2.0 * params.beta * kx / params.mass)
    n = np.arange(n_bands)[:, None]
    energies = params.hbar * omega[None, :] * (n + 0.5) + kinetic_offset(params, kx)[None, :]
    return SpectrumScan(kx, k_max, omega_max, energies / (params.hbar * omega_max), omega)


@dataclass(frozen=True)
class GapReport:
    kx: float
    omega_c: float
    ladder_gaps: np.ndarray  # E_{n+1} - E_n at fixed kx, n < n_max
    kx_values: np.ndarray
    gaps_vs_kx: np.ndarray  # E_1 - E_0 along kx_values

    @property
    def ladder_equispaced(self) -> bool:
        g = self.ladder_gaps
        return bool(np.all(np.abs(g - g[0]) <= 1e-12 * abs(g[0])))

    @property
    def gap_increases_with_kx(self) -> bool:
        return bool(np.all(np.diff(self.gaps_vs_kx) > 0))


def landau_contrast(params: PhysParams, s: Sector, n_max: int,
                    kx_factors=(0.25, 0.5, 1.0, 2.0, 4.0)) -> GapReport:
    """Gaps at fixed kx (equal) versus the fixed-n gap as kx grows (~sqrt(kx))."""
    omega = sector_omega(params, s)
    levels = np.array([dispersion(params, s, n) for n in range(n_max + 1)])
    kxs = s.kx * np.asarray(kx_factors, dtype=float)
    gaps = np.array([dispersion(params, Sector(k, s.sigma_z), 1)
                     - dispersion(params, Sector(k, s.sigma_z), 0) for k in kxs])
    return GapReport(s.kx, omega, np.diff(levels), kxs, gaps)
