"""Field configuration, synthetic SU(2) gauge and discretized Hamiltonians."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import Confinement, Sector, classify_sector, sector_omega
from .errors import DomainError, GridError
from .units import EPS0, PhysParams

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


@dataclass(frozen=True)
class FieldConfig:
    """E(y) = gamma y^2 along y, produced by the charge density 2 eps0 gamma y."""

    gamma: float
    eps0: float = EPS0

    @classmethod
    def from_params(cls, params: PhysParams) -> "FieldConfig":
        return cls(params.gamma)

    def e_y(self, y):
        y = np.asarray(y, dtype=float)
        return self.gamma * y * y

    def vector(self, y) -> np.ndarray:
        """Cartesian field components (3, *y.shape)."""
        ey = self.e_y(y)
        z = np.zeros_like(ey)
        return np.stack([z, ey, z])

    def charge_density(self, y):
        return 2.0 * self.eps0 * self.gamma * np.asarray(y, dtype=float)


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return eps


LEVI_CIVITA = _levi_civita()


def effective_gauge(field: FieldConfig, y: float) -> np.ndarray:
    """A_eff = E x sigma at height y, shape (3, 2, 2): one spin matrix per axis.

    For E along y this is gamma y^2 (sigma_z x_hat - sigma_x z_hat).
    """
    e = field.vector(np.asarray(y, dtype=float))
    # (E x sigma)_i = eps_ijk E_j sigma_k
    return np.einsum("ijk,j,kab->iab", LEVI_CIVITA, e, PAULI)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


@dataclass(frozen=True)
class Grid1D:
    y_min: float
    y_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 16:
            raise GridError(f"n_points must be >= 16, got {self.n_points}")
        if not self.y_max > self.y_min:
            raise GridError("y_max must exceed y_min")

    @classmethod
    def symmetric(cls, half_width: float, n_points: int) -> "Grid1D":
        return cls(-half_width, half_width, n_points)

    @property
    def spacing(self) -> float:
        return (self.y_max - self.y_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.n_points)


DEFAULT_POINTS = 2048
DEFAULT_MARGIN = 6.0


def default_extent(n_levels: int) -> float:
    """Half-width in oscillator lengths of the default grid."""
    return math.sqrt(2 * n_levels + 1) + DEFAULT_MARGIN


def default_grid(params: PhysParams, s: Sector, n_levels: int = 8,
                 n_points: int = DEFAULT_POINTS) -> Grid1D:
    ell = math.sqrt(params.hbar / (params.mass * sector_omega(params, s)))
    return Grid1D.symmetric(default_extent(n_levels) * ell, n_points)


@dataclass(frozen=True)
class TridiagonalOperator:
    """Real symmetric tridiagonal matrix; only one off-diagonal is stored."""

    diag: np.ndarray
    offdiag: np.ndarray
    grid: Grid1D | None = None

    def __post_init__(self):
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError("offdiag must have len(diag) - 1 entries")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        out = np.array(out)
        if v.ndim == 2:
            out[:-1] += self.offdiag[:, None] * v[1:]
            out[1:] += self.offdiag[:, None] * v[:-1]
        else:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.offdiag, 1)
                + np.diag(self.offdiag, -1))


def potential_profile(params: PhysParams, s: Sector, y) -> np.ndarray:
    """sign(kx) sigma_z * m omega_c(|kx|)^2 y^2 / 2; zero for kx == 0."""
    y = np.asarray(y.points if isinstance(y, Grid1D) else y, dtype=float)
    if s.orientation == 0:
        return np.zeros_like(y)
    # m omega^2 / 2 = beta |kx|
    return s.orientation * params.beta * abs(s.kx) * y * y


def build_effective_1d(params: PhysParams, s: Sector, grid: Grid1D) -> TridiagonalOperator:
    """Three-point finite-difference H_eff with Dirichlet ends."""
    kind = classify_sector(s)
    if kind is Confinement.UNCONFINED:
        raise DomainError(f"spectrum unbounded below for unconfined sector {s}")
    if kind is Confinement.MARGINAL:
        raise DomainError(f"marginal sector {s} (kx = 0) has no discrete spectrum")
    sector_omega(params, s)  # rejects zero coupling
    h = grid.spacing
    t = params.hbar ** 2 / (2.0 * params.mass * h * h)
    diag = 2.0 * t + potential_profile(params, s, grid.points)
    offdiag = np.full(grid.n_points - 1, -t)
    return TridiagonalOperator(diag, offdiag, grid)


# --- two-dimensional spinor operators (periodic spectral grids) -------------

def wave_numbers(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def spectral_derivative(f: np.ndarray, k: np.ndarray, axis: int) -> np.ndarray:
    """d f / d(axis) on a periodic grid by Fourier multiplication."""
    shape = [1] * f.ndim
    shape[axis] = -1
    return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(f, axis=axis), axis=axis)


@dataclass(frozen=True)
class SpinBlockOperator:
    """H = H_plus (+) H_minus with H_pm = p^2/2m +- coupling * y^2 kx.

    ``coupling`` is alpha*gamma*hbar (or an explicit beta).  Acts on spinors of
    shape (2, nx, ny) sampled on periodic grids of lengths ``lx`` and ``ly``.
    """

    mass: float
    hbar: float
    coupling: float

    def block(self, psi: np.ndarray, sign: int, y: np.ndarray,
              lx: float, ly: float) -> np.ndarray:
        nx, ny = psi.shape
        kx = wave_numbers(nx, lx)[:, None]
        ky = wave_numbers(ny, ly)[None, :]
        # kinetic term diagonal in (kx, ky)
        kin = np.fft.ifft2((self.hbar ** 2 * (kx ** 2 + ky ** 2) / (2 * self.mass))
                           * np.fft.fft2(psi))
        # coupling diagonal in the mixed (kx, y) representation
        mixed = np.fft.fft(psi, axis=0)
        coup = np.fft.ifft(sign * self.coupling * kx * (y[None, :] ** 2) * mixed, axis=0)
        return kin + coup

    def apply(self, psi: np.ndarray, y: np.ndarray, lx: float, ly: float) -> np.ndarray:
        return np.stack([self.block(psi[0], +1, y, lx, ly),
                         self.block(psi[1], -1, y, lx, ly)])


def reduce_to_spin_diagonal(field: FieldConfig, params: PhysParams) -> SpinBlockOperator:
    return SpinBlockOperator(params.mass, params.hbar,
                             params.alpha * field.gamma * params.hbar)


def raw_hamiltonian_apply(field: FieldConfig, params: PhysParams, psi: np.ndarray,
                          x: np.ndarray, y: np.ndarray, lx: float, ly: float) -> np.ndarray:
    """p^2/2m + alpha (sigma x p) . E applied literally to a 2-spinor.

    Momentum is -i hbar grad taken by successive spectral first derivatives,
    p_z acts as zero in the plane, and E is kept to the right of p.
    """
    nx, ny = psi.shape[1:]
    kx = wave_numbers(nx, lx)
    ky = wave_numbers(ny, ly)
    hb = params.hbar

    def p(f, axis):
        if axis == 2:
            return np.zeros_like(f, dtype=complex)
        return -1j * hb * spectral_derivative(f, kx if axis == 0 else ky, axis)

    out = np.zeros_like(psi, dtype=complex)
    for s in range(2):
        for axis in (0, 1):
            out[s] += p(p(psi[s], axis), axis) / (2.0 * params.mass)
    e = field.vector(np.broadcast_to(y[None, :], (nx, ny)))
    # (sigma x p) . E = eps_ijk sigma_j p_k E_i
    for i in range(3):
        if not np.any(e[i]):
            continue
        for j in range(3):
            for k in range(3):
                c = LEVI_CIVITA[i, j, k]
                if c == 0:
                    continue
                # spin matrix sigma_j mixes components, p_k acts on E_i psi
                moved = np.stack([p(e[i] * psi[0], k), p(e[i] * psi[1], k)])
                out += c * params.alpha * np.einsum("ab,bxy->axy", PAULI[j], moved)
    return out
