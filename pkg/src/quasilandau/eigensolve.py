"""Lowest eigenpairs of symmetric tridiagonal operators and their validation.

Two independent routes are available: LAPACK (``scipy.linalg.eigh_tridiagonal``)
and a Sturm-sequence bisection with inverse iteration for the vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from .analytic import Sector, eigenfunction, sector_omega
from .errors import ArgumentError
from .operators import Grid1D, TridiagonalOperator, build_effective_1d, default_extent
from .units import PhysParams


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray  # (n_points, k), normalized so h * sum(v^2) = 1
    residual_norms: np.ndarray
    grid: Grid1D | None
    method: str = "lapack"

    def overlaps(self) -> np.ndarray:
        h = self.grid.spacing if self.grid is not None else 1.0
        return h * self.vectors.T @ self.vectors


def sturm_count(diag: np.ndarray, offdiag: np.ndarray, shifts) -> np.ndarray:
    """Number of eigenvalues strictly below each shift (LDL^T inertia)."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    tiny = np.finfo(float).tiny ** 0.5
    e2 = offdiag ** 2
    q = diag[0] - shifts
    count = (q < 0).astype(int)
    for i in range(1, len(diag)):
        q = np.where(q == 0.0, tiny, q)
        q = diag[i] - shifts - e2[i - 1] / q
        count += q < 0
    return count


def bisection_eigenvalues(diag: np.ndarray, offdiag: np.ndarray, k: int) -> np.ndarray:
    """The k smallest eigenvalues by Sturm bisection to full double precision."""
    a = np.abs(offdiag)
    radius = np.concatenate([a, [0.0]]) + np.concatenate([[0.0], a])
    lo0 = float(np.min(diag - radius))
    hi0 = float(np.max(diag + radius))
    idx = np.arange(k)
    lo = np.full(k, lo0)
    hi = np.full(k, hi0)
    scale = max(abs(lo0), abs(hi0))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, offdiag, mid) > idx
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(np.abs(mid), scale * 1e-3)):
            break
    return 0.5 * (lo + hi)


def _inverse_iteration(op: TridiagonalOperator, lam: float, n_iter: int = 4) -> np.ndarray:
    n = op.size
    shift = lam * (1 + 1e-13) + 1e-300
    ab = np.zeros((3, n))
    ab[0, 1:] = op.offdiag
    ab[1] = op.diag - shift
    ab[2, :-1] = op.offdiag
    v = np.ones(n) / math.sqrt(n)
    v[::2] *= 1.0001  # break symmetry so odd states are reachable
    for _ in range(n_iter):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    return v


def _fix_sign(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    idx = np.nonzero(mags > 1e-6 * mags.max())[0][-1]
    return v if v[idx] > 0 else -v


def lowest_eigenpairs(op: TridiagonalOperator, k: int, method: str = "lapack") -> EigenResult:
    """The k smallest eigenpairs, ascending, with +y tails positive.

    ``method="bisection"`` uses Sturm bisection plus inverse iteration and
    shares no code with the LAPACK path.
    """
    n = op.size
    if k < 1 or k > n / 4:
        raise ArgumentError(f"k must satisfy 1 <= k <= n_points/4 = {n / 4:g}, got {k}")
    if method == "lapack":
        vals, vecs = eigh_tridiagonal(op.diag, op.offdiag, select="i",
                                      select_range=(0, k - 1))
    elif method == "bisection":
        vals = bisection_eigenvalues(op.diag, op.offdiag, k)
        vecs = np.column_stack([_inverse_iteration(op, lam) for lam in vals])
    else:
        raise ArgumentError(f"unknown method {method!r}")
    vecs = np.column_stack([_fix_sign(vecs[:, j]) for j in range(k)])
    resid = np.linalg.norm(op.matvec(vecs) - vecs * vals[None, :], axis=0)
    h = op.grid.spacing if op.grid is not None else 1.0
    return EigenResult(np.asarray(vals), vecs / math.sqrt(h), resid, op.grid, method)


@dataclass
class Deviation:
    n: np.ndarray
    numeric: np.ndarray
    analytic: np.ndarray
    abs_error: np.ndarray
    rel_error: np.ndarray
    overlap_error: np.ndarray
    kinetic_offset: float

    @property
    def max_rel_error(self) -> float:
        return float(self.rel_error.max())

    @property
    def max_overlap_error(self) -> float:
        return float(self.overlap_error.max())


def compare_to_analytic(res: EigenResult, params: PhysParams, s: Sector,
                        n_levels: int | None = None) -> Deviation:
    """Per-level errors against hbar omega_c (n + 1/2) and the Hermite profiles.

    Energies compared are transverse; add ``kinetic_offset`` for the full
    dispersion.
    """
    omega = sector_omega(params, s)
    k = len(res.values)
    if n_levels is not None and n_levels != k:
        raise ArgumentError(f"result holds {k} levels, {n_levels} requested")
    n = np.arange(k)
    exact = params.hbar * omega * (n + 0.5)
    y = res.grid.points
    h = res.grid.spacing
    ov = np.empty(k)
    for j in range(k):
        phi = eigenfunction(params, s, j, y).values
        ov[j] = 1.0 - abs(h * np.dot(res.vectors[:, j], phi))
    err = np.abs(res.values - exact)
    return Deviation(n, res.values, exact, err, err / exact, ov,
                     (params.hbar * s.kx) ** 2 / (2 * params.mass))


def leading_error_estimate(params: PhysParams, s: Sector, spacing: float, n) -> np.ndarray:
    """Leading O(h^2) eigenvalue shift of the 3-point stencil (downwards).

    The stencil symbol k^2 - h^2 k^4 / 12 lowers level n by
    h^2 <p^4> / (24 m hbar^2), and <p^4> = 3/4 (2n^2 + 2n + 1) (m hbar omega)^2.
    """
    omega = sector_omega(params, s)
    n = np.asarray(n, dtype=float)
    p4 = 0.75 * (2 * n * n + 2 * n + 1) * (params.mass * params.hbar * omega) ** 2
    return spacing ** 2 * p4 / (24.0 * params.mass * params.hbar ** 2)


@dataclass
class ConvergenceTable:
    n_points: list
    spacing: list
    max_rel_error: list
    ratios: list
    fitted_order: float
    extent: float
    truncation_dominated: bool
    details: dict = field(default_factory=dict)


def convergence_study(params: PhysParams, s: Sector, n_points_list, k: int,
                      extent: float | None = None, method: str = "lapack") -> ConvergenceTable:
    """Max relative eigenvalue error of the k lowest levels per grid size.

    ``extent`` is the half-width in oscillator lengths (default as for the
    default grid).  A run is flagged truncation dominated when repeating the
    finest grid with 1.5x the extent at equal spacing changes the error by
    more than 10%.
    """
    pts = list(n_points_list)
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ArgumentError("n_points_list must be ascending")
    if any(p < 64 for p in pts):
        raise ArgumentError("each n_points must be >= 64")
    ext = default_extent(k) if extent is None else float(extent)
    omega = sector_omega(params, s)
    ell = math.sqrt(params.hbar / (params.mass * omega))
    exact = params.hbar * omega * (np.arange(k) + 0.5)

    def err_for(grid):
        res = lowest_eigenpairs(build_effective_1d(params, s, grid), k, method)
        return float(np.max(np.abs(res.values - exact) / exact))

    errs, hs = [], []
    for npts in pts:
        g = Grid1D.symmetric(ext * ell, npts)
        hs.append(g.spacing)
        errs.append(err_for(g))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0]) if len(pts) > 1 else float("nan")

    # enlarged extent at the finest spacing
    h_fine = hs[-1]
    n_big = int(round(2 * 1.5 * ext * ell / h_fine)) + 1
    big = Grid1D.symmetric(1.5 * ext * ell, n_big)
    err_big = err_for(big)
    truncated = ext < math.sqrt(2 * k + 1) or abs(errs[-1] - err_big) > 0.1 * err_big
    return ConvergenceTable(pts, hs, errs, ratios, order, ext, bool(truncated),
                            {"enlarged_extent_error": err_big})
