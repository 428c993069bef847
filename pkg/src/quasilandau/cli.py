"""Command-line front end: ``quasilandau <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical precondition
violation.  Every run writes ``run-manifest.json`` next to its outputs.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import Sector, eigenfunction, probability_density, spectrum_scan
from .config import load_config, merge, require, resolve_params
from .dynamics import Grid2D, initial_packet, evolve
from .eigensolve import compare_to_analytic, convergence_study, lowest_eigenpairs
from .errors import ConfigError, QuasiLandauError
from .operators import build_effective_1d, default_grid, potential_profile
from .output import (CONVERGENCE_COLUMNS, DENSITY_COLUMNS, EIGEN_COLUMNS,
                     EVOLUTION_COLUMNS, POTENTIAL_COLUMNS, SPECTRUM_COLUMNS,
                     THERMAL_COLUMNS, spectrum_rows, write_csv, write_json)
from .thermal import ThermalEnsemble, gap_visibility, rms_kx, smeared_spectrum
from .units import cyclotron_frequency, estimate_gap, natural_params, wave_number

log = logging.getLogger("quasilandau")

DEFAULT_VX = 0.1  # m/s


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="FILE", default=d, help="key = value parameter file")
    parser.add_argument("--out", metavar="DIR", default=d if suppress else ".",
                        help="output directory (created if missing)")
    parser.add_argument("--quiet", action="store_true", default=d if suppress else False)
    parser.add_argument("--plot", action="store_true", default=d if suppress else False,
                        help="also render PNG figures next to the CSV files")
    g = parser.add_argument_group("physical parameters (SI)")
    g.add_argument("--mass", dest="mass_kg", type=float, default=d)
    g.add_argument("--alpha", type=float, default=d)
    g.add_argument("--gamma", type=float, default=d)
    g.add_argument("--beta", dest="beta_soc", type=float, default=d,
                   help="direct y^2 kx sigma_z coupling, overrides alpha*gamma*hbar")
    g.add_argument("--temperature", dest="temperature_K", type=float, default=d)
    g.add_argument("--vx", type=float, default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasilandau", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _common(parser, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        _common(p, suppress=False)
        return p

    add("estimate", "level spacing and temperature scale")

    p = add("spectrum", "bands E_n(kx) and transverse densities")
    p.add_argument("--n-bands", type=int, default=5)
    p.add_argument("--n-k", type=int, default=200)
    p.add_argument("--n-states", type=int, default=4, help="states in density.csv")
    p.add_argument("--density-points", type=int, default=401)

    p = add("eigen", "finite-difference levels versus the closed form")
    p.add_argument("--n-levels", type=int, default=8)
    p.add_argument("--n-points", type=int, default=2048)
    p.add_argument("--method", choices=("lapack", "bisection"), default="lapack")
    p.add_argument("--potential", action="store_true", help="also write potential.csv")

    p = add("convergence", "eigenvalue error versus grid size")
    p.add_argument("--n-levels", type=int, default=8)
    p.add_argument("--n-points-list", default="256,512,1024,2048")
    p.add_argument("--extent", type=float, default=None,
                   help="half-width in oscillator lengths")

    p = add("evolve", "wave-packet evolution on the ring")
    p.add_argument("--spin", choices=("+1", "-1", "superposition"), default="superposition")
    p.add_argument("--periods", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.01, help="in units of 1/omega_c")
    p.add_argument("--n-x", type=int, default=32)
    p.add_argument("--n-y", type=int, default=256)
    p.add_argument("--y-extent", type=float, default=16.0, help="oscillator lengths")
    p.add_argument("--ring-mode", type=int, default=8,
                   help="kx = ring_mode * 2 pi / circumference")
    p.add_argument("--y-trap", type=float, default=4.0, help="oscillator lengths")
    p.add_argument("--absorber", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--absorber-tau", type=float, default=0.05, help="in units of 1/omega_c")
    p.add_argument("--stride", type=int, default=20)
    p.add_argument("--snapshots", type=int, default=0, help="dump every N steps (0: off)")

    p = add("thermal", "thermally smeared spectral density")
    p.add_argument("--n-levels", type=int, default=5)
    p.add_argument("--bins", type=int, default=512)
    p.add_argument("--sigma", type=float, default=0.02,
                   help="kernel width in units of hbar omega_ref")
    p.add_argument("--drift-vx", type=float, default=0.0, help="mean ring velocity (m/s)")
    p.add_argument("--kx-samples", type=int, default=512)
    return parser


PHYS_KEYS = ("mass_kg", "alpha", "gamma", "beta_soc", "temperature_K", "vx")


def _resolve(args):
    file_values = load_config(args.config) if args.config else {}
    values = merge(file_values, {k: getattr(args, k, None) for k in PHYS_KEYS})
    return values, resolve_params(values)


def _positive_int(args, name):
    v = getattr(args, name)
    if v < 1:
        raise ConfigError(f"--{name.replace('_', '-')} must be >= 1, got {v}")
    return v


def _manifest(out: Path, command: str, values, params, options: dict, results=None):
    payload = {
        "command": command,
        "version": __version__,
        "config_values": values,
        "params": params.to_dict(),
        "options": options,
    }
    if results is not None:
        payload["results"] = results
    write_json(out / "run-manifest.json", payload)


def _options(args, names):
    return {n: getattr(args, n) for n in names}


def cmd_estimate(args, out, values, params):
    vx = require(values, "vx")
    rep = estimate_gap(params, vx, beta_override=values.get("beta_soc"))
    d = rep.to_dict()
    write_json(out / "estimate.json", d)
    text = (f"omega_c       = {rep.omega_c:.6g} 1/s\n"
            f"gap           = {rep.gap_J:.6g} J = {rep.gap_eV:.6g} eV\n"
            f"temperature   = {rep.temperature_K:.6g} K\n")
    (out / "estimate.txt").write_text(text, encoding="utf-8")
    if not args.quiet:
        print(text, end="")
    _manifest(out, "estimate", values, params, {}, d)


def _k_max(values, params):
    vx = values.get("vx", DEFAULT_VX)
    if not vx > 0:
        raise ConfigError(f"vx must be positive, got {vx}")
    return wave_number(params, vx)


def cmd_spectrum(args, out, values, params):
    _positive_int(args, "n_bands")
    if args.n_k < 2:
        raise ConfigError("--n-k must be >= 2")
    _positive_int(args, "n_states")
    k_max = _k_max(values, params)
    scan = spectrum_scan(params, k_max, args.n_bands, args.n_k)
    write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS, spectrum_rows(scan))

    sector = Sector(k_max, 1)
    nat, _, scale = natural_params(params, k_max)
    half = (math.sqrt(2 * (args.n_states - 1) + 1) + 4.0) * scale.length
    y = np.linspace(-half, half, args.density_points)
    dens = {n: probability_density(eigenfunction(params, sector, n, y))
            for n in range(args.n_states)}
    write_csv(out / "density.csv", DENSITY_COLUMNS,
              ((yi, n, di) for n, d in dens.items() for yi, di in zip(y, d)))
    if args.plot:
        from . import plotting
        plotting.plot_spectrum(scan, out / "spectrum.png")
        plotting.plot_densities(y, dens, out / "density.png", scale.length, "oscillator lengths")
    if not args.quiet:
        print(f"wrote {out / 'spectrum.csv'} ({args.n_bands * args.n_k} rows) and density.csv")
    _manifest(out, "spectrum", values, params,
              _options(args, ("n_bands", "n_k", "n_states", "density_points")),
              {"k_max": k_max, "omega_max": scan.omega_max})


def cmd_eigen(args, out, values, params):
    _positive_int(args, "n_levels")
    k_max = _k_max(values, params)
    nat, k_nat, scale = natural_params(params, k_max)
    sector = Sector(k_nat, 1)
    grid = default_grid(nat, sector, args.n_levels, args.n_points)
    op = build_effective_1d(nat, sector, grid)
    res = lowest_eigenpairs(op, args.n_levels, args.method)
    dev = compare_to_analytic(res, nat, sector)
    e = scale.energy
    write_csv(out / "eigen.csv", EIGEN_COLUMNS,
              zip(dev.n, dev.numeric * e, dev.analytic * e, dev.rel_error))
    if args.potential:
        v = potential_profile(nat, sector, grid.points)
        write_csv(out / "potential.csv", POTENTIAL_COLUMNS,
                  zip(grid.points * scale.length, v * e))
    if not args.quiet:
        print(f"max relative error {dev.max_rel_error:.3e}, "
              f"max overlap error {dev.max_overlap_error:.3e}")
    _manifest(out, "eigen", values, params,
              _options(args, ("n_levels", "n_points", "method", "potential")),
              {"max_rel_error": dev.max_rel_error,
               "max_overlap_error": dev.max_overlap_error,
               "kinetic_offset_J": (params.hbar * k_max) ** 2 / (2 * params.mass),
               "grid_half_width_m": grid.y_max * scale.length})


def cmd_convergence(args, out, values, params):
    _positive_int(args, "n_levels")
    try:
        pts = [int(s) for s in args.n_points_list.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --n-points-list {args.n_points_list!r}") from None
    k_max = _k_max(values, params)
    nat, k_nat, _ = natural_params(params, k_max)
    table = convergence_study(nat, Sector(k_nat, 1), pts, args.n_levels, args.extent)
    ratios = [float("nan")] + table.ratios
    write_csv(out / "convergence.csv", CONVERGENCE_COLUMNS,
              zip(table.n_points, table.spacing, table.max_rel_error, ratios))
    if args.plot:
        from . import plotting
        plotting.plot_convergence(table, out / "convergence.png")
    if not args.quiet:
        print(f"fitted order {table.fitted_order:.4f}; ratios "
              + ", ".join(f"{r:.4f}" for r in table.ratios)
              + (" [truncation dominated]" if table.truncation_dominated else ""))
    _manifest(out, "convergence", values, params,
              _options(args, ("n_levels", "n_points_list", "extent")),
              {"fitted_order": table.fitted_order,
               "truncation_dominated": table.truncation_dominated})


def cmd_evolve(args, out, values, params):
    k_max = _k_max(values, params)
    nat, k_nat, scale = natural_params(params, k_max)
    if args.ring_mode < 1:
        raise ConfigError("--ring-mode must be >= 1")
    lx = 2 * math.pi * args.ring_mode / k_nat
    grid = Grid2D(lx, args.n_x, -args.y_extent, args.y_extent, args.n_y, args.absorber)
    field = initial_packet(grid, nat, k_nat, 1.0, args.spin)
    n_steps = int(round(args.periods * 2 * math.pi / args.dt))
    snap_dir = out / "snapshots" if args.snapshots else None
    final, rep = evolve(field, nat, args.dt, n_steps, stride=args.stride,
                        y_trap=args.y_trap, absorber_tau=args.absorber_tau,
                        snapshot_every=args.snapshots, snapshot_dir=snap_dir)
    t_s, l_m = scale.time, scale.length
    write_csv(out / "evolution.csv", EVOLUTION_COLUMNS,
              ((t * t_s, sp, sm, wp * l_m, wm * l_m, nt) for t, sp, sm, wp, wm, nt in rep.rows()))
    if args.plot:
        from . import plotting
        plotting.plot_evolution(rep, out / "evolution.png")
    if not args.quiet:
        print(f"final survival +1: {rep.survival_plus[-1]:.6f}, -1: {rep.survival_minus[-1]:.6f}")
    _manifest(out, "evolve", values, params,
              _options(args, ("spin", "periods", "dt", "n_x", "n_y", "y_extent", "ring_mode",
                              "y_trap", "absorber", "absorber_tau", "stride", "snapshots")),
              {"time_unit_s": t_s, "length_unit_m": l_m, "kx_natural": k_nat,
               "n_steps": n_steps})


def cmd_thermal(args, out, values, params):
    _positive_int(args, "n_levels")
    t = require(values, "temperature_K")
    k_drift = wave_number(params, args.drift_vx) if args.drift_vx else 0.0
    ens = ThermalEnsemble.from_params(params, t, k_drift, args.kx_samples)
    # kernel width is set relative to the reference spacing at the rms kx
    hw_ref = params.hbar * cyclotron_frequency(params, rms_kx(ens))
    d = smeared_spectrum(ens, params, args.n_levels, args.bins, args.sigma * hw_ref)
    hw = params.hbar * d.reference_omega
    write_csv(out / "thermal.csv", THERMAL_COLUMNS,
              zip(d.energy_bins, d.energy_bins / hw, d.weights),
              comments=[f"reference_omega={d.reference_omega!r} reference_kx={d.reference_kx!r}"])
    vis = gap_visibility(d)
    if args.plot:
        from . import plotting
        plotting.plot_thermal(d, out / "thermal.png", hw)
    if not args.quiet:
        print(f"gap visibility {vis:.4f}")
    _manifest(out, "thermal", values, params,
              _options(args, ("n_levels", "bins", "sigma", "drift_vx", "kx_samples")),
              {"gap_visibility": vis, "reference_omega": d.reference_omega,
               "total_weight": float(d.weights.sum())})


COMMANDS = {
    "estimate": cmd_estimate,
    "spectrum": cmd_spectrum,
    "eigen": cmd_eigen,
    "convergence": cmd_convergence,
    "evolve": cmd_evolve,
    "thermal": cmd_thermal,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        values, params = _resolve(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](args, out, values, params)
    except ConfigError as exc:
        print(f"quasilandau: configuration error: {exc}", file=sys.stderr)
        return 2
    except QuasiLandauError as exc:
        print(f"quasilandau: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
