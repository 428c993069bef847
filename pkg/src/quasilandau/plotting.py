"""Matplotlib renderings of the CSV data products (PNG, Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

params = {
    "axes.labelsize": 10,
    "font.family": "serif",
    "font.size": 9,
    "mathtext.fontset": "stix",
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.figsize": [fig_width, fig_width * golden_mean],
    "figure.dpi": 150,
    "lines.linewidth": 1.2,
}

# PNG metadata would otherwise embed the matplotlib version
_SAVE_KW = dict(metadata={"Software": None}, bbox_inches="tight")


def _figure():
    with plt.rc_context(params):
        fig, ax = plt.subplots()
    return fig, ax


def _save(fig, path):
    with plt.rc_context(params):
        fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_spectrum(scan, path):
    fig, ax = _figure()
    for n, band in enumerate(scan.bands):
        ax.plot(scan.kx_over_kmax, band, label=f"n = {n}")
    ax.set_xlabel(r"$k_x / k_{max}$")
    ax.set_ylabel(r"$E_n / \hbar\omega_{max}$")
    ax.set_xlim(0, 1)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_densities(y, densities, path, y_unit=1.0, unit_label="m"):
    fig, ax = _figure()
    for n, d in densities.items():
        ax.plot(np.asarray(y) / y_unit, d, label=f"n = {n}")
    ax.set_xlabel(f"y [{unit_label}]")
    ax.set_ylabel(r"$|\phi_n(y)|^2$")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_evolution(report, path, xlabel=r"$\omega_c t$"):
    fig, ax = _figure()
    t = np.asarray(report.times)
    ax.plot(t, report.survival_plus, label=r"$\sigma_z=+1$")
    ax.plot(t, report.survival_minus, label=r"$\sigma_z=-1$")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("survival")
    ax.set_ylim(-0.02, 1.05)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_thermal(density, path, energy_unit):
    fig, ax = _figure()
    ax.plot(density.energy_bins / energy_unit, density.weights / density.bin_width * energy_unit)
    ax.set_xlabel(r"$E / \hbar\omega_{ref}$")
    ax.set_ylabel("D(E)")
    return _save(fig, path)


def plot_convergence(table, path):
    fig, ax = _figure()
    ax.loglog(table.spacing, table.max_rel_error, "o-")
    ax.set_xlabel("grid spacing")
    ax.set_ylabel("max relative eigenvalue error")
    return _save(fig, path)
