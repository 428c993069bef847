"""Quasi-Landau levels of spin-1/2 neutral atoms in a quadratic electric field."""

__version__ = "0.1.0"

from .analytic import (Confinement, Sector, classify_sector, dispersion,  # noqa: E402
                       eigenfunction, landau_contrast, probability_density,
                       spectrum_scan)
from .units import (PhysParams, cyclotron_frequency, derived_beta,  # noqa: E402
                    estimate_gap, to_natural_units)

__all__ = [
    "Confinement", "PhysParams", "Sector", "classify_sector", "cyclotron_frequency",
    "derived_beta", "dispersion", "eigenfunction", "estimate_gap", "landau_contrast",
    "probability_density", "spectrum_scan", "to_natural_units",
]
