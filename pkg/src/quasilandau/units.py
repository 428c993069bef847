"""Physical parameters, unit conversion and the order-of-magnitude gap estimates.

All quantities are SI unless a function says otherwise.  ``hbar``, ``kB`` and
``eV`` are CODATA 2018 exact/recommended values.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

from .errors import DomainError

HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23  # J / K
EV = 1.602176634e-19  # J
EPS0 = 8.8541878128e-12  # F / m
AMU = 1.66053906660e-27  # kg
MASS_K40 = 39.96399848 * AMU


@dataclass(frozen=True)
class PhysParams:
    """Parameter set for the spin-orbit coupled channel.

    ``beta_soc`` is normally derived as ``alpha * gamma * hbar``; setting it
    explicitly models a directly engineered ``beta y^2 kx sigma_z`` coupling.
    """

    mass: float = MASS_K40
    alpha: float = 3.6e-16
    gamma: float = 1e10
    hbar: float = HBAR
    kB: float = KB
    eV: float = EV
    beta_soc: float | None = None
    temperature: float | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if self.alpha < 0 or self.gamma < 0:
            raise DomainError("alpha and gamma must be non-negative")
        if not (self.hbar > 0 and self.kB > 0 and self.eV > 0):
            raise DomainError("hbar, kB and eV must be positive")
        if self.beta_soc is not None and self.beta_soc < 0:
            raise DomainError("beta_soc must be non-negative")
        if self.temperature is not None and not self.temperature > 0:
            raise DomainError("temperature must be positive")

    @property
    def beta(self) -> float:
        """Effective coupling of the ``y^2 kx sigma_z`` term (kg m s^-2)."""
        if self.beta_soc is not None:
            return self.beta_soc
        return derived_beta(self)

    @classmethod
    def natural(cls, **kw) -> "PhysParams":
        """hbar = m = kB = 1 and alpha*gamma = 1/2, so omega_c(kx=1) = 1."""
        base = dict(mass=1.0, alpha=0.5, gamma=1.0, hbar=1.0, kB=1.0, eV=1.0)
        base.update(kw)
        return cls(**base)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["beta_effective"] = self.beta
        return d


@dataclass(frozen=True)
class EstimateReport:
    omega_c: float
    gap_J: float
    gap_eV: float
    temperature_K: float
    vx: float
    beta: float
    params_echo: PhysParams = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "omega_c": self.omega_c,
            "gap_J": self.gap_J,
            "gap_eV": self.gap_eV,
            "temperature_K": self.temperature_K,
            "vx": self.vx,
            "beta": self.beta,
            "params": self.params_echo.to_dict(),
        }


@dataclass(frozen=True)
class UnitScale:
    """Oscillator units: length sqrt(hbar/(m w)), energy hbar w, time 1/w."""

    length: float
    energy: float
    time: float
    omega: float


def derived_beta(params: PhysParams) -> float:
    return params.alpha * params.gamma * params.hbar


def cyclotron_frequency(params: PhysParams, kx: float) -> float:
    """omega_c = sqrt(2 beta kx / m) for the confined sigma_z = +1 branch."""
    if not kx > 0:
        raise DomainError(
            f"unconfined sector has no real oscillator frequency (kx={kx})")
    beta = params.beta
    if beta <= 0:
        raise DomainError(
            "unconfined sector has no real oscillator frequency (zero coupling)")
    return math.sqrt(2.0 * beta * kx / params.mass)


def estimate_gap(params: PhysParams, vx: float,
                 beta_override: float | None = None) -> EstimateReport:
    """Typical level spacing hbar*omega_c for atoms moving at ``vx``.

    Without an override the frequency is ``sqrt(2 alpha gamma vx)``, which is
    mass independent.  With ``beta_override`` it is ``sqrt(2 beta vx / hbar)``.
    """
    if not vx > 0:
        raise DomainError(f"vx must be positive, got {vx}")
    if beta_override is not None:
        if beta_override < 0:
            raise DomainError("beta_override must be non-negative")
        beta = beta_override
        omega = math.sqrt(2.0 * beta * vx / params.hbar)
    elif params.beta_soc is not None:
        beta = params.beta_soc
        omega = math.sqrt(2.0 * beta * vx / params.hbar)
    else:
        beta = derived_beta(params)
        omega = math.sqrt(2.0 * params.alpha * params.gamma * vx)
    gap = params.hbar * omega
    return EstimateReport(
        omega_c=omega,
        gap_J=gap,
        gap_eV=gap / params.eV,
        temperature_K=gap / params.kB,
        vx=vx,
        beta=beta,
        params_echo=params,
    )


def to_natural_units(params: PhysParams, kx: float) -> UnitScale:
    omega = cyclotron_frequency(params, kx)
    return scale_for_omega(params, omega)


def scale_for_omega(params: PhysParams, omega: float) -> UnitScale:
    if not omega > 0:
        raise DomainError("oscillator frequency must be positive")
    return UnitScale(
        length=math.sqrt(params.hbar / (params.mass * omega)),
        energy=params.hbar * omega,
        time=1.0 / omega,
        omega=omega,
    )


def natural_params(params: PhysParams, kx: float) -> tuple[PhysParams, float, UnitScale]:
    """Rescale to oscillator units of the sector ``(kx, +1)``.

    Returns dimensionless parameters (hbar = m = 1, omega_c(kx) = 1), the
    scaled wave number ``kx * length`` and the scale used.
    """
    scale = to_natural_units(params, kx)
    k_nat = kx * scale.length
    nat = PhysParams(mass=1.0, alpha=1.0 / (2.0 * k_nat), gamma=1.0, hbar=1.0,
                     kB=1.0, eV=1.0)
    if params.temperature is not None:
        nat = replace(nat, temperature=params.kB * params.temperature / scale.energy)
    return nat, k_nat, scale


def wave_number(params: PhysParams, vx: float) -> float:
    """kx = m vx / hbar."""
    return params.mass * vx / params.hbar
