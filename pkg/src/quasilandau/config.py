"""``key = value`` configuration files and parameter resolution."""
from __future__ import annotations

from pathlib import Path

from .errors import ConfigError, DomainError
from .units import PhysParams

KNOWN_KEYS = {"mass_kg", "alpha", "gamma", "beta_soc", "temperature_K", "vx"}


def parse_config(text: str, source: str = "<config>") -> dict[str, float]:
    """Parse UTF-8 ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: {key} is not a number: {value!r}") from None
    return out


def load_config(path: str | Path) -> dict[str, float]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from None
    return parse_config(text, str(p))


def merge(file_values: dict, overrides: dict) -> dict:
    """Flag overrides (non-None) win over file keys."""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def resolve_params(values: dict) -> PhysParams:
    kw = {}
    if "mass_kg" in values:
        kw["mass"] = values["mass_kg"]
    for key in ("alpha", "gamma"):
        if key in values:
            kw[key] = values[key]
    if "beta_soc" in values:
        kw["beta_soc"] = values["beta_soc"]
    if "temperature_K" in values:
        kw["temperature"] = values["temperature_K"]
    try:
        return PhysParams(**kw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def require(values: dict, key: str) -> float:
    if key not in values:
        raise ConfigError(f"missing required key {key!r} (config key or flag)")
    return values[key]
