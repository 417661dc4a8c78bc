"""Sweep configuration: ``key = value`` files overridden by command-line flags."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path

from convhelm.dispersion import Element, Formulation

PAPER_MACHS = (0.3, 0.6, 0.9)
PAPER_THETAS = (0.0, math.pi / 4, 3 * math.pi / 4, math.pi)
A1_MACHS = tuple(round(0.05 * i, 2) for i in range(20)) + (0.99,)
DEFAULT_OMEGAS = (10.0, 20.0, 40.0)
LARGE_OMEGA = 40.0


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


_PI_RE = re.compile(r"^([+-]?[0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?$")


def parse_angle(text: str) -> float:
    """Parse ``0.785``, ``pi/4``, ``3pi/4`` or ``0.25*pi``."""
    s = text.strip().lower()
    m = _PI_RE.match(s)
    if m:
        factor = m.group(1)
        num = 1.0 if factor in ("", "+") else -1.0 if factor == "-" else float(factor)
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(s)


def _floats(key: str, value: str, conv=float) -> tuple[float, ...]:
    try:
        out = tuple(conv(v) for v in value.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {value!r}") from exc
    if not out:
        raise ConfigError(key, "empty list")
    return out


def _bool(key: str, value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {value!r}")


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one sweep.  ``None`` list fields fall back to per-command defaults."""

    schemes: tuple[Element, ...] = tuple(Element)
    formulations: tuple[Formulation, ...] = (Formulation.CONVECTED,)
    machs: tuple[float, ...] | None = None
    thetas: tuple[float, ...] | None = None
    omegas: tuple[float, ...] = DEFAULT_OMEGAS
    h_max: float = 0.3
    samples: int = 60
    grid: str = "kappa"
    out: Path = Path("results")
    svg: bool = False
    allow_large: bool = False
    memory_cap_gb: float = 4.0
    workers: int = 1

    def validate(self) -> "SweepConfig":
        if not self.schemes:
            raise ConfigError("scheme", "empty list")
        if not self.formulations:
            raise ConfigError("formulation", "empty list")
        for m in self.machs or ():
            if not (0.0 <= m < 1.0):
                raise ConfigError("mach", f"{m} outside [0, 1)")
        for t in self.thetas or ():
            if not (0.0 <= t <= math.pi * (1 + 1e-15)):
                raise ConfigError("theta", f"{t} outside [0, pi]")
        for w in self.omegas:
            if not (w > 0.0 and math.isfinite(w)):
                raise ConfigError("omega", f"{w} must be positive")
            if w > LARGE_OMEGA and not self.allow_large:
                raise ConfigError("omega", f"{w} exceeds {LARGE_OMEGA:g}; pass --allow-large")
        if not (0.0 < self.h_max < math.pi):
            raise ConfigError("h_max", f"{self.h_max} outside (0, pi)")
        if self.samples < 2:
            raise ConfigError("samples", "need at least 2 samples")
        if self.grid not in ("kappa", "H"):
            raise ConfigError("grid", f"expected 'kappa' or 'H', got {self.grid!r}")
        if not self.memory_cap_gb > 0:
            raise ConfigError("memory_cap_gb", "must be positive")
        if self.workers < 1:
            raise ConfigError("workers", "must be at least 1")
        return self

    def with_defaults(self, machs, thetas) -> "SweepConfig":
        return replace(
            self,
            machs=self.machs if self.machs is not None else tuple(machs),
            thetas=self.thetas if self.thetas is not None else tuple(thetas),
        )


def _parse_schemes(key, value):
    try:
        return tuple(Element(v.strip().upper()) for v in value.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(key, f"unknown scheme in {value!r}") from exc


def _parse_formulations(key, value):
    v = value.strip().lower()
    if v == "all":
        return tuple(Formulation)
    try:
        return tuple(Formulation(s.strip()) for s in v.split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError(key, f"unknown formulation in {value!r}") from exc


def _int(key, value):
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(key, f"expected an integer, got {value!r}") from exc


def _float(key, value):
    return _floats(key, value)[0]


_PARSERS = {
    "scheme": ("schemes", _parse_schemes),
    "formulation": ("formulations", _parse_formulations),
    "mach": ("machs", lambda k, v: _floats(k, v)),
    "theta": ("thetas", lambda k, v: _floats(k, v, parse_angle)),
    "omega": ("omegas", lambda k, v: _floats(k, v)),
    "h_max": ("h_max", _float),
    "samples": ("samples", _int),
    "grid": ("grid", lambda k, v: v.strip()),
    "out": ("out", lambda k, v: Path(v.strip())),
    "svg": ("svg", _bool),
    "allow_large": ("allow_large", _bool),
    "memory_cap_gb": ("memory_cap_gb", _float),
    "workers": ("workers", _int),
}
assert {f for f, _ in _PARSERS.values()} == {f.name for f in fields(SweepConfig)}


def parse_pairs(pairs: dict[str, str]) -> dict:
    """Convert raw ``key -> text`` entries into ``SweepConfig`` field values."""
    out = {}
    for key, value in pairs.items():
        norm = key.strip().lower().replace("-", "_")
        if norm not in _PARSERS:
            raise ConfigError(key, "unknown key")
        name, parser = _PARSERS[norm]
        out[name] = parser(key, value)
    return out


def read_config_file(path: str | Path) -> dict[str, str]:
    pairs = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> SweepConfig:
    """File values first, then ``overrides`` (raw flag text keyed like the file)."""
    values = {}
    if path is not None:
        values.update(parse_pairs(read_config_file(path)))
    values.update(parse_pairs(overrides or {}))
    return SweepConfig(**values).validate()
