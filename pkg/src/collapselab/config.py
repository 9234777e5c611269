"""Line-oriented key=value run configuration.

The format is deliberately plain: one ``key = value`` per line, ``#`` starts
a comment, keys are case-insensitive.  Parameter blocks embed with the same
syntax (keys ``delta``, ``mass_m``, ``kappa``, ``mu_star``, ``eps``,
``ell``, ``gamma``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

MODES = (
    "certify4d",
    "certify2d",
    "simulate4d",
    "simulate2d",
    "sweep",
    "collapse",
    "energy",
)

MIN_GRID = 64


class ConfigError(Exception):
    """Malformed or incomplete run configuration."""


@dataclass
class RunConfig:
    mode: str
    entries: dict[str, str] = field(default_factory=dict)
    path: str | None = None

    def has(self, key: str) -> bool:
        return key in self.entries

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.entries.get(key, default)

    def get_float(self, key: str, default: float | None = None) -> float | None:
        if key not in self.entries:
            return default
        try:
            return float(self.entries[key])
        except ValueError as exc:
            raise ConfigError(f"key {key!r} is not a number: {self.entries[key]!r}") from exc

    def get_int(self, key: str, default: int | None = None) -> int | None:
        if key not in self.entries:
            return default
        try:
            return int(self.entries[key])
        except ValueError as exc:
            raise ConfigError(f"key {key!r} is not an integer: {self.entries[key]!r}") from exc

    def require_float(self, key: str) -> float:
        if key not in self.entries:
            raise ConfigError(f"mode {self.mode!r} requires key {key!r}")
        return self.get_float(key)

    @property
    def n(self) -> int:
        n = self.get_int("n", 2048)
        if n < MIN_GRID:
            raise ConfigError(f"grid size n={n} below the minimum {MIN_GRID}")
        return n

    @property
    def seed(self) -> int:
        return self.get_int("seed", 0)


def parse_config_text(text: str, path: str | None = None) -> RunConfig:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        entries[key] = value
    if "mode" not in entries:
        raise ConfigError("config has no mode")
    mode = entries.pop("mode")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
    return RunConfig(mode=mode, entries=entries, path=path)


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config_text(text, path=str(p))
