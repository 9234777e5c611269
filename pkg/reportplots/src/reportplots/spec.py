"""Plot specification files: the same key=value format as run configs."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

PLOT_KINDS = ("trajectory", "energy", "collapse", "sweep", "certificate-heatmap")


class SpecError(Exception):
    """Malformed plot specification or unusable input CSV."""


@dataclass
class PlotSpec:
    kind: str
    inputs: list[str]
    output: str
    logx: bool = False
    logy: bool = False
    title: str | None = None
    extras: dict = field(default_factory=dict)


def _as_bool(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def parse_spec_text(text: str, base: Path | None = None) -> PlotSpec:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip().lower()] = value.strip()
    kind = entries.pop("kind", None)
    if kind not in PLOT_KINDS:
        raise SpecError(f"kind must be one of {PLOT_KINDS}, got {kind!r}")
    if "input" not in entries:
        raise SpecError("spec needs an input CSV path")
    if "output" not in entries:
        raise SpecError("spec needs an output image path")
    inputs = [p.strip() for p in entries.pop("input").split(",") if p.strip()]
    if base is not None:
        inputs = [str(p if Path(p).is_absolute() else base / p) for p in inputs]
    output = entries.pop("output")
    if base is not None and not Path(output).is_absolute():
        output = str(base / output)
    return PlotSpec(
        kind=kind,
        inputs=inputs,
        output=output,
        logx=_as_bool(entries.pop("logx", "false")),
        logy=_as_bool(entries.pop("logy", "false")),
        title=entries.pop("title", None),
        extras=entries,
    )


def load_spec(path: str | Path) -> PlotSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec {p}: {exc}") from exc
    return parse_spec_text(text, base=p.parent)
