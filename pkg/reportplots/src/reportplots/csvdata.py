"""Reading the laboratory's CSV outputs: header, columns, footer metadata."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spec import SpecError


@dataclass
class Table:
    path: str
    header: list[str]
    columns: dict[str, np.ndarray]
    footer: dict[str, str]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SpecError(
                f"{self.path}: missing column {name!r}; has {self.header}")
        return self.columns[name]

    def require(self, names) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise SpecError(
                f"{self.path}: missing columns {missing}; has {self.header}")


def _to_float(cell: str) -> float:
    if cell == "" or cell is None:
        return math.nan
    return float(cell)


def read_table(path: str | Path) -> Table:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    footer = {}
    for ln in lines:
        if ln.startswith("#") and "=" in ln:
            key, value = ln[1:].strip().split("=", 1)
            footer[key.strip()] = value.strip()
    if not body:
        raise SpecError(f"{path}: no rows")
    rows = list(csv.reader(body))
    header = rows[0]
    data = rows[1:]
    if not data:
        raise SpecError(f"{path}: header only, no data rows")
    cols = {}
    for j, name in enumerate(header):
        raw = [r[j] if j < len(r) else "" for r in data]
        try:
            cols[name] = np.array([_to_float(c) for c in raw])
        except ValueError:
            cols[name] = np.array(raw, dtype=object)
    return Table(path=str(path), header=header, columns=cols, footer=footer)
