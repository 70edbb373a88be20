"""Schema-v1 CSV loading for the exchange-cli artifacts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

VERSION_LINE = "# typed-exchange csv v1"

REQUIRED_COLUMNS = {
    "phase": ("instance", "n", "k", "status", "wall_ms"),
    "mink": ("instance", "n", "k_min", "conservative"),
    "threshold": ("instance", "n", "t", "fraction"),
}


class SchemaError(ValueError):
    """The CSV does not match schema v1 for the requested figure kind."""


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: tuple  # of dicts keyed by column name

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]


def load_csv(path: Union[str, Path], kind: str) -> Table:
    """Parse and validate a schema-v1 CSV for the given figure kind."""
    if kind not in REQUIRED_COLUMNS:
        raise SchemaError(f"unknown figure kind {kind!r}")
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != VERSION_LINE:
        raise SchemaError(
            f"{path}: missing version line {VERSION_LINE!r}"
        )
    if len(lines) < 2:
        raise SchemaError(f"{path}: missing header row")
    columns = tuple(lines[1].split(","))
    missing = [c for c in REQUIRED_COLUMNS[kind] if c not in columns]
    if missing:
        raise SchemaError(
            f"{path}: kind {kind!r} needs columns {missing}, "
            f"file has {list(columns)}"
        )
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise SchemaError(
                f"{path}:{lineno}: {len(parts)} fields, expected {len(columns)}"
            )
        rows.append(dict(zip(columns, parts)))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(columns, tuple(rows))
