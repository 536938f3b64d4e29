"""Reading the simulator's versioned sweep CSVs."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "awisim-sweep-csv v1"


class SchemaError(Exception):
    """The CSV does not match the expected schema (wrong version or column)."""


@dataclass
class SweepTable:
    """Parsed sweep CSV: metadata lines, base parameters, named numeric columns."""

    metadata: dict[str, str]
    base_params: dict[str, float]
    columns: dict[str, np.ndarray]

    def require(self, *names: str) -> list[np.ndarray]:
        """Columns by name; raises SchemaError naming the first missing one."""
        out = []
        for name in names:
            if name not in self.columns:
                raise SchemaError(f"missing column {name!r} (have {sorted(self.columns)})")
            out.append(self.columns[name])
        return out

    @property
    def axis_names(self) -> list[str]:
        axes = self.metadata.get("sweep", "")
        return [part.split(":")[0].strip() for part in axes.split(";") if part.strip()]


def load_table(path: str | Path) -> SweepTable:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta: dict[str, str] = {}
    body: list[str] = []
    for line in lines:
        if line.startswith("#"):
            stripped = line[1:].strip()
            if ":" in stripped:
                key, _, val = stripped.partition(":")
                meta[key.strip()] = val.strip()
            else:
                meta.setdefault("version", stripped)
        elif line.strip():
            body.append(line)
    version = meta.get("version", "")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported or missing schema version {version!r}; "
                          f"expected {SCHEMA_VERSION!r}")
    if not body:
        raise SchemaError("CSV has no data rows")

    base_params: dict[str, float] = {}
    for token in meta.get("base", "").split():
        if "=" in token:
            key, _, val = token.partition("=")
            try:
                base_params[key] = float(val)
            except ValueError:
                pass

    reader = csv.DictReader(body)
    raw: dict[str, list[float]] = {name: [] for name in reader.fieldnames or []}
    for row in reader:
        for name in raw:
            val = row.get(name, "")
            try:
                raw[name].append(float(val))
            except (TypeError, ValueError):
                raw[name].append(np.nan)
    columns = {name: np.array(vals) for name, vals in raw.items()}
    return SweepTable(metadata=meta, base_params=base_params, columns=columns)
