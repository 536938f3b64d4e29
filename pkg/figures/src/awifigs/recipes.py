"""Recipe files: the same flat key-value format the simulator CLI uses.

A recipe names a figure layout, the input CSV(s) and the output image::

    figure = fig5
    csv = scan.csv
    out = fig5.png

Optional ``csv_b`` provides a second input for layouts that accept one
(fig2 can take the pump-off and pump-on scans as two files instead of one
two-axis sweep).  Relative paths are resolved against the recipe file's
directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

FIGURE_IDS = ("fig2", "fig4b", "fig5", "fig6", "fig7", "fig8")


@dataclass(frozen=True)
class FigureRecipe:
    """One render job: layout id, input CSV paths, output image path."""

    figure: str
    csv: Path
    out: Path
    csv_b: Path | None = None

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure!r}; expected one of {FIGURE_IDS}")


def load_recipe(path: str | Path) -> FigureRecipe:
    path = Path(path)
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    unknown = set(values) - {"figure", "csv", "csv_b", "out"}
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    missing = {"figure", "csv", "out"} - set(values)
    if missing:
        raise ValueError(f"{path}: missing keys {sorted(missing)}")
    base = path.parent
    return FigureRecipe(
        figure=values["figure"],
        csv=base / values["csv"],
        out=base / values["out"],
        csv_b=(base / values["csv_b"]) if "csv_b" in values else None,
    )
