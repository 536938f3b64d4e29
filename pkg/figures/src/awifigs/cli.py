"""``render_figure <recipe-file> [more recipes ...]``"""

from __future__ import annotations

import argparse
import sys

from .recipes import load_recipe
from .render import render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figure",
        description="Render awisim sweep CSVs into fixed-layout figures")
    parser.add_argument("recipes", nargs="+", help="recipe file(s), key = value format")
    args = parser.parse_args(argv)
    for path in args.recipes:
        recipe = load_recipe(path)
        render(recipe)
        print(f"{recipe.figure}: {recipe.csv.name} -> {recipe.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
