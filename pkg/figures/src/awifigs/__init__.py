"""Offline figure scripts for awisim sweep CSVs.

These scripts never recompute physics: they read the versioned CSV files the
``awisim`` CLI writes and render fixed-layout figures from them, so the
simulation acceptance suite stays runnable without this package.  Rendering
is deterministic: identical CSV input yields byte-identical image files.
"""

__version__ = "0.1.0"

from .recipes import FigureRecipe, load_recipe
from .render import SchemaError, render

__all__ = ["FigureRecipe", "load_recipe", "render", "SchemaError", "__version__"]
