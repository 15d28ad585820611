"""Render sqfock experiment bundles (CSV datasets) into figures."""

from .render import FigureSpec, render
from .schema import FIGURE_IDS, SchemaError, load_bundle

__version__ = "0.1.0"
__all__ = ["FIGURE_IDS", "FigureSpec", "SchemaError", "load_bundle", "render"]
