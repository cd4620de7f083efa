"""Static figure rendering for sgldiff CSV outputs."""

__version__ = "0.1.0"

from .figcsv import DEFAULT_COLORS, FigureSpec, SchemaError
from .figures import render_figure1, render_figure2, save_figure

__all__ = [
    "DEFAULT_COLORS",
    "FigureSpec",
    "SchemaError",
    "render_figure1",
    "render_figure2",
    "save_figure",
]
