"""Figure rendering for kinkstab CSV outputs."""

__version__ = "0.1.0"

from .render import FigureJob, SchemaError, render

__all__ = ["FigureJob", "SchemaError", "render", "__version__"]
