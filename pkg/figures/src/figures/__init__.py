"""Batch figure rendering for robustlab result files.

Three plot kinds, one script each: the support-size tradeoff frontier, and
the two loss-decay curves. The figure layer never recomputes a loss: it
consumes the documented preamble+CSV schema and nothing else.
"""

__version__ = "0.1.0"

from .render import PlotSpec, RenderResult, render
from .io import SchemaError, read_table

__all__ = ["PlotSpec", "RenderResult", "SchemaError", "read_table", "render"]
