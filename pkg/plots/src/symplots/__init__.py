"""Figure scripts over the simulation pipeline's CSV exports.

This package only draws. Every number it shows was computed upstream and
read back from a documented CSV schema; nothing here integrates, encodes
or estimates. Each figure kind ships as a standalone script taking
``--input``/``--output`` flags, and as a :func:`render` call for
programmatic use.
"""

from .render import KINDS, FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render", "KINDS"]
