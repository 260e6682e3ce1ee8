"""Shared entry-point plumbing for the figure scripts."""

import sys

from .render import FigureSpec, SchemaError, render


def run(spec: FigureSpec) -> int:
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"symplots: error: {exc}", file=sys.stderr)
        return 2
    return 0
