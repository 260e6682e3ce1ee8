"""Stacked coordinate traces from a trajectory CSV (t,x,y,z)."""

import argparse
from pathlib import Path

from ._script import run
from .render import FigureSpec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Render time traces from a trajectory CSV.")
    ap.add_argument("--input", required=True,
                    help="trajectory CSV with columns t,x,y,z")
    ap.add_argument("--output", required=True, help="image file to write")
    ap.add_argument("--columns", default="x,y,z",
                    help="comma-separated coordinates to stack (default x,y,z)")
    ap.add_argument("--dpi", type=int, default=150)
    ap.add_argument("--title", default="")
    ns = ap.parse_args(argv)
    columns = tuple(c.strip() for c in ns.columns.split(",") if c.strip())
    return run(FigureSpec(kind="timeseries",
                          inputs={"data": Path(ns.input)},
                          output=Path(ns.output),
                          style={"columns": columns, "dpi": ns.dpi,
                                 "title": ns.title}))


if __name__ == "__main__":
    raise SystemExit(main())
