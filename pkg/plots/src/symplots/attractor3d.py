"""3D attractor projection from a trajectory CSV (t,x,y,z)."""

import argparse
from pathlib import Path

from ._script import run
from .render import FigureSpec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Render a 3D phase portrait from a trajectory CSV.")
    ap.add_argument("--input", required=True,
                    help="trajectory CSV with columns t,x,y,z")
    ap.add_argument("--output", required=True, help="image file to write")
    ap.add_argument("--dots", choices=("none", "x", "z"), default="none",
                    help="mark turning points of this coordinate")
    ap.add_argument("--dpi", type=int, default=150)
    ap.add_argument("--title", default="")
    ns = ap.parse_args(argv)
    return run(FigureSpec(kind="attractor3d",
                          inputs={"data": Path(ns.input)},
                          output=Path(ns.output),
                          style={"dots": ns.dots, "dpi": ns.dpi,
                                 "title": ns.title}))


if __name__ == "__main__":
    raise SystemExit(main())
