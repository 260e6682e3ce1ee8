"""Successive-maxima return map, optionally overlaying a second map."""

import argparse
from pathlib import Path

from ._script import run
from .render import FigureSpec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Render a z-maxima return map from map CSVs.")
    ap.add_argument("--input", required=True,
                    help="map CSV with columns z_n,z_np1")
    ap.add_argument("--overlay", default=None,
                    help="optional second map CSV drawn on top")
    ap.add_argument("--output", required=True, help="image file to write")
    ap.add_argument("--dpi", type=int, default=150)
    ap.add_argument("--title", default="")
    ns = ap.parse_args(argv)
    inputs = {"data": Path(ns.input)}
    if ns.overlay:
        inputs["overlay"] = Path(ns.overlay)
    return run(FigureSpec(kind="return_map", inputs=inputs,
                          output=Path(ns.output),
                          style={"dpi": ns.dpi, "title": ns.title}))


if __name__ == "__main__":
    raise SystemExit(main())
