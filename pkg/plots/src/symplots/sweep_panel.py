"""Two-panel parameter sweep figure: measures above, Markov entries below."""

import argparse
from pathlib import Path

from ._script import run
from .render import FigureSpec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Render a two-panel sweep overview from sweep.csv.")
    ap.add_argument("--input", required=True,
                    help="sweep CSV (param,lambda_tau,h6,lz,p11,p01,p00,p10,...)")
    ap.add_argument("--windows", default=None,
                    help="optional windows CSV (param_lo,param_hi,...) to shade")
    ap.add_argument("--output", required=True, help="image file to write")
    ap.add_argument("--dpi", type=int, default=150)
    ap.add_argument("--title", default="")
    ns = ap.parse_args(argv)
    inputs = {"data": Path(ns.input)}
    if ns.windows:
        inputs["windows"] = Path(ns.windows)
    return run(FigureSpec(kind="sweep_panel", inputs=inputs,
                          output=Path(ns.output),
                          style={"dpi": ns.dpi, "title": ns.title}))


if __name__ == "__main__":
    raise SystemExit(main())
