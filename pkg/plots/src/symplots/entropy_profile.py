"""Entropy-versus-block-length figure.

Accepts either profile export: a single-run profile (m,H_m,h_m,M_m) or a
true-versus-surrogate table (m,h_true,h_surrogate,delta). The latter is
drawn as open reference circles against filled surrogate circles.
"""

import argparse
from pathlib import Path

from ._script import run
from .render import FigureSpec


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="Render block-entropy profiles from a CSV export.")
    ap.add_argument("--input", required=True,
                    help="CSV with m,H_m,h_m or m,h_true,h_surrogate")
    ap.add_argument("--output", required=True, help="image file to write")
    ap.add_argument("--dpi", type=int, default=150)
    ap.add_argument("--title", default="")
    ns = ap.parse_args(argv)
    return run(FigureSpec(kind="entropy_profile",
                          inputs={"data": Path(ns.input)},
                          output=Path(ns.output),
                          style={"dpi": ns.dpi, "title": ns.title}))


if __name__ == "__main__":
    raise SystemExit(main())
