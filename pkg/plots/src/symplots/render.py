"""Figure construction for each supported kind.

A :class:`FigureSpec` names the kind, the input CSVs by role, the output
image path and any styling knobs; :func:`render` validates the inputs and
writes the image. All CSV reading happens before a figure is created, so
schema failures and empty files abort cleanly without leaving an output
file behind.
"""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from ._csv import SchemaError, float_column, load, read_rows

KINDS = ("attractor3d", "timeseries", "entropy_profile", "sweep_panel",
         "return_map")

MEASURE_STYLE = {"h6": dict(color="tab:blue", label="$h_6$ (bits)"),
                 "lz": dict(color="tab:orange", label="LZ"),
                 "lambda_tau": dict(color="tab:green",
                                    label=r"$\lambda\tau$ (bits)")}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: dict                   # role -> CSV path; "data" is mandatory
    output: Path
    style: dict = field(default_factory=dict)


def render(spec: FigureSpec) -> Path:
    """Write the figure described by ``spec`` and return the output path."""
    if spec.kind not in KINDS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}; "
                          f"expected one of {', '.join(KINDS)}")
    if "data" not in spec.inputs:
        raise SchemaError("spec.inputs must map 'data' to the main CSV")
    fig = _RENDERERS[spec.kind](spec)
    try:
        out = Path(spec.output)
        fig.savefig(out, dpi=int(spec.style.get("dpi", 150)))
    finally:
        plt.close(fig)
    return out


def _extrema_mask(values: np.ndarray) -> np.ndarray:
    """Interior local extrema, by sign change of successive differences.

    Display annotation only: marks where a plotted coordinate turns
    around, which is where the upstream pipeline samples its events.
    """
    d = np.diff(values)
    mask = np.zeros(len(values), dtype=bool)
    mask[1:-1] = np.sign(d[:-1]) != np.sign(d[1:])
    return mask


def _attractor3d(spec: FigureSpec):
    cols = load(spec.inputs["data"], ("t", "x", "y", "z"))
    dots = spec.style.get("dots", "none")
    if dots not in ("none", "x", "z"):
        raise SchemaError(f"dots must be none, x or z, not {dots!r}")

    fig = plt.figure(figsize=(6.0, 5.0))
    ax = fig.add_subplot(projection="3d")
    ax.plot(cols["x"], cols["y"], cols["z"], lw=0.5, color="0.3")
    if dots != "none":
        at = _extrema_mask(cols[dots])
        ax.scatter(cols["x"][at], cols["y"][at], cols["z"][at],
                   s=6, color="tab:red", depthshade=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_title(spec.style.get("title", ""))
    return fig


def _timeseries(spec: FigureSpec):
    wanted = tuple(spec.style.get("columns", ("x", "y", "z")))
    if not wanted:
        raise SchemaError("timeseries needs at least one column")
    cols = load(spec.inputs["data"], ("t",) + wanted)

    fig, axes = plt.subplots(len(wanted), 1, sharex=True,
                             figsize=(8.0, 1.0 + 1.6 * len(wanted)),
                             squeeze=False)
    for ax, name in zip(axes[:, 0], wanted):
        ax.plot(cols["t"], cols[name], lw=0.7)
        ax.set_ylabel(name)
    axes[-1, 0].set_xlabel("t")
    axes[0, 0].set_title(spec.style.get("title", ""))
    fig.tight_layout()
    return fig


def _entropy_profile(spec: FigureSpec):
    # two exports share the m column: a single-run profile (H_m, h_m) and
    # a true-vs-surrogate table (h_true, h_surrogate)
    path = spec.inputs["data"]
    header, rows = read_rows(path)
    if "m" not in header:
        raise SchemaError(f"{path}: missing column(s): m")
    m = float_column(rows, "m")

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    if "h_true" in header or "h_surrogate" in header:
        missing = [c for c in ("h_true", "h_surrogate") if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s): {', '.join(missing)}")
        ax.plot(m, float_column(rows, "h_true"), "o", mfc="none",
                color="0.2", label="reference")
        ax.plot(m, float_column(rows, "h_surrogate"), "o", color="black",
                label="surrogate")
        ax.set_ylabel("$h_m$ (bits)")
    elif "H_m" in header or "h_m" in header:
        missing = [c for c in ("H_m", "h_m") if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s): {', '.join(missing)}")
        ax.plot(m, float_column(rows, "H_m"), "s-", label="$H_m$")
        ax.plot(m, float_column(rows, "h_m"), "o-", label="$h_m$")
        ax.set_ylabel("bits")
    else:
        raise SchemaError(f"{path}: missing column(s): "
                          "h_true, h_surrogate (or H_m, h_m)")
    ax.set_xlabel("m")
    ax.legend()
    ax.set_title(spec.style.get("title", ""))
    fig.tight_layout()
    return fig


def _sweep_panel(spec: FigureSpec):
    cols = load(spec.inputs["data"],
                ("param", "lambda_tau", "h6", "lz",
                 "p11", "p01", "p00", "p10"))
    spans = None
    if "windows" in spec.inputs:
        win = load(spec.inputs["windows"], ("param_lo", "param_hi"))
        spans = list(zip(win["param_lo"], win["param_hi"]))

    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(9.0, 6.0))
    for name, opts in MEASURE_STYLE.items():
        top.plot(cols["param"], cols[name], lw=0.9, **opts)
    top.axhline(0.0, color="0.8", lw=0.6, zorder=0)
    top.set_ylabel("complexity measures")
    top.legend(loc="upper right", fontsize="small")

    for name in ("p11", "p01", "p00", "p10"):
        bottom.plot(cols["param"], cols[name], lw=0.9,
                    label=f"$p_{{{name[1:]}}}$")
    bottom.set_ylim(-0.05, 1.05)
    bottom.set_ylabel("transition probabilities")
    bottom.set_xlabel("parameter")
    bottom.legend(loc="upper right", fontsize="small", ncols=4)

    if spans:
        for lo, hi in spans:
            for ax in (top, bottom):
                ax.axvspan(lo, hi, color="tab:blue", alpha=0.12, lw=0)
    top.set_title(spec.style.get("title", ""))
    fig.tight_layout()
    return fig


def _return_map(spec: FigureSpec):
    base = load(spec.inputs["data"], ("z_n", "z_np1"))
    over = None
    if "overlay" in spec.inputs:
        over = load(spec.inputs["overlay"], ("z_n", "z_np1"))

    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    lo = np.nanmin(base["z_n"])
    hi = np.nanmax(base["z_n"])
    ax.plot([lo, hi], [lo, hi], color="0.85", lw=0.8, zorder=0)
    ax.plot(base["z_n"], base["z_np1"], ".", ms=2.5, color="0.4",
            label="reference")
    if over is not None:
        ax.plot(over["z_n"], over["z_np1"], ".", ms=1.5, color="tab:red",
                label="overlay")
        ax.legend(loc="lower right", fontsize="small")
    ax.set_xlabel("$z_n$")
    ax.set_ylabel("$z_{n+1}$")
    ax.set_title(spec.style.get("title", ""))
    fig.tight_layout()
    return fig


_RENDERERS = {"attractor3d": _attractor3d,
              "timeseries": _timeseries,
              "entropy_profile": _entropy_profile,
              "sweep_panel": _sweep_panel,
              "return_map": _return_map}
