"""1D return maps over successive z-maxima and their comparison.

The map sends each local maximum of z to the next one. Comparing a true
map against a surrogate's uses a binned stand-in for the visual overlay:
both point clouds are bucketed over a common domain and the RMS distance
between per-bin mean images is taken over bins populated by both.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .events import derivative_zero_events
from .models import Trajectory


@dataclass
class ReturnMap:
    points: np.ndarray  # (n, 2) rows of (z_n, z_{n+1})
    source_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError("return map points must be (n, 2)")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("return map points must be finite")


@dataclass
class MapComparison:
    n_bins: int
    binned_rms: float
    overlap_fraction: float


def map_from_maxima(maxima, meta=None) -> ReturnMap:
    """Pairs of successive maxima values."""
    v = np.asarray(maxima, dtype=float)
    if len(v) < 3:
        raise ValueError("need at least three maxima for a return map")
    return ReturnMap(np.column_stack([v[:-1], v[1:]]), meta or {})


def build_zmax_map(traj: Trajectory) -> ReturnMap:
    """Return map of the trajectory's z-maxima."""
    events = derivative_zero_events(traj, "z")
    maxima = [e.value for e in events if e.kind == "max"]
    return map_from_maxima(maxima, {"channel": "z", "n_maxima": len(maxima)})


def binned_curve(rmap: ReturnMap, n_bins: int, domain=None):
    """Per-bin mean image of the map.

    Returns (centers, means, counts); bins with no points carry NaN means.
    """
    z = rmap.points[:, 0]
    if domain is None:
        domain = (float(z.min()), float(z.max()))
    lo, hi = domain
    if hi <= lo:
        raise ValueError("degenerate binning domain")
    edges = np.linspace(lo, hi, n_bins + 1)
    which = np.clip(np.digitize(z, edges) - 1, 0, n_bins - 1)
    sums = np.bincount(which, weights=rmap.points[:, 1], minlength=n_bins)
    counts = np.bincount(which, minlength=n_bins)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, means, counts


def compare_maps(true_map: ReturnMap, surrogate_map: ReturnMap,
                 n_bins: int = 50) -> MapComparison:
    """Binned RMS distance between two maps over their common domain."""
    za = true_map.points[:, 0]
    zb = surrogate_map.points[:, 0]
    lo = min(float(za.min()), float(zb.min()))
    hi = max(float(za.max()), float(zb.max()))
    _, mean_a, cnt_a = binned_curve(true_map, n_bins, (lo, hi))
    _, mean_b, cnt_b = binned_curve(surrogate_map, n_bins, (lo, hi))
    common = (cnt_a > 0) & (cnt_b > 0)
    either = (cnt_a > 0) | (cnt_b > 0)
    if not np.any(common):
        raise ValueError("maps share no populated bins")
    rms = float(np.sqrt(np.mean((mean_a[common] - mean_b[common]) ** 2)))
    return MapComparison(n_bins=n_bins, binned_rms=rms,
                         overlap_fraction=float(common.sum() / either.sum()))


def write_map_csv(rmap: ReturnMap, path) -> None:
    with open(path, "w") as fh:
        fh.write("z_n,z_np1\n")
        for a, b in rmap.points:
            fh.write("%.17g,%.17g\n" % (a, b))


def write_comparison_csv(cmp: MapComparison, path) -> None:
    with open(path, "w") as fh:
        fh.write("n_bins,binned_rms,overlap_fraction\n")
        fh.write("%d,%.17g,%.17g\n"
                 % (cmp.n_bins, cmp.binned_rms, cmp.overlap_fraction))
