"""Critical-event detection on trajectories and noisy signals.

Two detectors are provided. ``derivative_zero_events`` finds every sign
change of the discrete first difference (all local extrema) and refines
event time and value by a quadratic fit through the three bracketing
samples; it is meant for clean model output. ``find_peaks`` wraps
prominence/distance filtering for signals where noise creates spurious
extrema (reservoir predictions), with ``smooth`` as the pre-filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .models import Trajectory


@dataclass(frozen=True)
class CriticalEvent:
    index: int
    time: float
    value: float
    kind: str  # "max" or "min"
    channel: str


@dataclass(frozen=True)
class PeakConfig:
    min_prominence: float = 0.1
    min_distance: int = 150

    def __post_init__(self):
        if self.min_prominence < 0:
            raise ValueError("min_prominence must be non-negative")
        if self.min_distance < 1:
            raise ValueError("min_distance must be at least 1")


@dataclass(frozen=True)
class SmoothingConfig:
    window: int = 20
    passes: int = 3

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.passes < 0:
            raise ValueError("passes must be non-negative")


def extrema_arrays(signal, dt: float = 1.0, t0: float = 0.0):
    """All local extrema of a sampled signal, as flat arrays.

    Returns (indices, times, values, kinds) with kinds[j] = 1 for maxima
    and 0 for minima. Event positions are refined by the vertex of the
    parabola through the three bracketing samples; plateaus collapse to a
    single event at the plateau midpoint with no refinement.
    """
    x = np.asarray(signal, dtype=float)
    if len(x) < 3:
        raise ValueError("signal too short for extrema detection")
    d = np.diff(x)
    s = np.sign(d)
    nz = np.flatnonzero(s)
    if len(nz) < 2:
        return (np.empty(0, dtype=int), np.empty(0), np.empty(0),
                np.empty(0, dtype=np.uint8))
    sgn = s[nz]
    flips = np.flatnonzero(sgn[:-1] != sgn[1:])
    if len(flips) == 0:
        return (np.empty(0, dtype=int), np.empty(0), np.empty(0),
                np.empty(0, dtype=np.uint8))
    left = nz[flips]        # last sample index before the turn
    right = nz[flips + 1]   # first difference index after the turn
    idx = (left + 1 + right) // 2  # equals left+1 unless a plateau intervenes
    kinds = (sgn[flips] > 0).astype(np.uint8)

    xm = x[idx - 1]
    xc = x[idx]
    xp = x[idx + 1]
    denom = xm - 2.0 * xc + xp
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(denom != 0.0, 0.5 * (xm - xp) / denom, 0.0)
    delta = np.clip(delta, -1.0, 1.0)
    times = t0 + (idx + delta) * dt
    values = xc - 0.25 * (xm - xp) * delta
    return idx, times, values, kinds


def derivative_zero_events(traj: Trajectory, channel: str) -> list[CriticalEvent]:
    """Local extrema of one trajectory channel as CriticalEvent records."""
    sig = traj.channel(channel)
    idx, times, values, kinds = extrema_arrays(sig, traj.dt, traj.t0)
    return [CriticalEvent(int(i), float(t), float(v),
                          "max" if k else "min", channel)
            for i, t, v, k in zip(idx, times, values, kinds)]


def smooth(signal, cfg: SmoothingConfig) -> np.ndarray:
    """Repeated centered moving average; edges use shrinking windows."""
    x = np.asarray(signal, dtype=float)
    if cfg.window > len(x):
        raise ValueError(f"window {cfg.window} exceeds signal length {len(x)}")
    if cfg.passes == 0 or cfg.window == 1:
        return x.copy()
    n = len(x)
    pos = np.arange(n)
    lo = np.maximum(pos - (cfg.window - 1) // 2, 0)
    hi = np.minimum(pos + cfg.window // 2 + 1, n)
    width = (hi - lo).astype(float)
    for _ in range(cfg.passes):
        c = np.concatenate(([0.0], np.cumsum(x)))
        x = (c[hi] - c[lo]) / width
    return x


def find_peaks(signal, cfg: PeakConfig, kind: str = "max",
               channel: str = "z", dt: float = 1.0,
               t0: float = 0.0) -> list[CriticalEvent]:
    """Prominence- and distance-filtered extrema of one kind.

    Taller peaks win distance conflicts; flat tops count once, at the
    plateau midpoint. Minima are found on the negated signal but reported
    with the original signal value.
    """
    if kind not in ("max", "min"):
        raise ValueError("kind must be 'max' or 'min'")
    x = np.asarray(signal, dtype=float)
    if len(x) < 3:
        raise ValueError("signal too short for peak detection")
    y = x if kind == "max" else -x
    idx, _ = _scipy_find_peaks(y, prominence=cfg.min_prominence,
                               distance=cfg.min_distance)
    return [CriticalEvent(int(i), t0 + dt * float(i), float(x[i]),
                          kind, channel) for i in idx]


def merge_events(*event_lists) -> list[CriticalEvent]:
    """Merge event lists into one stream ordered by time."""
    merged = [e for lst in event_lists for e in lst]
    merged.sort(key=lambda e: e.time)
    return merged


def mean_inter_event_time(events) -> float:
    """Arithmetic mean of successive event-time differences."""
    times = _event_times(events)
    if len(times) < 2:
        raise ValueError("need at least two events for an interval")
    return float(np.mean(np.diff(times)))


def _event_times(events) -> np.ndarray:
    if isinstance(events, np.ndarray):
        return events
    return np.array([e.time for e in events], dtype=float)


def write_events_csv(events, path) -> None:
    with open(path, "w") as fh:
        fh.write("index,time,value,kind,channel\n")
        for e in events:
            fh.write("%d,%.17g,%.17g,%s,%s\n"
                     % (e.index, e.time, e.value, e.kind, e.channel))
