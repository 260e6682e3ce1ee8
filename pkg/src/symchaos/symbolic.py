"""Binary partitions mapping event streams to symbol sequences.

Lorenz flip-flop partition: one symbol per turn around either wing. A
turn around the right wing culminates in an x-maximum with x > 0 and
emits "1"; a turn around the left wing culminates in an x-minimum with
x < 0 and emits "0". Inner extrema (minima with x > 0, maxima with
x < 0) occur while the orbit keeps circling the same wing and carry no
new switching information, so they are not encoded.

Rossler partitions work on z-extrema against a threshold z_th, either
fixed or placed relative to the second equilibrium (0.1*(c - ab)/a):
the "z_threshold" variant emits a symbol for every extremum (1 for a
maximum above z_th, 0 otherwise), while the "min_max" variant emits 0
for every minimum and 1 for maxima above z_th, dropping sub-threshold
maxima.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .events import derivative_zero_events
from .models import RosslerParams, Trajectory

log = logging.getLogger(__name__)

LORENZ_FLIP_FLOP = "lorenz_flip_flop"
ROSSLER_Z_THRESHOLD = "rossler_z_threshold"
ROSSLER_MIN_MAX = "rossler_min_max"

_VARIANTS = (LORENZ_FLIP_FLOP, ROSSLER_Z_THRESHOLD, ROSSLER_MIN_MAX)


@dataclass(frozen=True)
class PartitionSpec:
    variant: str = LORENZ_FLIP_FLOP
    z_threshold_mode: str = "fixed"  # "fixed" or "relative"
    z_threshold: float = 1.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown partition variant {self.variant!r}")
        if self.z_threshold_mode not in ("fixed", "relative"):
            raise ValueError("z_threshold_mode must be 'fixed' or 'relative'")


@dataclass
class SymbolSequence:
    bits: np.ndarray                 # uint8 array of 0/1
    source_meta: dict = field(default_factory=dict)
    times: np.ndarray | None = None  # emission time of each symbol

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)

    def __len__(self):
        return len(self.bits)

    def to_string(self) -> str:
        return (self.bits + ord("0")).tobytes().decode("ascii")


def resolve_z_threshold(spec: PartitionSpec, params: RosslerParams) -> float:
    if spec.z_threshold_mode == "relative":
        return 0.1 * (params.c - params.a * params.b) / params.a
    return spec.z_threshold


def _event_arrays(events):
    times = np.array([e.time for e in events], dtype=float)
    values = np.array([e.value for e in events], dtype=float)
    is_max = np.array([e.kind == "max" for e in events], dtype=bool)
    return times, values, is_max


def lorenz_turn_mask(values, is_max):
    """Mask selecting completed wing turns among x-extrema.

    True for maxima with x > 0 and minima with x < 0; inner extrema and
    boundary events sit outside both half-spaces and are excluded.
    """
    values = np.asarray(values, dtype=float)
    is_max = np.asarray(is_max, dtype=bool)
    return (is_max & (values > 0.0)) | (~is_max & (values < 0.0))


def encode_lorenz(events, spec: PartitionSpec | None = None) -> SymbolSequence:
    """Flip-flop encoding of x-channel extrema, one symbol per wing turn.

    Sign-consistent extrema (maxima at x > 0, minima at x < 0) mark
    completed turns and emit their sign bit; inner extrema are skipped.
    Events sitting exactly on x = 0 are dropped.
    """
    times, values, is_max = _event_arrays(events)
    n_boundary = int(np.count_nonzero(values == 0.0))
    if n_boundary:
        log.warning("dropping %d event(s) exactly on the x=0 boundary",
                    n_boundary)
    keep = lorenz_turn_mask(values, is_max)
    bits = (values[keep] > 0.0).astype(np.uint8)
    return SymbolSequence(bits,
                          {"variant": LORENZ_FLIP_FLOP, "channel": "x"},
                          times[keep])


def encode_rossler_threshold(events, spec: PartitionSpec,
                             params: RosslerParams) -> SymbolSequence:
    """Threshold encoding of z-channel extrema (both Rossler variants)."""
    z_th = resolve_z_threshold(spec, params)
    times, values, is_max = _event_arrays(events)
    on_boundary = is_max & (values == z_th)
    if np.any(on_boundary):
        log.warning("dropping %d maxima exactly at the threshold",
                    int(np.count_nonzero(on_boundary)))
    if spec.variant == ROSSLER_MIN_MAX:
        keep = ~is_max | (is_max & (values > z_th))
    elif spec.variant == ROSSLER_Z_THRESHOLD:
        keep = ~on_boundary
    else:
        raise ValueError(f"not a Rossler variant: {spec.variant!r}")
    bits = (is_max[keep] & (values[keep] > z_th)).astype(np.uint8)
    meta = {"variant": spec.variant, "channel": "z", "z_threshold": z_th}
    return SymbolSequence(bits, meta, times[keep])


def encode_trajectory(traj: Trajectory, spec: PartitionSpec,
                      params=None) -> SymbolSequence:
    """Detect the partition's events on a trajectory and encode them."""
    params = params if params is not None else traj.params
    if spec.variant == LORENZ_FLIP_FLOP:
        return encode_lorenz(derivative_zero_events(traj, "x"), spec)
    return encode_rossler_threshold(derivative_zero_events(traj, "z"),
                                    spec, params)


def write_sequence(seq: SymbolSequence, path) -> None:
    """Plain-text export: '0'/'1' characters, newline-terminated."""
    with open(path, "w") as fh:
        fh.write(seq.to_string())
        fh.write("\n")


def read_sequence(path) -> np.ndarray:
    """Read a '0'/'1' text file; reject any other character by offset."""
    with open(path, "rb") as fh:
        raw = fh.read()
    body = raw.rstrip(b"\r\n")
    if len(body) == 0:
        raise ValueError(f"{path}: empty symbol sequence")
    arr = np.frombuffer(body, dtype=np.uint8)
    bad = np.flatnonzero((arr != ord("0")) & (arr != ord("1")))
    if len(bad):
        raise ValueError(f"{path}: invalid character at byte offset {bad[0]}")
    return (arr - ord("0")).astype(np.uint8)
