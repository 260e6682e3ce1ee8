"""Surrogate fidelity: composite score, random search, comparison report.

The score of a surrogate run against a truth segment is

    total = lz_term * transient_term * entropy_term + symmetry_penalty

with lz_term the absolute normalized-LZ difference, transient_term the
summed squared state error over the first 1000 steps (initial
synchronization), entropy_term the summed absolute block-entropy
differences for block sizes 2..10, and a 1e9 penalty whenever the
surrogate's z dips below -1 (a mirrored or escaped orbit). Lower is
better; identical trajectories score exactly 0 through the transient
factor. The three factors are reported separately because the product
alone can hide which one collapsed.
"""

from __future__ import annotations

import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .complexity import block_entropies, lz76, markov_matrix
from .esn import (EsnDivergenceError, EsnHyperParams, TrainedEsn, fit_readout,
                  free_run, init_esn, teacher_run)
from .events import (CriticalEvent, PeakConfig, SmoothingConfig, find_peaks,
                     merge_events, smooth)
from .models import LorenzParams, Trajectory
from .returnmap import MapComparison, ReturnMap, compare_maps, map_from_maxima
from .symbolic import (LORENZ_FLIP_FLOP, PartitionSpec, SymbolSequence,
                       encode_lorenz, encode_rossler_threshold)
from .sweep import default_partition

SYMMETRY_PENALTY = 1.0e9

_SCORE_M_LO, _SCORE_M_HI = 2, 10   # block sizes entering the entropy term
_SYNC_STEPS = 1000


@dataclass(frozen=True)
class ScoreBreakdown:
    lz_term: float
    transient_term: float
    entropy_term: float
    symmetry_penalty: float
    total: float
    reason: str = ""   # non-empty when symbol extraction failed


@dataclass(frozen=True)
class SearchSpec:
    """Random-search configuration.

    spectral_radius and ridge_beta are drawn log-uniformly, the rest
    uniformly. A range with lo == hi pins that knob. ``noise_range``
    draws the std of Gaussian noise added to the teacher inputs during
    training (targets stay clean unless ``noisy_targets``); input noise
    is what keeps long free runs from wandering off the attractor.
    """
    trials: int
    n_res: int = 80
    rho_range: tuple = (0.6, 1.2)
    leak_range: tuple = (0.15, 0.8)
    input_range: tuple = (0.01, 0.1)
    density_range: tuple = (0.02, 0.2)
    beta_range: tuple = (1e-9, 1e-4)
    noise_range: tuple = (0.0, 0.0)
    noisy_targets: bool = False
    use_bias: bool = True
    washout: int = 2000
    train_len: int = 30_000
    test_len: int = 30_000
    keep_top: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name in ("rho_range", "leak_range", "input_range",
                     "density_range", "beta_range", "noise_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"{name} must be a finite (lo, hi) with lo <= hi")
        for name in ("rho_range", "beta_range"):
            lo, hi = getattr(self, name)
            if lo < hi and lo <= 0.0:
                raise ValueError(
                    f"{name} is drawn log-uniformly and needs lo > 0")
        if self.keep_top < 1:
            raise ValueError("keep_top must be >= 1")

    def min_truth_len(self) -> int:
        return self.washout + self.train_len + 1 + self.test_len


@dataclass
class TrialResult:
    trial: int
    hyper: EsnHyperParams
    noise_std: float
    score: ScoreBreakdown
    esn: Optional[TrainedEsn]   # kept for the top keep_top trials only


@dataclass
class FidelityReport:
    """Per-m conditional-entropy comparison plus the coarse deltas.

    entropy_table rows are (m, h_true, h_sur, delta) for m = 0..m_max;
    diverged_at is the free-run step of a mid-run failure, None for a
    clean run (a partial report covers the surviving prefix).
    """
    entropy_table: np.ndarray
    lz_delta: float
    markov_delta: float
    map_comparison: MapComparison
    n_true: int
    n_surrogate: int
    diverged_at: Optional[int] = None
    true_map: Optional[ReturnMap] = None
    surrogate_map: Optional[ReturnMap] = None


def _default_partition(params) -> PartitionSpec:
    return default_partition(
        "lorenz" if isinstance(params, LorenzParams) else "rossler")


def _refined_peaks(raw, smoothing: SmoothingConfig, peaks: PeakConfig,
                   channel: str, dt: float, t0: float,
                   kinds=("max", "min")) -> list:
    """Peak locations from the smoothed signal, values from the raw one.

    Smoothing flattens sharp spike tops by a couple of units, which
    would bias every threshold comparison low, so each located event is
    re-read from the raw channel within one smoothing window.
    """
    sig = smooth(raw, smoothing)
    located = merge_events(*(find_peaks(sig, peaks, kind=k, channel=channel,
                                        dt=dt, t0=t0) for k in kinds))
    events = []
    for ev in located:
        lo = max(0, ev.index - smoothing.window)
        seg = raw[lo:ev.index + smoothing.window + 1]
        k = int(np.argmax(seg)) if ev.kind == "max" else int(np.argmin(seg))
        idx = lo + k
        events.append(CriticalEvent(index=idx, time=t0 + idx * dt,
                                    value=float(raw[idx]), kind=ev.kind,
                                    channel=ev.channel))
    events.sort(key=lambda ev: ev.index)
    return events


# Shared surrogate-extraction defaults. The flip-flop partition reads
# x turns (all high-prominence); the spike partitions read z extrema
# whose quiet-phase bumps sit two orders of magnitude below the spikes,
# so their prominence floor must stay low.
_SUR_SMOOTHING = SmoothingConfig(window=10, passes=2)


def _surrogate_peaks(variant) -> tuple[str, PeakConfig]:
    if variant == LORENZ_FLIP_FLOP:
        return "x", PeakConfig(min_prominence=0.5, min_distance=40)
    # z extrema come one per x-y revolution, never closer than ~145
    # samples at dt=0.02; a distance floor just under that dedupes
    # readout wobble structurally instead of leaning on prominence.
    return "z", PeakConfig(min_prominence=0.05, min_distance=125)


def encode_surrogate(traj: Trajectory, partition: PartitionSpec,
                     params=None, smoothing: SmoothingConfig | None = None,
                     peaks: PeakConfig | None = None) -> SymbolSequence:
    """Partition encoding for reservoir output: smooth, then prominence peaks.

    Exact derivative-zero detection fires on every readout wobble, so
    surrogate channels go through the smoothing filter and
    prominence/distance peak picking first; event values are then
    re-read from the raw channel so threshold comparisons stay unbiased.
    Defaults are calibrated for the sampling used here (x at dt=0.005
    for the flip-flop partition, z at dt=0.02 for the spike threshold).
    """
    params = params if params is not None else traj.params
    if smoothing is None:
        smoothing = _SUR_SMOOTHING
    channel, default_peaks = _surrogate_peaks(partition.variant)
    if peaks is None:
        peaks = default_peaks
    events = _refined_peaks(traj.channel(channel), smoothing, peaks,
                            channel, traj.dt, traj.t0)
    if partition.variant == LORENZ_FLIP_FLOP:
        return encode_lorenz(events, partition)
    return encode_rossler_threshold(events, partition, params)


def score(true_traj: Trajectory, pred_traj: Trajectory,
          partition: PartitionSpec, params=None) -> ScoreBreakdown:
    """Composite fidelity score; lower is better, 0 for a perfect replica.

    Both trajectories are encoded through the same smoothed surrogate
    path: exact extrema detection on one side and peak picking on the
    other would let extraction bias (lost low-prominence events)
    masquerade as a dynamics mismatch. Symbol-extraction failure yields
    an infinite total with the failure reason instead of raising.
    """
    ts, ps = true_traj.samples, pred_traj.samples
    if len(ts) < _SYNC_STEPS or len(ps) < _SYNC_STEPS:
        raise ValueError(f"score needs >= {_SYNC_STEPS} steps on both sides")
    n = min(len(ts), len(ps), _SYNC_STEPS)
    transient = float(np.sum((ts[:n] - ps[:n]) ** 2))
    penalty = SYMMETRY_PENALTY if float(ps[:, 2].min()) < -1.0 else 0.0
    try:
        tb = encode_surrogate(true_traj, partition, params).bits
        pb = encode_surrogate(pred_traj, partition, params).bits
        if tb.size < 1 or pb.size < 1:
            raise ValueError("empty symbol sequence")
        lz_term = abs(lz76(tb).lz - lz76(pb).lz)
        with warnings.catch_warnings():
            # block size 10 on a test-window sequence is knowingly
            # undersampled; both sides share the bias and only the
            # difference enters the score.
            warnings.simplefilter("ignore", UserWarning)
            ht = block_entropies(tb, _SCORE_M_HI - 1)
            hp = block_entropies(pb, _SCORE_M_HI - 1)
        entropy_term = float(sum(abs(ht.H_of(m) - hp.H_of(m))
                                 for m in range(_SCORE_M_LO, _SCORE_M_HI + 1)))
    except (ValueError, RuntimeError) as exc:
        return ScoreBreakdown(math.inf, transient, math.inf, penalty,
                              math.inf, reason=str(exc))
    total = lz_term * transient * entropy_term + penalty
    return ScoreBreakdown(lz_term, transient, entropy_term, penalty, total)


def _draw_trial(spec: SearchSpec, trial: int) -> tuple[EsnHyperParams, float, int]:
    """Deterministic (hyper, noise_std, noise_seed) for one trial index."""
    base = np.random.SeedSequence([spec.seed, trial])
    esn_seed, noise_seed = (int(s) for s in base.generate_state(2))
    rng = np.random.default_rng(base.spawn(1)[0])

    def log_uniform(lo, hi):
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi)))) if lo < hi else lo

    def uniform(lo, hi):
        return float(rng.uniform(lo, hi)) if lo < hi else lo

    hyper = EsnHyperParams(
        n_res=spec.n_res,
        spectral_radius=log_uniform(*spec.rho_range),
        leak_alpha=uniform(*spec.leak_range),
        input_scaling=uniform(*spec.input_range),
        density=uniform(*spec.density_range),
        ridge_beta=log_uniform(*spec.beta_range),
        washout=spec.washout,
        train_len=spec.train_len,
        seed=esn_seed,
        use_bias=spec.use_bias)
    return hyper, uniform(*spec.noise_range), noise_seed


def train_trial(spec: SearchSpec, hyper: EsnHyperParams, noise_std: float,
                noise_seed: int, truth_samples) -> TrainedEsn:
    """Train one network on the truth prefix, with optional input noise."""
    w, t = spec.washout, spec.train_len
    teacher = np.asarray(truth_samples, dtype=float)[:w + t + 1]
    driven = teacher
    if noise_std > 0.0:
        rng = np.random.default_rng(noise_seed)
        driven = teacher + rng.normal(0.0, noise_std, teacher.shape)
    matrices = init_esn(hyper)
    run = teacher_run(matrices, hyper, driven)
    targets = (driven if spec.noisy_targets else teacher)[w + 1:]
    W_out = fit_readout(run.states[:-1], targets, hyper.ridge_beta,
                        hyper.use_bias)
    return TrainedEsn(W_R=matrices[0], W_in=matrices[1], W_out=W_out,
                      hyper=hyper, final_state=run.final_state)


def run_trial(spec: SearchSpec, trial: int, truth: Trajectory,
              partition: PartitionSpec) -> TrialResult:
    """One search trial: draw, train, free-run the test horizon, score."""
    hyper, noise_std, noise_seed = _draw_trial(spec, trial)
    start = spec.washout + spec.train_len + 1
    true_test = Trajectory(dt=truth.dt,
                           samples=truth.samples[start:start + spec.test_len],
                           params=truth.params, seed=truth.seed,
                           t0=truth.t0 + start * truth.dt)
    try:
        esn = train_trial(spec, hyper, noise_std, noise_seed, truth.samples)
        outs = free_run(esn, esn.final_state, spec.test_len).outputs
        pred = Trajectory(dt=truth.dt, samples=outs, params=truth.params,
                          seed=hyper.seed, t0=true_test.t0)
        br = score(true_test, pred, partition, truth.params)
    except (EsnDivergenceError, ValueError) as exc:
        return TrialResult(trial, hyper, noise_std,
                           ScoreBreakdown(math.inf, math.inf, math.inf, 0.0,
                                          math.inf, reason=str(exc)), None)
    return TrialResult(trial, hyper, noise_std, br, esn)


_POOL_CTX: dict = {}


def _pool_init(spec, truth, partition):
    _POOL_CTX["args"] = (spec, truth, partition)


def _pool_trial(trial: int) -> TrialResult:
    spec, truth, partition = _POOL_CTX["args"]
    return run_trial(spec, trial, truth, partition)


def random_search(spec: SearchSpec, truth: Trajectory,
                  partition: PartitionSpec | None = None,
                  threads: int = 1, progress: bool = False) -> list[TrialResult]:
    """All trials, ranked ascending by score total (ties by trial index).

    Trials are independent given (seed, trial index), so any worker count
    produces the same ranking. Only the top ``keep_top`` results keep
    their trained network; the rest carry the score alone.
    """
    if len(truth.samples) < spec.min_truth_len():
        raise ValueError(
            f"truth has {len(truth.samples)} samples; "
            f"search needs >= {spec.min_truth_len()}")
    if partition is None:
        partition = _default_partition(truth.params)
    indices = range(spec.trials)
    if threads <= 1:
        results = []
        for i in indices:
            results.append(run_trial(spec, i, truth, partition))
            if progress:
                _progress(results[-1])
    else:
        with ProcessPoolExecutor(max_workers=threads, initializer=_pool_init,
                                 initargs=(spec, truth, partition)) as pool:
            results = []
            for res in pool.map(_pool_trial, indices):
                results.append(res)
                if progress:
                    _progress(res)
    results.sort(key=lambda r: (r.score.total, r.trial))
    for r in results[spec.keep_top:]:
        r.esn = None
    return results


def _progress(res: TrialResult) -> None:
    print(f"trial {res.trial}: total={res.score.total:.6g}", file=sys.stderr)


def fidelity_report(trained: TrainedEsn, truth_long: Trajectory,
                    partition: PartitionSpec | None = None,
                    m_max: int = 6, n_bins: int = 50) -> FidelityReport:
    """Long-run comparison of a surrogate against a reference trajectory.

    The reservoir synchronizes by teacher forcing over the first
    ``washout + 1`` truth samples, then free-runs the remaining horizon;
    both trajectories are encoded over that same window, and through the
    same smoothed peak-picking pipeline so that extraction losses cancel
    instead of polluting the deltas. A mid-run divergence produces a
    report on the surviving prefix with the failing step recorded.
    """
    if partition is None:
        partition = _default_partition(truth_long.params)
    w = trained.hyper.washout
    n_total = len(truth_long.samples)
    horizon = n_total - (w + 1)
    if horizon < 2000:
        raise ValueError("truth_long too short past the washout")
    sync = teacher_run((trained.W_R, trained.W_in), trained.hyper,
                       truth_long.samples[:w + 1])
    diverged_at = None
    try:
        outs = free_run(trained, sync.final_state, horizon).outputs
    except EsnDivergenceError as exc:
        diverged_at = exc.step
        outs = exc.outputs
        if outs is None or len(outs) < 2000:
            raise
    start = w + 1
    true_part = Trajectory(dt=truth_long.dt,
                           samples=truth_long.samples[start:start + len(outs)],
                           params=truth_long.params, seed=truth_long.seed,
                           t0=truth_long.t0 + start * truth_long.dt)
    pred = Trajectory(dt=truth_long.dt, samples=outs,
                      params=truth_long.params, seed=trained.hyper.seed,
                      t0=true_part.t0)

    tb = encode_surrogate(true_part, partition).bits
    pb = encode_surrogate(pred, partition).bits
    ht = block_entropies(tb, m_max)
    hp = block_entropies(pb, m_max)
    table = np.array([[m, ht.h_of(m), hp.h_of(m),
                       abs(ht.h_of(m) - hp.h_of(m))] for m in range(m_max + 1)])
    lz_delta = abs(lz76(tb).lz - lz76(pb).lz)
    mt, mp = markov_matrix(tb), markov_matrix(pb)
    deltas = []
    for a, b in ((mt.p11, mp.p11), (mt.p10, mp.p10),
                 (mt.p01, mp.p01), (mt.p00, mp.p00)):
        if math.isnan(a) and math.isnan(b):
            continue  # both sides never leave the other symbol: agreement
        deltas.append(abs(a - b) if not (math.isnan(a) or math.isnan(b))
                      else math.inf)
    markov_delta = max(deltas) if deltas else 0.0

    # maps from the same extraction on both sides, for the same reason;
    # the map channel is z for either model, but only the spike
    # partitions carry low-prominence structure worth keeping
    z_peaks = (PeakConfig(min_prominence=0.5, min_distance=40)
               if partition.variant == LORENZ_FLIP_FLOP
               else _surrogate_peaks(partition.variant)[1])

    def peak_map(traj):
        evs = _refined_peaks(traj.channel("z"), _SUR_SMOOTHING, z_peaks,
                             "z", traj.dt, traj.t0, kinds=("max",))
        return map_from_maxima([e.value for e in evs],
                               {"channel": "z", "n_maxima": len(evs)})

    tmap, pmap = peak_map(true_part), peak_map(pred)
    cmp_maps = compare_maps(tmap, pmap, n_bins)
    return FidelityReport(entropy_table=table, lz_delta=float(lz_delta),
                          markov_delta=float(markov_delta),
                          map_comparison=cmp_maps, n_true=int(tb.size),
                          n_surrogate=int(pb.size), diverged_at=diverged_at,
                          true_map=tmap, surrogate_map=pmap)


def write_search_csv(results, path) -> None:
    """Ranked search trials; one row per trial, best first."""
    with open(path, "w") as fh:
        fh.write("trial,seed,n_res,leak,rho,input_scale,density,beta,"
                 "lz_term,transient_term,entropy_term,symmetry,total\n")
        for r in results:
            h, s = r.hyper, r.score
            fh.write("%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,"
                     "%.17g,%.17g,%.17g,%.17g,%.17g\n"
                     % (r.trial, h.seed, h.n_res, h.leak_alpha,
                        h.spectral_radius, h.input_scaling, h.density,
                        h.ridge_beta, s.lz_term, s.transient_term,
                        s.entropy_term, s.symmetry_penalty, s.total))


def write_entropy_table_csv(report: FidelityReport, path) -> None:
    with open(path, "w") as fh:
        fh.write("m,h_true,h_surrogate,delta\n")
        for m, a, b, d in report.entropy_table:
            fh.write("%d,%.17g,%.17g,%.17g\n" % (int(m), a, b, d))


def write_report_summary_csv(report: FidelityReport, path) -> None:
    with open(path, "w") as fh:
        fh.write("lz_delta,markov_delta,map_rms,map_overlap,"
                 "n_true,n_surrogate,diverged_at\n")
        div = "" if report.diverged_at is None else str(report.diverged_at)
        fh.write("%.17g,%.17g,%.17g,%.17g,%d,%d,%s\n"
                 % (report.lz_delta, report.markov_delta,
                    report.map_comparison.binned_rms,
                    report.map_comparison.overlap_fraction,
                    report.n_true, report.n_surrogate, div))
