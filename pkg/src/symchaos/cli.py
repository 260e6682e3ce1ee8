"""Command-line entry point.

Subcommands: simulate, encode, measure, sweep, return-map, and esn
(train | search | report | freerun). Every run resolves its
configuration (file, then --set overrides, then dedicated flags), writes
the artifacts plus a resolved-config copy into the output directory, and
is reproducible from that copy alone.

Exit codes: 0 success, 2 configuration error, 3 numeric failure
(integration blow-up or reservoir divergence), 4 I/O or data-file error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .complexity import (measure_sequence, write_entropy_profile_csv,
                         write_report_csv)
from .config import OUTDIR_ENV, ConfigError, RunConfig
from .esn import EsnDivergenceError, free_run, load_esn, save_esn
from .fidelity import (fidelity_report, random_search, train_trial,
                       write_entropy_table_csv, write_report_summary_csv,
                       write_search_csv)
from .models import BlowUpError, Trajectory, integrate
from .returnmap import build_zmax_map, write_map_csv
from .symbolic import encode_trajectory, read_sequence, write_sequence
from .sweep import (detect_stability_windows, run_sweep, write_sweep_csv,
                    write_windows_csv)

RESOLVED_NAME = "resolved.cfg"


class DataFileError(Exception):
    """Input file exists but its content is unusable."""


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="symchaos",
        description="Symbolic-dynamics chaos measures and ESN surrogates "
                    "for the Lorenz and Rossler models.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="SECTION.KEY=VALUE",
                       help="override one config key (repeatable)")
        p.add_argument("--outdir",
                       help=f"output directory (overrides {OUTDIR_ENV} "
                            "and run.outdir)")
        p.add_argument("--seed", type=int, help="shortcut for run.seed")
        p.add_argument("--threads", type=int,
                       help="shortcut for run.threads (0 = all cores)")
        return p

    common(sub.add_parser("simulate", help="integrate and write t,x,y,z CSV"))
    common(sub.add_parser("encode", help="integrate and write the symbol "
                                         "sequence file"))
    m = common(sub.add_parser("measure", help="complexity report for a "
                                              "sequence file or a simulation"))
    m.add_argument("--sequence", help="existing 0/1 sequence file; when "
                                      "absent, simulate and encode first")
    s = common(sub.add_parser("sweep", help="one-parameter sweep CSV + "
                                            "stability windows CSV"))
    s.add_argument("--progress", action="store_true",
                   help="report each grid point on stderr")
    common(sub.add_parser("return-map", help="z-maxima return map CSV"))

    esn = sub.add_parser("esn", help="echo-state-network workflows")
    esub = esn.add_subparsers(dest="esn_command", required=True)
    common(esub.add_parser("train", help="train one ESN, save container"))
    se = common(esub.add_parser("search", help="random hyperparameter "
                                               "search, ranked CSV + winner"))
    se.add_argument("--progress", action="store_true",
                    help="report each trial on stderr")
    r = common(esub.add_parser("report", help="long-run fidelity report "
                                              "for a saved ESN"))
    r.add_argument("--esn", required=True, help="saved ESN container")
    f = common(esub.add_parser("freerun", help="free-run a saved ESN and "
                                               "emit its symbol sequence"))
    f.add_argument("--esn", required=True, help="saved ESN container")
    return top


def _load_config(args) -> RunConfig:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"run.seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"run.threads={args.threads}")
    if args.config:
        return RunConfig.from_file(args.config, overrides)
    cfg = RunConfig.defaults()
    cfg.apply_overrides(overrides)
    return cfg


def _outdir(cfg: RunConfig, args) -> str:
    path = cfg.outdir(args.outdir)
    os.makedirs(path, exist_ok=True)
    return path


def _finish(cfg: RunConfig, outdir: str) -> int:
    cfg.write_resolved(os.path.join(outdir, RESOLVED_NAME))
    return 0


def _simulate(cfg: RunConfig) -> Trajectory:
    return integrate(cfg.model_name(), cfg.model_params(), cfg.s0(),
                     cfg.integrator())


def _require_samples(cfg: RunConfig, needed: int, why: str) -> None:
    ic = cfg.integrator()
    have = int(round((ic.t_total - ic.t_transient) / ic.dt))
    if have < needed:
        raise ConfigError(
            f"integrator.t_total provides {have} samples after the "
            f"transient but {why} needs {needed}; raise t_total to at "
            f"least {ic.t_transient + needed * ic.dt:g}")


def cmd_simulate(cfg: RunConfig, outdir: str) -> int:
    traj = _simulate(cfg)
    n = len(traj.samples)
    t = traj.t0 + traj.dt * np.arange(n)
    with open(os.path.join(outdir, "trajectory.csv"), "w") as fh:
        fh.write("t,x,y,z\n")
        for i in range(n):
            fh.write("%.17g,%.17g,%.17g,%.17g\n"
                     % (t[i], *traj.samples[i]))
    return _finish(cfg, outdir)


def cmd_encode(cfg: RunConfig, outdir: str) -> int:
    seq = encode_trajectory(_simulate(cfg), cfg.partition(),
                            cfg.model_params())
    write_sequence(seq, os.path.join(outdir, "sequence.txt"))
    return _finish(cfg, outdir)


def cmd_measure(cfg: RunConfig, outdir: str, sequence_path=None) -> int:
    if sequence_path:
        try:
            bits = read_sequence(sequence_path)
        except ValueError as exc:
            raise DataFileError(str(exc)) from exc
    else:
        bits = encode_trajectory(_simulate(cfg), cfg.partition(),
                                 cfg.model_params()).bits
    report = measure_sequence(
        bits,
        m_max=cfg.get("measure", "m_max"),
        apply_correction=cfg.get("measure", "corrected"),
        max_period=cfg.get("measure", "max_period"),
        log_base=cfg.get("measure", "log_base"))
    write_report_csv(report, os.path.join(outdir, "report.csv"))
    write_entropy_profile_csv(report.entropy,
                              os.path.join(outdir, "entropy_profile.csv"))
    return _finish(cfg, outdir)


def cmd_sweep(cfg: RunConfig, outdir: str, progress: bool) -> int:
    spec = cfg.sweep_spec()
    records = run_sweep(spec, threads=cfg.threads(), progress=progress)
    windows = detect_stability_windows(
        records,
        eps_h=cfg.get("sweep", "eps_h"),
        eps_lz=cfg.get("sweep", "eps_lz"),
        eps_le=cfg.get("sweep", "eps_le"),
        sym_tol=cfg.get("sweep", "sym_tol"))
    write_sweep_csv(records, os.path.join(outdir, "sweep.csv"))
    write_windows_csv(windows, os.path.join(outdir, "windows.csv"))
    return _finish(cfg, outdir)


def cmd_return_map(cfg: RunConfig, outdir: str) -> int:
    rmap = build_zmax_map(_simulate(cfg))
    write_map_csv(rmap, os.path.join(outdir, "map.csv"))
    return _finish(cfg, outdir)


def cmd_esn_train(cfg: RunConfig, outdir: str) -> int:
    hyper = cfg.esn_hyper()
    _require_samples(cfg, hyper.washout + hyper.train_len + 1, "training")
    truth = _simulate(cfg)
    noise_seed = cfg.get("esn", "noise_seed")
    if noise_seed is None:
        noise_seed = cfg.get("run", "seed")
    # train_trial only reads washout/train_len/noisy_targets off the spec
    trained = train_trial(cfg.search_spec(), hyper, cfg.get("esn", "noise"),
                          noise_seed, truth.samples)
    save_esn(trained, os.path.join(outdir, "esn.npz"))
    return _finish(cfg, outdir)


def cmd_esn_search(cfg: RunConfig, outdir: str, progress: bool) -> int:
    spec = cfg.search_spec()
    _require_samples(cfg, spec.min_truth_len(), "the search")
    truth = _simulate(cfg)
    results = random_search(spec, truth, partition=cfg.partition(),
                            threads=cfg.threads(), progress=progress)
    write_search_csv(results, os.path.join(outdir, "search.csv"))
    winner = next((r for r in results if r.esn is not None), None)
    if winner is not None:
        save_esn(winner.esn, os.path.join(outdir, "esn.npz"))
    return _finish(cfg, outdir)


def cmd_esn_report(cfg: RunConfig, outdir: str, esn_path: str) -> int:
    trained = _load_esn_file(esn_path)
    horizon = cfg.get("report", "horizon")
    needed = trained.hyper.washout + 1 + horizon
    _require_samples(cfg, needed, "the report horizon")
    truth = _simulate(cfg)
    truth = Trajectory(dt=truth.dt, samples=truth.samples[:needed],
                       params=truth.params, seed=truth.seed, t0=truth.t0)
    report = fidelity_report(trained, truth, partition=cfg.partition(),
                             m_max=cfg.get("report", "m_max"),
                             n_bins=cfg.get("report", "n_bins"))
    write_entropy_table_csv(report,
                            os.path.join(outdir, "entropy_table.csv"))
    write_report_summary_csv(report,
                             os.path.join(outdir, "report_summary.csv"))
    write_map_csv(report.true_map, os.path.join(outdir, "true_map.csv"))
    write_map_csv(report.surrogate_map,
                  os.path.join(outdir, "surrogate_map.csv"))
    return _finish(cfg, outdir)


def cmd_esn_freerun(cfg: RunConfig, outdir: str, esn_path: str) -> int:
    from .fidelity import encode_surrogate

    trained = _load_esn_file(esn_path)
    if trained.final_state is None:
        raise DataFileError(f"{esn_path}: container carries no reservoir "
                            "state to start the free run from")
    horizon = cfg.get("freerun", "horizon")
    run = free_run(trained, trained.final_state, horizon)
    dt = cfg.get("integrator", "dt")
    pred = Trajectory(dt=dt, samples=run.outputs, params=cfg.model_params(),
                      seed=cfg.get("run", "seed"))
    seq = encode_surrogate(pred, cfg.partition(), cfg.model_params())
    write_sequence(seq, os.path.join(outdir, "sequence.txt"))
    if cfg.get("freerun", "save_trajectory"):
        t = pred.t0 + dt * np.arange(len(run.outputs))
        with open(os.path.join(outdir, "trajectory.csv"), "w") as fh:
            fh.write("t,x,y,z\n")
            for i in range(len(run.outputs)):
                fh.write("%.17g,%.17g,%.17g,%.17g\n"
                         % (t[i], *run.outputs[i]))
    return _finish(cfg, outdir)


def _load_esn_file(path):
    if not os.path.exists(path):
        raise DataFileError(f"{path}: no such file")
    try:
        return load_esn(path)
    except (ValueError, KeyError, OSError) as exc:
        raise DataFileError(f"{path}: not a valid ESN container: {exc}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        outdir = _outdir(cfg, args)
        if args.command == "simulate":
            return cmd_simulate(cfg, outdir)
        if args.command == "encode":
            return cmd_encode(cfg, outdir)
        if args.command == "measure":
            return cmd_measure(cfg, outdir, args.sequence)
        if args.command == "sweep":
            return cmd_sweep(cfg, outdir, args.progress)
        if args.command == "return-map":
            return cmd_return_map(cfg, outdir)
        if args.command == "esn":
            if args.esn_command == "train":
                return cmd_esn_train(cfg, outdir)
            if args.esn_command == "search":
                return cmd_esn_search(cfg, outdir, args.progress)
            if args.esn_command == "report":
                return cmd_esn_report(cfg, outdir, args.esn)
            return cmd_esn_freerun(cfg, outdir, args.esn)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"symchaos: config error: {exc}", file=sys.stderr)
        return 2
    except (BlowUpError, EsnDivergenceError) as exc:
        print(f"symchaos: numeric failure: {exc}", file=sys.stderr)
        return 3
    except DataFileError as exc:
        print(f"symchaos: data error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"symchaos: i/o error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        # numeric-contract violations from the science modules
        print(f"symchaos: numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
