"""Plain-text run configuration: key = value lines under [section] headers.

One schema covers every subcommand; a config file may set any subset and
each command reads only the sections it needs. Blank values mean "pick
the model-appropriate default" where one exists. Every run writes back a
fully resolved copy (all sections, concrete values) next to its outputs,
and that copy alone reproduces the run.
"""

from __future__ import annotations

import math
import os
from typing import Optional

from .esn import EsnHyperParams
from .fidelity import SearchSpec
from .models import IntegratorConfig, LorenzParams, RosslerParams
from .symbolic import (LORENZ_FLIP_FLOP, ROSSLER_MIN_MAX,
                       ROSSLER_Z_THRESHOLD, PartitionSpec)
from .sweep import SweepSpec

OUTDIR_ENV = "SYMCHAOS_OUTDIR"

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigError(Exception):
    """Config file or override rejected; message carries the location."""


def _cast_bool(s: str) -> bool:
    low = s.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _cast_int(s: str) -> int:
    return int(s, 10)


def _cast_float(s: str) -> float:
    v = float(s)
    if math.isnan(v):
        raise ValueError("nan is not a valid config value")
    return v


def _cast_str(s: str) -> str:
    return s


# section -> key -> (caster, default); None default = optional/derived
_SCHEMA = {
    "run": {
        "seed": (_cast_int, 0),
        "threads": (_cast_int, 0),          # 0 = available parallelism
        "outdir": (_cast_str, "runs"),
    },
    "model": {
        "name": (_cast_str, "lorenz"),
        "sigma": (_cast_float, 10.0),
        "r": (_cast_float, 28.0),
        "a": (_cast_float, 0.25),
        "b": (_cast_float, None),           # lorenz 8/3, rossler 0.3
        "c": (_cast_float, 4.8),
    },
    "integrator": {
        "dt": (_cast_float, 0.01),
        "t_total": (_cast_float, 500.0),
        "t_transient": (_cast_float, 100.0),
        "method": (_cast_str, "rk4"),
        "s0_x": (_cast_float, None),
        "s0_y": (_cast_float, None),
        "s0_z": (_cast_float, None),
    },
    "partition": {
        "variant": (_cast_str, None),       # model default when blank
        "z_threshold_mode": (_cast_str, "fixed"),
        "z_threshold": (_cast_float, 11.0),
    },
    "measure": {
        "m_max": (_cast_int, 10),
        "corrected": (_cast_bool, True),
        "log_base": (_cast_float, 2.0),
        "max_period": (_cast_int, None),
    },
    "sweep": {
        "param": (_cast_str, None),         # r for lorenz, a for rossler
        "lo": (_cast_float, 28.0),
        "hi": (_cast_float, 100.0),
        "step": (_cast_float, 0.25),
        "symbols": (_cast_int, 10_000),
        "eps_h": (_cast_float, 0.02),
        "eps_lz": (_cast_float, 0.02),
        "eps_le": (_cast_float, 0.02),
        "sym_tol": (_cast_float, 0.05),
        "le_t_total": (_cast_float, 800.0),
        "le_renorm": (_cast_float, 0.5),
        "le_d0": (_cast_float, 1e-8),
    },
    "esn": {
        "n_res": (_cast_int, 80),
        "leak": (_cast_float, 0.3),
        "rho": (_cast_float, 0.9),
        "input_scaling": (_cast_float, 0.5),
        "density": (_cast_float, 0.1),
        "beta": (_cast_float, 1e-6),
        "washout": (_cast_int, 2000),
        "train_len": (_cast_int, 30_000),
        "seed": (_cast_int, None),          # run seed when blank
        "use_bias": (_cast_bool, True),
        "noise": (_cast_float, 0.0),
        "noise_seed": (_cast_int, None),
    },
    "search": {
        "trials": (_cast_int, 200),
        "rho_lo": (_cast_float, 0.6), "rho_hi": (_cast_float, 1.2),
        "leak_lo": (_cast_float, 0.15), "leak_hi": (_cast_float, 0.8),
        "input_lo": (_cast_float, 0.01), "input_hi": (_cast_float, 0.1),
        "density_lo": (_cast_float, 0.02), "density_hi": (_cast_float, 0.2),
        "beta_lo": (_cast_float, 1e-9), "beta_hi": (_cast_float, 1e-4),
        "noise_lo": (_cast_float, 0.0), "noise_hi": (_cast_float, 0.0),
        "noisy_targets": (_cast_bool, False),
        "test_len": (_cast_int, 30_000),
        "keep_top": (_cast_int, 50),
    },
    "report": {
        "m_max": (_cast_int, 6),
        "n_bins": (_cast_int, 50),
        "horizon": (_cast_int, 1_000_000),
    },
    "freerun": {
        "horizon": (_cast_int, 100_000),
        "save_trajectory": (_cast_bool, False),
    },
}

_MODEL_B = {"lorenz": 8.0 / 3.0, "rossler": 0.3}
_MODEL_S0 = {"lorenz": (1.0, 1.0, 1.0), "rossler": (1.0, 1.0, 0.5)}
_MODEL_VARIANT = {"lorenz": "flip_flop", "rossler": "z_threshold"}
_VARIANT_NAMES = {
    "flip_flop": LORENZ_FLIP_FLOP,
    "z_threshold": ROSSLER_Z_THRESHOLD,
    "z_minmax": ROSSLER_MIN_MAX,
}


class RunConfig:
    """Typed view over the parsed (section, key) -> value table."""

    def __init__(self, values: dict):
        self.values = values

    @classmethod
    def defaults(cls) -> "RunConfig":
        return cls({(sec, key): default
                    for sec, keys in _SCHEMA.items()
                    for key, (_, default) in keys.items()})

    @classmethod
    def from_file(cls, path, overrides=()) -> "RunConfig":
        try:
            with open(path, "r") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
        cfg = cls.defaults()
        cfg.apply_text(text, str(path))
        cfg.apply_overrides(overrides)
        return cfg

    def apply_text(self, text: str, origin: str) -> None:
        section = None
        seen = {}
        for lineno, rawline in enumerate(text.splitlines(), start=1):
            line = rawline.strip()
            if not line or line.startswith("#"):
                continue
            where = f"{origin}:{lineno}"
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in _SCHEMA:
                    raise ConfigError(f"{where}: unknown section [{section}]")
                continue
            if "=" not in line:
                raise ConfigError(f"{where}: expected key = value, got {line!r}")
            if section is None:
                raise ConfigError(f"{where}: key outside any [section]")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"{where}: unknown key {key!r} in [{section}]")
            if (section, key) in seen:
                raise ConfigError(
                    f"{where}: duplicate key {key!r} in [{section}] "
                    f"(first set at line {seen[(section, key)]})")
            seen[(section, key)] = lineno
            self._set(section, key, raw, where)

    def apply_overrides(self, overrides) -> None:
        """Apply "section.key=value" strings (CLI flags) over the file."""
        for item in overrides:
            head, eq, raw = item.partition("=")
            if not eq:
                raise ConfigError(
                    f"override {item!r}: expected section.key=value")
            sec, dot, key = head.strip().partition(".")
            if not dot or sec not in _SCHEMA or key not in _SCHEMA.get(sec, {}):
                raise ConfigError(f"override {item!r}: unknown key {head.strip()!r}")
            self._set(sec, key, raw.strip(), f"override {item!r}")

    def _set(self, section: str, key: str, raw: str, where: str) -> None:
        caster, _default = _SCHEMA[section][key]
        if raw == "":
            self.values[(section, key)] = None
            return
        try:
            self.values[(section, key)] = caster(raw)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from exc

    def get(self, section: str, key: str):
        return self.values[(section, key)]

    # -- model-aware resolution -------------------------------------------
    # spec constructors validate their own fields; a rejection there is a
    # configuration problem, so surface it as one

    def _build(self, ctor, /, *args, **kwargs):
        try:
            return ctor(*args, **kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def model_name(self) -> str:
        name = self.get("model", "name")
        if name not in ("lorenz", "rossler"):
            raise ConfigError(f"model.name must be lorenz or rossler, not {name!r}")
        return name

    def model_params(self):
        name = self.model_name()
        b = self.get("model", "b")
        if b is None:
            b = _MODEL_B[name]
        if name == "lorenz":
            return self._build(LorenzParams,
            sigma=self.get("model", "sigma"),
                                r=self.get("model", "r"), b=b)
        return self._build(RosslerParams,
            a=self.get("model", "a"), b=b,
                             c=self.get("model", "c"))

    def s0(self):
        base = _MODEL_S0[self.model_name()]
        got = tuple(self.get("integrator", f"s0_{ax}") for ax in "xyz")
        return tuple(base[i] if got[i] is None else got[i] for i in range(3))

    def integrator(self) -> IntegratorConfig:
        return self._build(IntegratorConfig,
            dt=self.get("integrator", "dt"),
                                t_total=self.get("integrator", "t_total"),
                                t_transient=self.get("integrator", "t_transient"),
                                method=self.get("integrator", "method"))

    def partition(self) -> PartitionSpec:
        variant = self.get("partition", "variant")
        if variant is None:
            variant = _MODEL_VARIANT[self.model_name()]
        if variant not in _VARIANT_NAMES:
            raise ConfigError(
                f"partition.variant must be one of {sorted(_VARIANT_NAMES)}, "
                f"not {variant!r}")
        return self._build(PartitionSpec,
            
            variant=_VARIANT_NAMES[variant],
            z_threshold_mode=self.get("partition", "z_threshold_mode"),
            z_threshold=self.get("partition", "z_threshold"))

    def sweep_spec(self) -> SweepSpec:
        name = self.model_name()
        param = self.get("sweep", "param")
        if param is None:
            param = "r" if name == "lorenz" else "a"
        return self._build(SweepSpec,
            
            model=name, param_name=param,
            lo=self.get("sweep", "lo"), hi=self.get("sweep", "hi"),
            step=self.get("sweep", "step"),
            symbols_target=self.get("sweep", "symbols"),
            base_params=self.model_params(),
            partition=self.partition(),
            dt=self.get("integrator", "dt"),
            method=self.get("integrator", "method"),
            t_transient=self.get("integrator", "t_transient"),
            seed=self.get("run", "seed"),
            le_t_total=self.get("sweep", "le_t_total"),
            le_renorm_interval=self.get("sweep", "le_renorm"),
            le_d0=self.get("sweep", "le_d0"))

    def esn_hyper(self) -> EsnHyperParams:
        seed = self.get("esn", "seed")
        if seed is None:
            seed = self.get("run", "seed")
        return self._build(EsnHyperParams,
            
            n_res=self.get("esn", "n_res"),
            leak_alpha=self.get("esn", "leak"),
            spectral_radius=self.get("esn", "rho"),
            input_scaling=self.get("esn", "input_scaling"),
            density=self.get("esn", "density"),
            ridge_beta=self.get("esn", "beta"),
            washout=self.get("esn", "washout"),
            train_len=self.get("esn", "train_len"),
            seed=seed,
            use_bias=self.get("esn", "use_bias"))

    def search_spec(self) -> SearchSpec:
        def g(key):
            return self.get("search", key)
        return self._build(SearchSpec,
            
            trials=g("trials"),
            n_res=self.get("esn", "n_res"),
            rho_range=(g("rho_lo"), g("rho_hi")),
            leak_range=(g("leak_lo"), g("leak_hi")),
            input_range=(g("input_lo"), g("input_hi")),
            density_range=(g("density_lo"), g("density_hi")),
            beta_range=(g("beta_lo"), g("beta_hi")),
            noise_range=(g("noise_lo"), g("noise_hi")),
            noisy_targets=g("noisy_targets"),
            use_bias=self.get("esn", "use_bias"),
            washout=self.get("esn", "washout"),
            train_len=self.get("esn", "train_len"),
            test_len=g("test_len"),
            keep_top=g("keep_top"),
            seed=self.get("run", "seed"))

    def threads(self) -> int:
        n = self.get("run", "threads")
        if n < 0:
            raise ConfigError("run.threads must be >= 0")
        return n if n > 0 else (os.cpu_count() or 1)

    def outdir(self, flag: Optional[str] = None) -> str:
        """Output directory: flag > environment > config."""
        if flag:
            return flag
        env = os.environ.get(OUTDIR_ENV, "").strip()
        if env:
            return env
        return self.get("run", "outdir")

    # -- resolved emission -------------------------------------------------

    def resolved_text(self) -> str:
        """Concrete key = value dump; parsing it back reproduces the run."""
        out = []
        for sec in _SCHEMA:
            out.append(f"[{sec}]")
            for key in _SCHEMA[sec]:
                v = self.values[(sec, key)]
                if v is None:
                    v = self._concrete_default(sec, key)
                if v is None:
                    out.append(f"{key} =")
                elif isinstance(v, bool):
                    out.append(f"{key} = {'true' if v else 'false'}")
                elif isinstance(v, float):
                    out.append(f"{key} = {v!r}")
                else:
                    out.append(f"{key} = {v}")
            out.append("")
        return "\n".join(out)

    def _concrete_default(self, sec: str, key: str):
        name = self.model_name()
        if (sec, key) == ("model", "b"):
            return _MODEL_B[name]
        if sec == "integrator" and key.startswith("s0_"):
            return _MODEL_S0[name]["xyz".index(key[-1])]
        if (sec, key) == ("partition", "variant"):
            return _MODEL_VARIANT[name]
        if (sec, key) == ("sweep", "param"):
            return "r" if name == "lorenz" else "a"
        if (sec, key) == ("esn", "seed"):
            return self.get("run", "seed")
        return None

    def write_resolved(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.resolved_text())
