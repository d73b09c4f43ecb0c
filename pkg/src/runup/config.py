"""Run configuration: flat ``key = value`` files merged with command-line flags."""
from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from runup.cases import PROFILES
from runup.projection import MAX_ORDER
from runup.transforms import QuadratureConfig

MODES = ("forward", "inverse", "roundtrip", "fit", "check-breaking")
NEEDS_SERIES = ("inverse", "fit")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    m: float = 2.0
    proj_order: int = 2
    n_k: int = 2048
    k_max: Optional[float] = None
    n_inner: int = 1024
    n_abel: int = 96
    n_tau: int = 512
    n_lambda: int = 512
    n_x: Optional[int] = None
    fit_terms: int = 12
    input: Optional[str] = None
    out: str = "runup_out"
    case: str = "gaussian"
    amplitude: float = 5e-5
    H0: Optional[float] = None
    alpha: Optional[float] = None
    g: float = 9.81

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(k_max=self.k_max, n_k=self.n_k, n_inner=self.n_inner, n_abel=self.n_abel)

    @property
    def dimensional(self) -> bool:
        return self.H0 is not None


# file key / flag name -> (field, type)
KEYS = {
    "mode": ("mode", str),
    "bay-m": ("m", float),
    "proj-order": ("proj_order", int),
    "nk": ("n_k", int),
    "kmax": ("k_max", float),
    "n-inner": ("n_inner", int),
    "n-abel": ("n_abel", int),
    "n-tau": ("n_tau", int),
    "n-lambda": ("n_lambda", int),
    "n-x": ("n_x", int),
    "fit-terms": ("fit_terms", int),
    "in": ("input", str),
    "out": ("out", str),
    "case": ("case", str),
    "amplitude": ("amplitude", float),
    "h0": ("H0", float),
    "alpha": ("alpha", float),
    "g": ("g", float),
}


# RunConfig field names are accepted in files as well (n_k = 1024 next to nk = 1024)
ALIASES = {name.replace("_", "-").lower(): flag for flag, (name, _) in KEYS.items() if flag != "mode"}


def _norm_key(key):
    k = key.strip().lower().replace("_", "-")
    return k if k in KEYS else ALIASES.get(k, k)


def _convert(key, raw, typ, where):
    try:
        v = typ(raw)
    except ValueError:
        raise ConfigError(f"{where}: {key} expects {typ.__name__}, got {raw!r}") from None
    if typ is float and not math.isfinite(v):
        raise ConfigError(f"{where}: {key} must be finite")
    return v


def read_config_file(path):
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        nk = _norm_key(key)
        if nk not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        name, typ = KEYS[nk]
        values[name] = _convert(key, raw, typ, f"{path}:{lineno}")
    return values


def build_parser():
    p = argparse.ArgumentParser(prog="runup", description="Run-up in a power-shaped bay: forward and inverse problems.")
    p.add_argument("mode", nargs="?", choices=MODES)
    p.add_argument("--mode", dest="mode_flag", choices=MODES, help=argparse.SUPPRESS)
    p.add_argument("--config", metavar="FILE", help="flat key = value file; flags override it")
    for flag, (name, typ) in KEYS.items():
        if flag == "mode":
            continue
        p.add_argument(f"--{flag}", dest=name, type=str, default=None, metavar=typ.__name__.upper())
    return p


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    if not cfg.m > 0:
        raise ConfigError("bay-m must be positive")
    if not 0 <= cfg.proj_order <= MAX_ORDER:
        raise ConfigError(f"proj-order must be in [0, {MAX_ORDER}]")
    for name, low in (("n_k", 16), ("n_inner", 16), ("n_abel", 16), ("n_tau", 16), ("n_lambda", 16)):
        if getattr(cfg, name) < low:
            raise ConfigError(f"{name.replace('_', '-')} must be at least {low}")
    if cfg.n_x is not None and cfg.n_x < 2:
        raise ConfigError("n-x must be at least 2")
    if cfg.k_max is not None and not cfg.k_max > 0:
        raise ConfigError("kmax must be positive")
    if cfg.fit_terms < 1:
        raise ConfigError("fit-terms must be at least 1")
    if not cfg.amplitude > 0:
        raise ConfigError("amplitude must be positive")
    if cfg.case not in PROFILES:
        raise ConfigError(f"case must be one of {sorted(PROFILES)}")
    if (cfg.H0 is None) != (cfg.alpha is None):
        raise ConfigError("h0 and alpha must be given together")
    if cfg.H0 is not None and not (cfg.H0 > 0 and cfg.alpha > 0 and cfg.g > 0):
        raise ConfigError("h0, alpha and g must be positive")
    if cfg.mode in NEEDS_SERIES and cfg.input is None:
        raise ConfigError(f"mode {cfg.mode} needs --in with a t,R series")
    return cfg


def parse_config(argv=None) -> RunConfig:
    """RunConfig from command-line arguments (and the optional --config file)."""
    ns = build_parser().parse_args(argv)
    values = read_config_file(ns.config) if ns.config else {}
    for flag, (name, typ) in KEYS.items():
        if flag == "mode":
            continue
        raw = getattr(ns, name)
        if raw is not None:
            values[name] = _convert(f"--{flag}", raw, typ, "command line")
    mode = ns.mode or ns.mode_flag or values.pop("mode", None)
    values.pop("mode", None)
    if mode is None:
        raise ConfigError("no mode given")
    known = {f.name for f in fields(RunConfig)}
    return validate(replace(RunConfig(mode=mode), **{k: v for k, v in values.items() if k in known}))


__all__ = ["RunConfig", "ConfigError", "parse_config", "read_config_file", "validate", "MODES"]
