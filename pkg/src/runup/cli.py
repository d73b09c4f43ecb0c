"""``runup`` command-line driver.

Exit codes: 0 success, 2 configuration or input error, 3 wave breaking,
4 numerical failure (non-convergence, range too short for the data).
"""
from __future__ import annotations

import sys
import warnings

import numpy as np

from runup.cases import make_case
from runup.cgt import breaking_check
from runup.config import ConfigError, RunConfig, parse_config
from runup.core import (
    BreakingError, ConvergenceError, DomainRangeError, InvalidParameterError, PhysicalIC, ScalingParams,
    ShorelineSeries, dimensionalize, make_bay, nondimensionalize,
)
from runup.csvio import emit_results, read_series_csv
from runup.forward import forward_solution
from runup.inverse import FitConvergenceWarning, compare_ic, fit_gaussian_sum, inverse_pipeline

EXIT_OK, EXIT_CONFIG, EXIT_BREAKING, EXIT_NUMERIC = 0, 2, 3, 4


def _scaling(cfg: RunConfig):
    return ScalingParams(cfg.H0, cfg.alpha, cfg.g) if cfg.dimensional else None


def _to_model(state, sp):
    return nondimensionalize(state, sp) if sp is not None else state


def _to_user(state, sp):
    return dimensionalize(state, sp) if sp is not None else state


def _load(cfg, want):
    obj = read_series_csv(cfg.input)
    if not isinstance(obj, want):
        kind = "t,R" if want is ShorelineSeries else "x,eta0,u0"
        raise InvalidParameterError(f"{cfg.input}: mode {cfg.mode} expects {kind} columns")
    return _to_model(obj, _scaling(cfg))


def _initial_condition(cfg):
    if cfg.input is not None:
        return _load(cfg, PhysicalIC)
    return make_case(cfg.case, m=cfg.m, amplitude=cfg.amplitude)


def _forward_diag(fr):
    sol = fr.solution
    tau = fr.trace.tau.nodes
    phi0 = fr.trace.phi0
    scale = float(np.max(np.abs(phi0))) or 1.0
    return {
        "forward_k_max": sol.moments.k_max,
        "forward_tau_half": float(tau[-1]),
        "forward_identity_residual": float(np.max(np.abs(sol.shoreline_phi(tau) + sol.shoreline_dpsi_dtau(tau)))) / scale,
        "forward_min_dt_dtau": fr.min_dt_dtau,
        "breaking_margin": fr.breaking_margin,
        "runup_max": float(np.max(fr.runup.R)),
        "runup_min": float(np.min(fr.runup.R)),
    }


def _inverse_diag(res):
    return {f"inverse_{k}" if k != "breaking_margin" else "inverse_breaking_margin": v
            for k, v in res.diagnostics.items()}


def run(cfg: RunConfig) -> int:
    bay = make_bay(cfg.m)
    qc = cfg.quadrature()
    sp = _scaling(cfg)
    mode = cfg.mode
    if mode in ("forward", "roundtrip"):
        ic = _initial_condition(cfg)
        fr = forward_solution(ic, cfg.proj_order, bay, qc, cfg.n_tau)
        diag = _forward_diag(fr)
        if mode == "forward":
            emit_results(cfg.out, runup=_to_user(fr.runup, sp), original=_to_user(ic, sp), diagnostics=diag)
            return EXIT_OK
        res = inverse_pipeline(fr.runup, cfg.fit_terms, bay, qc, cfg.n_lambda, cfg.n_x)
        diag.update(_inverse_diag(res))
        diag.update(compare_ic(ic, res.ic))
        emit_results(cfg.out, runup=_to_user(fr.runup, sp), recovered=_to_user(res.ic, sp),
                     original=_to_user(ic, sp), gamma=res.gamma, diagnostics=diag)
        return EXIT_OK
    if mode == "inverse":
        R = _load(cfg, ShorelineSeries)
        res = inverse_pipeline(R, cfg.fit_terms, bay, qc, cfg.n_lambda, cfg.n_x)
        emit_results(cfg.out, runup=_to_user(R, sp), recovered=_to_user(res.ic, sp), gamma=res.gamma,
                     diagnostics=_inverse_diag(res))
        return EXIT_OK
    if mode == "fit":
        R = _load(cfg, ShorelineSeries)
        fit = fit_gaussian_sum(R, cfg.fit_terms)
        scale = float(np.max(np.abs(R.R))) or 1.0
        emit_results(cfg.out, extra={"fit.csv": (("a", "b", "c"), (fit.a, fit.b, fit.c)),
                                     "runup_fit.csv": (("t", "R", "R_fit"), (R.t.nodes, R.R, fit(R.t.nodes)))},
                     diagnostics={"fit_terms": len(fit), "fit_rms": fit.residual, "fit_rms_rel": fit.residual / scale})
        return EXIT_OK
    # check-breaking
    if cfg.input is not None and isinstance(read_series_csv(cfg.input), ShorelineSeries):
        R = _load(cfg, ShorelineSeries)
        fit = fit_gaussian_sum(R, cfg.fit_terms)
        rep = breaking_check(fit, (R.t.nodes[0], R.t.nodes[-1]))
        diag = {"breaking": int(rep.breaking), "breaking_margin": rep.min_jacobian, "t_at_min": rep.t_at_min,
                "fit_rms": fit.residual}
        emit_results(cfg.out, diagnostics=diag)
        if rep.breaking:
            print(f"breaking: 1 + R'' <= {rep.threshold:g} on {rep.intervals}", file=sys.stderr)
            return EXIT_BREAKING
        return EXIT_OK
    fr = forward_solution(_initial_condition(cfg), cfg.proj_order, bay, qc, cfg.n_tau)
    emit_results(cfg.out, diagnostics={"breaking": 0, **_forward_diag(fr)})
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:  # argparse usage errors and --help
        return int(e.code or 0)
    except (ConfigError, OSError) as e:
        print(f"runup: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", FitConvergenceWarning)
            return run(cfg)
    except BreakingError as e:
        print(f"runup: wave breaking: {e}", file=sys.stderr)
        return EXIT_BREAKING
    except (ConvergenceError, DomainRangeError) as e:
        print(f"runup: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidParameterError, OSError) as e:
        print(f"runup: input error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
