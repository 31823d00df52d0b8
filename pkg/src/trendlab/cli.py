"""Command-line front end: ``trendlab <theory|simulate|exact|verify>``.

Exit codes: 0 success (or all checks passed), 1 a verify check failed,
2 invalid configuration or resource error (error JSON on stderr).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import serialize, theory
from .config import SUITES, ExperimentConfig, provenance, resolve_grid
from .errors import RegimeMismatch, TrendlabError
from .model import Regime, classify_regime, limiting_proportions
from .oracle import exact_distribution, exact_moments
from .serialize import read_comments
from .sim import mem_cap, monte_carlo, monte_carlo_moments
from .suites import P1, SUITE_DEFAULTS

DEFAULT_SEED = 1729
PARAM_FLAGS = ("a", "b", "alpha", "beta", "n0", "m0")


def _add_common(p, with_sim=True):
    p.add_argument("--config", help="JSON config file, or an earlier output whose provenance is reused")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n0", type=int)
    p.add_argument("--m0", type=int)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    if with_sim:
        p.add_argument("--steps", "--n", dest="steps", type=int)
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--snapshots", help="comma-separated snapshot list")
        p.add_argument("--grid-mode", dest="grid_mode", choices=("steps", "fractions", "powers"))
        p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="closed-form limit quantities")
    _add_common(p, with_sim=False)
    p.add_argument("--bhw", action="store_true", help="embed the BHW model given --theta and --p")
    p.add_argument("--theta", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--tol", type=float, help="accuracy of the integral route for Sigma_1")

    p = sub.add_parser("simulate", help="Monte Carlo ensemble")
    _add_common(p)

    p = sub.add_parser("exact", help="exact distribution of N_n")
    _add_common(p)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("suite", choices=SUITES)
    _add_common(p)
    return parser


def _load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    if text.lstrip().startswith("#"):
        return ExperimentConfig.from_dict(read_comments(text)["provenance"]["config"])
    data = json.loads(text)
    if "provenance" in data:
        data = data["provenance"]["config"]
    elif "config" in data and "suite" in data:
        data = data["config"]
    return ExperimentConfig.from_dict(data)


def _snapshots(text):
    if text is None:
        return None
    values = []
    for item in text.split(","):
        item = item.strip()
        if item:
            v = float(item)
            values.append(int(v) if v.is_integer() and "." not in item else v)
    return values


def config_from_args(args) -> ExperimentConfig:
    if args.config:
        cfg = _load_config(args.config)
        cfg.command = args.command
    else:
        cfg = ExperimentConfig(command=args.command, seed=DEFAULT_SEED)
        if args.command == "verify":
            cfg.params = dict(SUITE_DEFAULTS[args.suite][0])
        else:
            cfg.params = dict(P1)
    if args.command == "verify":
        cfg.suite = args.suite
    for name in PARAM_FLAGS:
        value = getattr(args, name)
        if value is not None:
            cfg.params[name] = value
    for name in ("out", "format", "threads", "steps", "reps", "seed", "grid_mode", "tol"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    snaps = _snapshots(getattr(args, "snapshots", None))
    if snaps is not None:
        cfg.snapshots = snaps
    if getattr(args, "bhw", False):
        if args.theta is None or args.p is None:
            raise TrendlabError("--bhw needs --theta and --p")
        cfg.bhw = {"theta": args.theta, "p": args.p}
    if args.command in ("simulate", "exact") and cfg.steps is None:
        raise TrendlabError(f"{args.command} needs --steps/--n")
    return cfg.validate()


def _emit(text, cfg):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _matrix(m):
    return np.asarray(m).tolist()


def _theory_report(cfg) -> dict:
    notes = []
    report = {"config": cfg.content_dict()}
    if cfg.bhw:
        params, heyde = theory.bhw_embedding(cfg.bhw["theta"], cfg.bhw["p"], cfg.params.get("n0", 1), cfg.params.get("m0", 1))
        report["heyde_variance"] = heyde
        if heyde is None:
            notes.append("heyde_variance: theta <= 1/2 has no diffusive limit")
    else:
        params = cfg.model_params()
    regime = classify_regime(params)
    eig = theory.eigenstructure(params)
    report.update(
        params={**params.as_dict(), "lambda2": params.lambda2},
        regime=str(regime),
        limiting_proportions=list(limiting_proportions(params)),
        A=_matrix(theory.mean_replacement_matrix(params)),
        eigenstructure={
            "lambda1": eig.lambda1,
            "lambda2": eig.lambda2,
            "v1": eig.v1.tolist(),
            "v2": eig.v2.tolist(),
            "u1": eig.u1.tolist(),
            "u2": eig.u2.tolist(),
        },
        B=_matrix(theory.b_matrix(params)),
    )
    try:
        report["sigma1_scalar"] = theory.sigma1_scalar(params)
        report["sigma1_closed"] = _matrix(theory.sigma1_closed(params))
        report["sigma1_integral"] = _matrix(theory.sigma1_integral(params, cfg.tol or 1e-8))
    except (RegimeMismatch, TrendlabError) as exc:
        report.setdefault("sigma1_scalar", None)
        report.setdefault("sigma1_closed", None)
        report["sigma1_integral"] = None
        notes.append(f"sigma1: {exc}")
    try:
        report["sigma2"] = _matrix(theory.sigma2_critical(params))
    except RegimeMismatch as exc:
        report["sigma2"] = None
        notes.append(f"sigma2: {exc}")
    elephant = (
        regime is Regime.SUPERDIFFUSIVE
        and params.beta == 0.0
        and params.n0 == 1
        and params.m0 == 0
        and 0 < params.a < 0.25
        and abs(params.lambda2 - (1 - 2 * params.a)) < 1e-12
    )
    if elephant:
        report["w_moments"] = list(theory.elephant_w_moments(params.a).as_tuple())
    else:
        report["w_moments"] = None
        notes.append("w_moments: only defined for the elephant parameterisation (beta=0, alpha*b=1-2a, a<1/4, n0=1, m0=0)")
    report["notes"] = notes
    return report


def cmd_theory(cfg) -> int:
    _emit(serialize.dump_json(_theory_report(cfg)), cfg)
    return 0


def cmd_simulate(cfg) -> int:
    params = cfg.model_params()
    grid = resolve_grid(cfg.steps, cfg.snapshots, cfg.grid_mode)
    reps = cfg.reps or 1
    prov = provenance(cfg)
    cap = cfg.mem_cap or mem_cap()
    if 8 * reps * len(grid) > cap:
        summary = monte_carlo_moments(params, cfg.steps, grid, reps, cfg.seed, threads=cfg.threads)
        text = serialize.moments_json(summary, prov) if cfg.format == "json" else serialize.moments_csv(summary, prov)
    else:
        ens = monte_carlo(params, cfg.steps, grid, reps, cfg.seed, cfg.threads, cap=cap)
        text = serialize.ensemble_json(ens, prov) if cfg.format == "json" else serialize.ensemble_csv(ens, prov)
    _emit(text, cfg)
    return 0


def cmd_exact(cfg) -> int:
    params = cfg.model_params()
    dist = exact_distribution(params, cfg.steps)
    mom = exact_moments(params, cfg.steps)
    moments = {"raw": list(mom.raw), "central": list(mom.central)}
    prov = provenance(cfg)
    writer = serialize.pmf_json if cfg.format == "json" else serialize.pmf_csv
    _emit(writer(dist.support, dist.pmf, moments, prov), cfg)
    return 0


def cmd_verify(cfg) -> int:
    from .suites import run_suite

    report = run_suite(cfg)
    _emit(serialize.dump_json(report), cfg)
    return 0 if report["pass"] else 1


COMMAND_FUNCS = {"theory": cmd_theory, "simulate": cmd_simulate, "exact": cmd_exact, "verify": cmd_verify}


def _fail(exc) -> int:
    kind = getattr(exc, "kind", type(exc).__name__)
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMAND_FUNCS[cfg.command](cfg)
    except (TrendlabError, ValueError, KeyError, OSError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
