"""Command-line entry point wiring the library into reproducible runs.

Subcommands: ``kgamma``, ``shatter``, ``experiment``, ``mem {fit,
adversarial-demo, sample-complexity}`` and ``bounds compare``.  Successful
runs print JSON to stdout and exit 0; ``shatter`` exits 1 when the set is
not shattered; any failure prints a one-line JSON error to stderr and exits
with code 2.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import mem as mem_mod
from .experiments import run_experiment
from .reportio import (jsonable, load_labeled_matrix, load_matrix,
                       load_spectrum)
from .shattering import DEFAULT_ENUMERATION_CAP, shattering_certificate
from .spectra import CovarianceSpectrum, margin_adapted_dimension
from .subgauss import parse_distribution_spec


def _print(obj):
    print(json.dumps(jsonable(obj), sort_keys=True, indent=2))


def _spectrum_from_args(args) -> CovarianceSpectrum:
    if args.spectrum:
        return CovarianceSpectrum(np.sort(load_spectrum(args.spectrum))[::-1])
    obj = json.loads(args.spec)
    if isinstance(obj, list):
        return CovarianceSpectrum(np.sort(np.asarray(obj, float))[::-1])
    lam = parse_distribution_spec(obj).analytic_spectrum()
    return CovarianceSpectrum(np.sort(np.asarray(lam))[::-1])


def cmd_kgamma(args) -> int:
    spectrum = _spectrum_from_args(args)
    k = margin_adapted_dimension(spectrum, args.gamma)
    ceil_bound = math.ceil(spectrum.trace / (args.gamma * args.gamma))
    _print({
        "schema": "1",
        "k_gamma": k,
        "gamma": args.gamma,
        "d": spectrum.d,
        "trace": spectrum.trace,
        "min_bound_check": {
            "dimension": spectrum.d,
            "ceil_trace_over_gamma2": ceil_bound,
            "upper": min(spectrum.d, ceil_bound),
            "holds": k <= min(spectrum.d, ceil_bound),
        },
    })
    return 0


def cmd_shatter(args) -> int:
    X = load_matrix(args.matrix)
    cert = shattering_certificate(X, args.gamma, cap=args.cap)
    cert["schema"] = "1"
    cert["gamma"] = args.gamma
    cert["m"], cert["d"] = X.shape
    _print(cert)
    return 0 if cert["shattered"] else 1


def cmd_experiment(args) -> int:
    config = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        config["seed"] = args.seed
    if args.no_figures:
        config["figures"] = False
    summary = run_experiment(config, args.out_dir, threads=args.threads)
    _print(summary)
    return 0


def cmd_mem_fit(args) -> int:
    X, y = load_labeled_matrix(args.data)
    if args.heuristic:
        report = mem_mod.mem_fit_heuristic(X, y, args.gamma,
                                           restarts=args.restarts,
                                           seed=args.seed)
    else:
        report = mem_mod.mem_fit_exact(X, y, args.gamma, cap=args.exact_cap)
    _print({
        "schema": "1",
        "gamma": report.gamma,
        "m": report.m,
        "w": list(report.w),
        "norm_w": report.norm_w,
        "error_count": report.error_count,
        "empirical_margin_error": report.empirical_margin_error,
        "margin_error_nonstrict": report.margin_error_nonstrict,
        "certificate": report.certificate,
    })
    return 0


def cmd_mem_adversarial(args) -> int:
    config = {
        "experiment": "adversarial-demo",
        "spec": json.loads(args.spec),
        "gamma": args.gamma,
        "m": args.m,
        "trials": args.trials,
        "test_size": args.test_size,
        "threshold": args.threshold,
        "seed": args.seed,
    }
    if args.no_figures:
        config["figures"] = False
    summary = run_experiment(config, args.out_dir, threads=args.threads)
    _print(summary)
    return 0


def cmd_mem_sample_complexity(args) -> int:
    config = {
        "experiment": "sample-complexity",
        "spec": json.loads(args.spec),
        "algorithm": args.algorithm,
        "gamma": args.gamma,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "trials": args.trials,
        "test_size": args.test_size,
        "seed": args.seed,
    }
    if args.m_grid:
        config["m_grid"] = [int(v) for v in args.m_grid.split(",") if v != ""]
    if args.loss_star is not None:
        config["loss_star"] = args.loss_star
    if args.no_figures:
        config["figures"] = False
    summary = run_experiment(config, args.out_dir, threads=args.threads)
    _print(summary)
    return 0


def cmd_bounds_compare(args) -> int:
    spectrum = _spectrum_from_args(args)
    k = margin_adapted_dimension(spectrum, args.gamma)
    report = {
        "schema": "1",
        "gamma": args.gamma,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "k_gamma": k,
        "norm_bound": bounds_mod.norm_bound(spectrum.trace, args.gamma,
                                            args.epsilon, constant=args.c1),
        "dimension_bound": bounds_mod.dimension_bound(spectrum.d, args.epsilon,
                                                      constant=args.c1),
        "kgamma_upper_bound": bounds_mod.kgamma_upper_bound(
            k, args.epsilon, args.delta, c1=args.c1, c2=args.c2),
        "lower_bound_template": {
            "form": "beta * k_gamma - C",
            "k_gamma": k,
            "value_at_unit_constants": bounds_mod.lower_bound_value(k, 1.0, 0.0),
        },
    }
    _print(report)
    return 0


def _add_common_run_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-figures", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margindim",
        description="Margin-adapted dimension and large-margin "
                    "sample-complexity experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kgamma", help="margin-adapted dimension of a spectrum")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--spectrum", help="file with one eigenvalue per line")
    group.add_argument("--spec", help="JSON eigenvalue array or distribution spec")
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=cmd_kgamma)

    p = sub.add_parser("shatter", help="exact shattering certificate for a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    p.set_defaults(func=cmd_shatter)

    p = sub.add_parser("experiment", help="run a named experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("mem", help="margin-error minimization")
    mem_sub = p.add_subparsers(dest="mem_command", required=True)

    q = mem_sub.add_parser("fit", help="fit one labeled data file")
    q.add_argument("--data", required=True,
                   help="rows x_1,...,x_d,y with labels +-1 in the last column")
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--heuristic", action="store_true")
    q.add_argument("--restarts", type=int, default=8)
    q.add_argument("--exact-cap", type=int, default=mem_mod.EXACT_CAP_DEFAULT)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_mem_fit)

    q = mem_sub.add_parser("adversarial-demo",
                           help="flip-half lower-bound demonstration")
    q.add_argument("--spec", required=True, help="distribution spec JSON")
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--trials", type=int, default=200)
    q.add_argument("--test-size", type=int, default=2000)
    q.add_argument("--threshold", type=float, default=0.45)
    _add_common_run_flags(q)
    q.set_defaults(func=cmd_mem_adversarial)

    q = mem_sub.add_parser("sample-complexity",
                           help="empirical sample-complexity curve")
    q.add_argument("--spec", required=True, help="distribution spec JSON")
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--algorithm", default="exact",
                   choices=("exact", "heuristic", "adversarial"))
    q.add_argument("--m-grid", default=None,
                   help="comma-separated sizes; omit for auto-doubling")
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--test-size", type=int, default=2000)
    q.add_argument("--loss-star", type=float, default=None)
    _add_common_run_flags(q)
    q.set_defaults(func=cmd_mem_sample_complexity)

    p = sub.add_parser("bounds", help="bound-formula evaluation")
    bounds_sub = p.add_subparsers(dest="bounds_command", required=True)
    q = bounds_sub.add_parser("compare",
                              help="all upper bounds plus the lower-bound template")
    group = q.add_mutually_exclusive_group(required=True)
    group.add_argument("--spectrum", help="file with one eigenvalue per line")
    group.add_argument("--spec", help="JSON eigenvalue array or distribution spec")
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--c1", type=float, default=1.0)
    q.add_argument("--c2", type=float, default=1.0)
    q.set_defaults(func=cmd_bounds_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        error = {"error": str(exc), "type": type(exc).__name__}
        print(json.dumps(error, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
