"""Named, reproducible experiments emitting CSV tables, JSON summaries, and
figures.

Every experiment is a pure function of its resolved configuration: the seed
is part of the config, per-trial randomness is keyed by (seed, trial), and
trial scheduling never feeds back into the numbers, so re-running a config
reproduces byte-identical CSV bodies for any ``--threads`` value.  Each
output embeds the resolved config (CSV as a ``# config=`` comment line,
JSON as a field).  Figures are rendered by default and can be disabled with
``"figures": false``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import bounds, figures, gram, mem
from .rng import map_trials, seed_path
from .reportio import jsonable, write_csv, write_json
from .shattering import DEFAULT_ENUMERATION_CAP
from .spectra import (CovarianceSpectrum, margin_adapted_dimension,
                      mixture_gaussian_kgamma)
from .subgauss import parse_distribution_spec

__all__ = ["EXPERIMENTS", "run_experiment"]

SCHEMA_VERSION = "1"


def _spec_from(config):
    return parse_distribution_spec(config["spec"])


def _resolve(config, defaults):
    resolved = dict(defaults)
    resolved.update(config)
    resolved["seed"] = int(resolved.get("seed", 0))
    resolved["figures"] = bool(resolved.get("figures", True))
    return resolved


def _emit(out_dir, stem, columns, rows, summary, config):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}_summary.json"
    write_csv(csv_path, columns, rows, config=config)
    summary = dict(summary)
    summary["schema"] = SCHEMA_VERSION
    summary["config"] = jsonable(config)
    summary.setdefault("files", {})["csv"] = csv_path.name
    write_json(json_path, summary)
    return summary


def _config_for_embedding(resolved):
    cfg = {k: v for k, v in resolved.items() if k != "figures"}
    if "spec" in cfg:
        cfg["spec"] = parse_distribution_spec(cfg["spec"]).to_config()
    return jsonable(cfg)


def run_eig_curve(config, out_dir, threads=1):
    resolved = _resolve(config, {"trials": 200, "delta": None})
    spec = _spec_from(resolved)
    m_list = [int(m) for m in resolved.get("m_list", [])]
    if not m_list:
        raise ValueError("eig-curve needs a non-empty m_list")
    summaries, rows = gram.finite_sample_eigen_curve(
        spec, m_list, int(resolved["trials"]), resolved["seed"],
        threads=threads)
    summary = {"experiment": "eig-curve", "per_m": summaries}
    if resolved.get("delta") is not None:
        trace = float(np.sum(spec.analytic_spectrum()))
        summary["frontier"] = gram.frontier_from_summaries(
            summaries, trace, float(resolved["delta"]))
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "eig_curve")
    out = _emit(out_dir, stem, ("trial", "m", "lambda_min", "lambda_min_over_d"),
                rows, summary, cfg)
    if resolved["figures"]:
        figures.eig_curve_figure(summaries, Path(out_dir) / f"{stem}.png")
        out["files"]["figure"] = f"{stem}.png"
    return out


def run_shatter_prob(config, out_dir, threads=1):
    resolved = _resolve(config, {"trials": 1000,
                                 "cap": DEFAULT_ENUMERATION_CAP})
    spec = _spec_from(resolved)
    gamma = float(resolved["gamma"])
    m_list = resolved.get("m_list") or [resolved["m"]]
    m_list = [int(m) for m in m_list]
    rows = []
    summaries = []
    for m in m_list:
        report = gram.shattering_probability(
            spec, m, gamma, int(resolved["trials"]),
            seed_path(resolved["seed"]) + (m,), cap=int(resolved["cap"]),
            threads=threads)
        rows.extend(report.trial_rows)
        summaries.append({
            "m": m, "p_eig": report.p_eig, "stderr_eig": report.stderr_eig,
            "p_exact": report.p_exact, "stderr_exact": report.stderr_exact,
        })
    summary = {"experiment": "shatter-prob", "gamma": gamma,
               "per_m": summaries}
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "shatter_prob")
    out = _emit(out_dir, stem,
                ("trial", "m", "lambda_min", "shattered_eig", "shattered_exact"),
                rows, summary, cfg)
    if resolved["figures"]:
        figures.shatter_prob_figure(summaries, Path(out_dir) / f"{stem}.png")
        out["files"]["figure"] = f"{stem}.png"
    return out


def run_sample_complexity(config, out_dir, threads=1):
    resolved = _resolve(config, {"algorithm": "exact", "trials": 100,
                                 "test_size": 2000, "loss_star": None,
                                 "m_grid": None,
                                 "exact_cap": mem.EXACT_CAP_DEFAULT,
                                 "shatter_cap": DEFAULT_ENUMERATION_CAP,
                                 "restarts": 4})
    if "m_grid" in config and not config["m_grid"]:
        raise ValueError("m_grid must be non-empty (omit it for auto-doubling)")
    spec = _spec_from(resolved)
    report = mem.estimate_sample_complexity(
        spec, epsilon=float(resolved["epsilon"]), gamma=float(resolved["gamma"]),
        delta=float(resolved["delta"]), algorithm=resolved["algorithm"],
        m_grid=resolved["m_grid"], trials=int(resolved["trials"]),
        test_size=int(resolved["test_size"]), seed=resolved["seed"],
        loss_star=resolved["loss_star"], exact_cap=int(resolved["exact_cap"]),
        heuristic_restarts=int(resolved["restarts"]),
        shatter_cap=int(resolved["shatter_cap"]), threads=threads)
    rows = [(r["m"], r["trials"], r["failures"], r["failure_rate"],
             r["stderr"], r["mean_test_error"]) for r in report.curve]
    summary = {
        "experiment": "sample-complexity", "algorithm": report.algorithm,
        "loss_star": report.loss_star, "m_hat": report.m_hat,
        "exceeds_grid": report.exceeds_grid, "curve": list(report.curve),
    }
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "sample_complexity")
    out = _emit(out_dir, stem,
                ("m", "trials", "failures", "failure_rate", "stderr",
                 "mean_test_error"), rows, summary, cfg)
    if resolved["figures"]:
        figures.sample_complexity_figure(report.curve, report.delta,
                                         Path(out_dir) / f"{stem}.png",
                                         label=report.algorithm)
        out["files"]["figure"] = f"{stem}.png"
    return out


def _adversarial_trials(spec, m, gamma, trials, test_size, seed, cap, threads,
                        attempts=1):
    path = seed_path(seed)

    def one(trial):
        trial_path = path + (m, trial)
        w, shattered = mem.adversarial_round(spec, m, gamma, trial_path, cap,
                                             attempts=attempts)
        X_test, y_test = spec.sample(test_size, trial_path + (1,))
        return (trial, shattered, mem.misclassification_error(w, X_test, y_test))

    return map_trials(one, trials, threads)


def run_adversarial_demo(config, out_dir, threads=1):
    resolved = _resolve(config, {"trials": 200, "test_size": 2000,
                                 "threshold": 0.45, "attempts": 1,
                                 "cap": DEFAULT_ENUMERATION_CAP})
    spec = _spec_from(resolved)
    gamma = float(resolved["gamma"])
    m = int(resolved["m"])
    threshold = float(resolved["threshold"])
    trials = int(resolved["trials"])
    rows = _adversarial_trials(spec, m, gamma, trials,
                               int(resolved["test_size"]), resolved["seed"],
                               int(resolved["cap"]), threads,
                               attempts=int(resolved["attempts"]))
    errors = np.array([r[2] for r in rows])
    shattered = np.array([r[1] for r in rows])
    freq = float(np.count_nonzero(errors >= threshold)) / trials
    n_shat = int(np.count_nonzero(shattered))
    summary = {
        "experiment": "adversarial-demo", "gamma": gamma, "m": m,
        "threshold": threshold, "attempts": int(resolved["attempts"]),
        "shatter_rate": float(shattered.mean()),
        "freq_error_ge_threshold": freq,
        "freq_error_ge_threshold_shattered":
            float(np.count_nonzero(errors[shattered] >= threshold)) / n_shat
            if n_shat else None,
        "stderr_freq": math.sqrt(max(freq * (1 - freq), 0.0) / trials),
        "mean_test_error": float(errors.mean()),
    }
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "adversarial_demo")
    out = _emit(out_dir, stem, ("trial", "shattered", "test_error"),
                rows, summary, cfg)
    if resolved["figures"]:
        figures.adversarial_figure(errors, threshold,
                                   Path(out_dir) / f"{stem}.png")
        out["files"]["figure"] = f"{stem}.png"
    return out


def run_twins(config, out_dir, threads=1):
    resolved = _resolve(config, {"gamma": 1.0, "epsilon": 0.2, "delta": 0.25,
                                 "m_grid_d": [1, 2], "trials_d": 2000,
                                 "m_p": 6, "trials_p": 200, "attempts_p": 12,
                                 "test_size": 1500, "threshold": 0.45,
                                 "cap": DEFAULT_ENUMERATION_CAP})
    d = int(resolved["d"])
    gamma = float(resolved["gamma"])
    d_spec = parse_distribution_spec({"twin": "D", "d": d})
    p_spec = parse_distribution_spec({"twin": "P", "d": d})
    if not resolved["m_grid_d"]:
        raise ValueError("m_grid_d must be non-empty")
    d_report = mem.estimate_sample_complexity(
        d_spec, epsilon=float(resolved["epsilon"]), gamma=gamma,
        delta=float(resolved["delta"]), algorithm="exact",
        m_grid=[int(m) for m in resolved["m_grid_d"]],
        trials=int(resolved["trials_d"]), test_size=int(resolved["test_size"]),
        seed=seed_path(resolved["seed"]) + (1,), threads=threads)
    p_rows = _adversarial_trials(
        p_spec, int(resolved["m_p"]), gamma, int(resolved["trials_p"]),
        int(resolved["test_size"]), seed_path(resolved["seed"]) + (2,),
        int(resolved["cap"]), threads, attempts=int(resolved["attempts_p"]))
    p_errors = np.array([r[2] for r in p_rows])
    threshold = float(resolved["threshold"])
    p_freq = float(np.count_nonzero(p_errors >= threshold)) / len(p_rows)
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "twins")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    d_rows = [(r["m"], r["trials"], r["failures"], r["failure_rate"],
               r["stderr"], r["mean_test_error"]) for r in d_report.curve]
    write_csv(out_dir / f"{stem}_dtwin_curve.csv",
              ("m", "trials", "failures", "failure_rate", "stderr",
               "mean_test_error"), d_rows, config=cfg)
    write_csv(out_dir / f"{stem}_ptwin_trials.csv",
              ("trial", "shattered", "test_error"), p_rows, config=cfg)
    summary = {
        "experiment": "twins", "schema": SCHEMA_VERSION, "config": cfg,
        "d_twin": {"algorithm": "exact", "m_hat": d_report.m_hat,
                   "exceeds_grid": d_report.exceeds_grid,
                   "curve": list(d_report.curve)},
        "p_twin": {"algorithm": "adversarial", "m": int(resolved["m_p"]),
                   "threshold": threshold,
                   "attempts": int(resolved["attempts_p"]),
                   "freq_error_ge_threshold": p_freq,
                   "shatter_rate": float(np.mean([r[1] for r in p_rows]))},
        "files": {"d_csv": f"{stem}_dtwin_curve.csv",
                  "p_csv": f"{stem}_ptwin_trials.csv"},
    }
    if resolved["figures"]:
        figures.twins_figure(list(d_report.curve), p_rows,
                             float(resolved["delta"]), threshold,
                             out_dir / f"{stem}.png")
        summary["files"]["figure"] = f"{stem}.png"
    write_json(out_dir / f"{stem}_summary.json", summary)
    return summary


def run_example_l1l2(config, out_dir, threads=1):
    resolved = _resolve(config, {"d_list": [2, 4, 8, 16, 32, 64, 128],
                                 "beta": 1.0, "constant": 0.0})
    beta = float(resolved["beta"])
    constant = float(resolved["constant"])
    rows = []
    for d in resolved["d_list"]:
        d = int(d)
        k1 = margin_adapted_dimension(CovarianceSpectrum(np.ones(d)), 1.0)
        rows.append((d, k1, bounds.lower_bound_value(k1, beta, constant),
                     math.log(d)))
    summary = {"experiment": "example-l1l2", "beta": beta,
               "constant": constant,
               "note": "L2 lower bound grows linearly in d while the L1 "
                       "reference grows like ln d"}
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "example_l1l2")
    out = _emit(out_dir, stem, ("d", "k1", "l2_lower_bound", "l1_reference"),
                rows, summary, cfg)
    if resolved["figures"]:
        figures.l1l2_figure(rows, Path(out_dir) / f"{stem}.png")
        out["files"]["figure"] = f"{stem}.png"
    return out


def run_example_mixture(config, out_dir, threads=1):
    resolved = _resolve(config, {"d": 100, "v_list": [0.5, 1, 2, 4, 8],
                                 "epsilon": 0.1, "delta": 0.25,
                                 "c1": 1.0, "c2": 1.0, "beta": 1.0,
                                 "constant": 0.0})
    d = int(resolved["d"])
    rows = []
    for v in resolved["v_list"]:
        v = float(v)
        k = mixture_gaussian_kgamma(d, v)
        formula = math.ceil(d / (1.0 + v * v / 4.0))
        upper = bounds.kgamma_upper_bound(k, float(resolved["epsilon"]),
                                          float(resolved["delta"]),
                                          c1=float(resolved["c1"]),
                                          c2=float(resolved["c2"]))
        lower = bounds.lower_bound_value(k, float(resolved["beta"]),
                                         float(resolved["constant"]))
        rows.append((v, k, formula, upper["m"], lower, d / v ** 4))
    summary = {"experiment": "example-mixture", "d": d,
               "constants": {"c1": float(resolved["c1"]),
                             "c2": float(resolved["c2"]),
                             "beta": float(resolved["beta"]),
                             "lower_C": float(resolved["constant"])}}
    cfg = _config_for_embedding(resolved)
    stem = resolved.get("label", "example_mixture")
    out = _emit(out_dir, stem,
                ("v", "kgamma_scan", "kgamma_formula", "upper_bound_m",
                 "lower_bound", "generative_reference"), rows, summary, cfg)
    if resolved["figures"]:
        figures.mixture_figure(rows, Path(out_dir) / f"{stem}.png")
        out["files"]["figure"] = f"{stem}.png"
    return out


EXPERIMENTS = {
    "eig-curve": run_eig_curve,
    "shatter-prob": run_shatter_prob,
    "sample-complexity": run_sample_complexity,
    "adversarial-demo": run_adversarial_demo,
    "example-l1l2": run_example_l1l2,
    "example-mixture": run_example_mixture,
    "twins": run_twins,
}


def run_experiment(config: dict, out_dir, threads: int = 1) -> dict:
    """Dispatch a config to its named experiment runner."""
    name = config.get("experiment")
    if name not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ValueError(f"unknown experiment {name!r}; known: {known}")
    return EXPERIMENTS[name](config, out_dir, threads=threads)
