"""Random Gram-matrix smallest-eigenvalue experiments.

The smallest eigenvalue of G = X X^T certifies margin shattering
(lambda_min >= m gamma^2 suffices), so its distribution under random
sampling drives both the finite-sample shattering probability and the
large-dimension limit sigma^2 (1 - sqrt(beta))^2 for m/d -> beta < 1.
Trials are independent work items keyed by (seed, trial index); running
them across threads does not change any reported statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import map_trials, seed_path
from .shattering import (DEFAULT_ENUMERATION_CAP, as_sample_matrix,
                         is_gamma_shattered_at_origin)

__all__ = [
    "lambda_min_gram",
    "asymptotic_lambda_min_limit",
    "critical_sample_size",
    "shattering_probability",
    "ShatteringProbabilityReport",
    "finite_sample_eigen_curve",
    "eigen_frontier",
    "frontier_from_summaries",
]


def lambda_min_gram(X) -> float:
    """Smallest eigenvalue of X X^T, clamped at zero.

    For m > d the Gram matrix is rank deficient and the result is exactly 0.
    """
    X = as_sample_matrix(X)
    m, d = X.shape
    if m > d:
        return 0.0
    lam = np.linalg.eigvalsh(X @ X.T)
    return max(0.0, float(lam[0]))


def asymptotic_lambda_min_limit(sigma2: float, beta: float) -> float:
    """Limit of lambda_min((1/d) X X^T) for i.i.d. entries, m/d -> beta < 1."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    return sigma2 * (1.0 - math.sqrt(beta)) ** 2


def critical_sample_size(sigma: float, gamma: float, d: int) -> float:
    """Solution m of sigma^2 (sqrt(d) - sqrt(m))^2 = m gamma^2: d/(1+gamma/sigma)^2."""
    if not (sigma > 0 and gamma > 0 and d > 0):
        raise ValueError("sigma, gamma and d must be positive")
    return d / (1.0 + gamma / sigma) ** 2


def _binomial_stderr(p, n):
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n > 0 else 0.0


@dataclass(frozen=True)
class ShatteringProbabilityReport:
    m: int
    gamma: float
    trials: int
    p_eig: float
    stderr_eig: float
    p_exact: float | None
    stderr_exact: float | None
    trial_rows: tuple


def shattering_probability(spec, m: int, gamma: float, trials: int, seed,
                           cap: int = DEFAULT_ENUMERATION_CAP,
                           threads: int = 1) -> ShatteringProbabilityReport:
    """Monte Carlo P[lambda_min(XX^T) >= m gamma^2] and, when m is within the
    enumeration cap, the exact shattering probability."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    m = int(m)
    do_exact = m <= cap
    path = seed_path(seed)
    threshold = m * gamma * gamma

    def one(trial):
        X, _ = spec.sample(m, path + (trial,))
        lam = lambda_min_gram(X)
        eig_ok = lam >= threshold
        exact_ok = None
        if do_exact:
            exact_ok = is_gamma_shattered_at_origin(X, gamma, cap=cap)
        return (trial, m, lam, eig_ok, exact_ok)

    rows = map_trials(one, trials, threads)
    p_eig = sum(1 for r in rows if r[3]) / trials
    if do_exact:
        p_exact = sum(1 for r in rows if r[4]) / trials
        se_exact = _binomial_stderr(p_exact, trials)
    else:
        p_exact, se_exact = None, None
    return ShatteringProbabilityReport(
        m=m, gamma=float(gamma), trials=trials,
        p_eig=p_eig, stderr_eig=_binomial_stderr(p_eig, trials),
        p_exact=p_exact, stderr_exact=se_exact, trial_rows=tuple(rows))


def _check_normalized(spec):
    lam = np.sort(spec.analytic_spectrum())[::-1]
    if lam[0] > 1.0 + 1e-9:
        raise ValueError(
            "spec must be normalized so that all second moments are <= 1 "
            f"(found {lam[0]:.6g}); rescale the marginals")
    return lam


def finite_sample_eigen_curve(spec, m_list, trials: int, seed,
                              threads: int = 1):
    """Per-m summaries of lambda_min(XX^T)/d for a normalized spec.

    Returns (summaries, trial_rows); each summary holds the per-trial mean,
    standard error, 10/50/90% quantiles, and the i.i.d. large-dimension
    reference (1 - sqrt(m/d))^2 * trace/d.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    m_list = [int(m) for m in m_list]
    if not m_list:
        raise ValueError("m_list must be non-empty")
    lam = _check_normalized(spec)
    d = spec.d
    sigma2_avg = float(lam.sum()) / d
    path = seed_path(seed)
    rows = []
    summaries = []
    for m in m_list:
        def one(trial, m=m):
            X, _ = spec.sample(m, path + (m, trial))
            return lambda_min_gram(X)
        values = np.array(map_trials(one, trials, threads))
        scaled = values / d
        if m < d:
            reference = asymptotic_lambda_min_limit(sigma2_avg, m / d)
        else:
            reference = 0.0
        summaries.append({
            "m": m,
            "mean_over_d": float(scaled.mean()),
            "stderr_over_d": float(scaled.std(ddof=1) / math.sqrt(trials))
            if trials > 1 else 0.0,
            "q10_over_d": float(np.quantile(scaled, 0.10)),
            "q50_over_d": float(np.quantile(scaled, 0.50)),
            "q90_over_d": float(np.quantile(scaled, 0.90)),
            "reference_limit_over_d": reference,
            "p_lambda_ge_m": float(np.mean(values >= m)),
        })
        rows.extend((t, m, float(v), float(v) / d)
                    for t, v in enumerate(values))
    return summaries, rows


def frontier_from_summaries(summaries, trace: float, delta: float) -> dict:
    """Frontier m_hat(delta) = max{m : P[lambda_min >= m] >= delta} read off
    already-computed per-m summaries."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    passing = [s["m"] for s in summaries if s["p_lambda_ge_m"] >= delta]
    m_hat = max(passing) if passing else None
    return {
        "delta": delta,
        "m_hat": m_hat,
        "m_hat_over_trace": (m_hat / trace) if m_hat is not None else None,
        "trace": trace,
        "probabilities": {str(s["m"]): s["p_lambda_ge_m"] for s in summaries},
    }


def eigen_frontier(spec, m_list, delta: float, trials: int, seed,
                   threads: int = 1) -> dict:
    """Empirical frontier of the largest m with P[lambda_min >= m] >= delta.

    The guarantee for normalized specs is that such an m exists at scale
    trace(Sigma); constants are not asserted, only the measured ratio
    m_hat / trace is reported.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    summaries, _ = finite_sample_eigen_curve(spec, m_list, trials, seed,
                                             threads=threads)
    trace = float(np.sum(spec.analytic_spectrum()))
    return frontier_from_summaries(summaries, trace, delta)
