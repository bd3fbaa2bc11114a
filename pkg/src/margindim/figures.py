"""Figure rendering for experiment reports (PNG files next to the tables)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "eig_curve_figure",
    "shatter_prob_figure",
    "sample_complexity_figure",
    "adversarial_figure",
    "twins_figure",
    "l1l2_figure",
    "mixture_figure",
]

_DPI = 150


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def eig_curve_figure(summaries, path, title="Smallest Gram eigenvalue"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ms = [s["m"] for s in summaries]
    ax.errorbar(ms, [s["mean_over_d"] for s in summaries],
                yerr=[2 * s["stderr_over_d"] for s in summaries],
                marker="o", label="mean lambda_min / d")
    ax.plot(ms, [s["reference_limit_over_d"] for s in summaries],
            "k--", label="(1 - sqrt(m/d))^2 reference")
    ax.fill_between(ms, [0.9 * s["reference_limit_over_d"] for s in summaries],
                    [1.1 * s["reference_limit_over_d"] for s in summaries],
                    alpha=0.15, color="gray", label="10% band")
    ax.set_xlabel("m")
    ax.set_ylabel("lambda_min(XX^T) / d")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def shatter_prob_figure(summaries, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ms = [s["m"] for s in summaries]
    ax.errorbar(ms, [s["p_eig"] for s in summaries],
                yerr=[2 * s["stderr_eig"] for s in summaries],
                marker="o", label="P[lambda_min >= m gamma^2]")
    if any(s["p_exact"] is not None for s in summaries):
        ax.errorbar(ms, [s["p_exact"] for s in summaries],
                    yerr=[2 * (s["stderr_exact"] or 0) for s in summaries],
                    marker="s", label="P[gamma-shattered]")
    ax.set_xlabel("m")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Shattering probability")
    ax.legend()
    _save(fig, path)


def sample_complexity_figure(curve, delta, path, label=""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ms = [r["m"] for r in curve]
    ax.errorbar(ms, [r["failure_rate"] for r in curve],
                yerr=[2 * r["stderr"] for r in curve], marker="o",
                label=f"failure rate {label}".strip())
    ax.axhline(delta, color="k", linestyle="--", label=f"delta = {delta}")
    ax.set_xlabel("m")
    ax.set_ylabel("failure rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Empirical sample complexity")
    ax.legend()
    _save(fig, path)


def adversarial_figure(test_errors, threshold, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(test_errors, bins=30, range=(0, 1), color="tab:blue", alpha=0.8)
    ax.axvline(threshold, color="k", linestyle="--",
               label=f"threshold {threshold}")
    ax.set_xlabel("test misclassification error")
    ax.set_ylabel("trials")
    ax.set_title("Adversarial margin-error minimizer")
    ax.legend()
    _save(fig, path)


def twins_figure(d_curve, p_rows, delta, threshold, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ms = [r["m"] for r in d_curve]
    ax1.errorbar(ms, [r["failure_rate"] for r in d_curve],
                 yerr=[2 * r["stderr"] for r in d_curve], marker="o")
    ax1.axhline(delta, color="k", linestyle="--")
    ax1.set_xlabel("m")
    ax1.set_ylabel("failure rate")
    ax1.set_ylim(-0.05, 1.05)
    ax1.set_title("D twin: exact MEM")
    errs = [r[2] for r in p_rows]
    ax2.hist(errs, bins=30, range=(0, 1), color="tab:red", alpha=0.8)
    ax2.axvline(threshold, color="k", linestyle="--")
    ax2.set_xlabel("test misclassification error")
    ax2.set_title("P twin: adversarial pipeline")
    _save(fig, path)


def l1l2_figure(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ds = [r[0] for r in rows]
    ax.plot(ds, [r[1] for r in rows], marker="o", label="k_1 = ceil(d/2)")
    ax.plot(ds, [r[2] for r in rows], marker="s", label="L2 lower bound")
    ax.plot(ds, [r[3] for r in rows], "k--", label="L1 reference ln d")
    ax.set_xlabel("d")
    ax.set_ylabel("samples")
    ax.set_title("L1 vs L2 regularization gap")
    ax.legend()
    _save(fig, path)


def mixture_figure(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    vs = [r[0] for r in rows]
    ax.plot(vs, [r[1] for r in rows], marker="o", label="k_{v/2} (scan)")
    ax.plot(vs, [r[3] for r in rows], marker="s", label="upper-bound m")
    ax.plot(vs, [r[4] for r in rows], marker="^", label="lower bound")
    ax.plot(vs, [r[5] for r in rows], "k--", label="generative d/v^4")
    ax.set_xlabel("v (class separation)")
    ax.set_ylabel("samples")
    ax.set_yscale("log")
    ax.set_title("Gaussian mixture: discriminative vs generative")
    ax.legend()
    _save(fig, path)
