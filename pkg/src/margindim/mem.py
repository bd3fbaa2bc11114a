"""Margin-error losses, exact and heuristic margin-error minimization, the
flip-half adversarial construction, and empirical sample-complexity curves.

Loss conventions.  The reported margin error follows the loss definition
exactly: a point with y <w,x> equal to gamma counts as an error.  The
learners, in contrast, treat a constraint y <w,x> >= gamma as satisfied,
matching the shattering definition; a witness with exact margins therefore
has zero *learner* error even though the non-strict loss charges it.  The
exact learner first looks for a solution at margin gamma*(1+tau), whose
satisfied points clear gamma strictly and so are error-free under both
conventions, and falls back to exact-gamma feasibility only when that
strictly-interior problem has a worse error count.

The exact learner enumerates candidate dual active sets: for every subset A
of the sample it solves (diag(y) X X^T diag(y))_A alpha = 1, keeps the
solution when the multipliers are non-negative, and reads off the margins
of the induced w everywhere.  Every minimum-norm solution of every
exclusion set appears this way (conic Caratheodory), so the minimum over
candidates is the exact optimum, at 2^m small solves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .rng import map_trials, seed_path, stream
from .shattering import (DEFAULT_ENUMERATION_CAP, EnumerationCapError,
                         as_sample_matrix, as_sign_vector,
                         eigenvalue_sufficient_check, exact_margin_witness,
                         is_gamma_shattered_at_origin)

__all__ = [
    "EXACT_CAP_DEFAULT",
    "AdversarialUnavailableError",
    "LearnerReport",
    "margin_error",
    "margin_error_strict",
    "misclassification_error",
    "mem_fit_exact",
    "mem_fit_heuristic",
    "min_norm_hard_margin",
    "adversarial_mem",
    "adversarial_round",
    "estimate_sample_complexity",
    "SampleComplexityReport",
]

EXACT_CAP_DEFAULT = 16
STRICTNESS_TAU = 1e-6

# Relative slack when deciding whether a computed margin clears the target;
# absorbs solver dust without affecting any point further than 1e-9 away.
_MARGIN_RTOL = 1e-9
_BALL_TOL = 1e-12

_LOSS_STAR_TAG = 987654321
_LOSS_STAR_SAMPLES = 1_000_000


class AdversarialUnavailableError(ValueError):
    """The concatenated sample is not certified shattered."""


def _margins(w, X, y):
    X = as_sample_matrix(X)
    y = as_sign_vector(y, m=X.shape[0])
    return y * (X @ np.asarray(w, dtype=float))


def margin_error(w, X, y, gamma: float) -> float:
    """Fraction of points with y <w,x> <= gamma (boundary counts as error)."""
    marg = _margins(w, X, y)
    return float(np.count_nonzero(marg <= gamma)) / marg.size


def margin_error_strict(w, X, y, gamma: float) -> float:
    """Fraction of points with y <w,x> strictly below gamma (up to solver dust)."""
    marg = _margins(w, X, y)
    return float(np.count_nonzero(marg < gamma * (1.0 - _MARGIN_RTOL))) / marg.size


def misclassification_error(w, X, y) -> float:
    """Fraction of points with y <w,x> <= 0."""
    marg = _margins(w, X, y)
    return float(np.count_nonzero(marg <= 0.0)) / marg.size


@dataclass(frozen=True)
class LearnerReport:
    w: np.ndarray
    gamma: float
    m: int
    error_count: int              # points with margin below gamma (learner objective)
    empirical_margin_error: float  # error_count / m
    margin_error_nonstrict: float  # the <=-gamma loss of w
    norm_w: float
    certificate: str               # "enumerated" or "heuristic"


def _make_report(w, X, y, gamma, certificate):
    marg = _margins(w, X, y)
    m = marg.size
    count = int(np.count_nonzero(marg < gamma * (1.0 - _MARGIN_RTOL)))
    return LearnerReport(
        w=np.asarray(w, dtype=float), gamma=float(gamma), m=m,
        error_count=count, empirical_margin_error=count / m,
        margin_error_nonstrict=float(np.count_nonzero(marg <= gamma)) / m,
        norm_w=float(np.linalg.norm(w)), certificate=certificate)


def _solve_active(Q, subset):
    """Multipliers alpha >= 0 with Q[A,A] alpha = 1, or None if no clean
    solution exists for this subset."""
    if not subset:
        return np.zeros(0)
    idx = np.asarray(subset)
    Qs = Q[np.ix_(idx, idx)]
    ones = np.ones(len(subset))
    try:
        alpha = np.linalg.solve(Qs, ones)
    except np.linalg.LinAlgError:
        alpha, *_ = np.linalg.lstsq(Qs, ones, rcond=None)
    scale = max(1.0, float(np.abs(Qs).max()) * max(1.0, float(np.abs(alpha).max())))
    if float(np.abs(Qs @ alpha - ones).max()) > 1e-8 * scale:
        return None
    if float(alpha.min()) < -1e-9 * max(1.0, float(np.abs(alpha).max())):
        return None
    return alpha


def mem_fit_exact(X, y, gamma: float, cap: int = EXACT_CAP_DEFAULT,
                  tau: float = STRICTNESS_TAU) -> LearnerReport:
    """Exact margin-error minimizer over the unit ball, by dual active-set
    enumeration.

    Deterministic: subsets are visited by increasing size then
    lexicographically, and ties in the error count are broken by the
    smaller witness norm.
    """
    X = as_sample_matrix(X)
    y = as_sign_vector(y, m=X.shape[0])
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    m = y.size
    if m > cap:
        raise EnumerationCapError(
            f"m={m} exceeds the exact enumeration cap {cap}; "
            "use mem_fit_heuristic")
    A = X * y[:, None]
    Q = A @ A.T
    c_plus = gamma * (1.0 + tau)
    # best[tier] = (violations, dual mass, subset, alpha); tier 1 targets the
    # strictly-interior margin, tier 0 the exact margin.
    best = {0: (m + 1, math.inf, None, None), 1: (m + 1, math.inf, None, None)}
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            alpha = _solve_active(Q, subset)
            if alpha is None:
                continue
            mass = float(alpha.sum())
            if subset and mass <= 0.0:
                continue
            norm_unit = math.sqrt(max(mass, 0.0))
            if subset:
                v = Q[:, np.asarray(subset)] @ alpha
            else:
                v = np.zeros(m)
            viol = int(np.count_nonzero(v < 1.0 - _MARGIN_RTOL))
            for tier, c in ((1, c_plus), (0, gamma)):
                if c * norm_unit <= 1.0 + _BALL_TOL:
                    if (viol, mass) < best[tier][:2]:
                        best[tier] = (viol, mass, subset, alpha)
    tier = 1 if best[1][0] == best[0][0] else 0
    viol, mass, subset, alpha = best[tier]
    c = c_plus if tier == 1 else gamma
    if subset:
        w = (c * alpha) @ A[np.asarray(subset)]
    else:
        w = np.zeros(X.shape[1])
    return _make_report(w, X, y, gamma, certificate="enumerated")


def min_norm_hard_margin(X, y, c: float, max_sweeps: int = 2000,
                         tol: float = 1e-9, norm_cap: float = 1e6):
    """Minimum-norm w with y_i <w, x_i> >= c, by cyclic coordinate descent on
    the non-negative dual.

    Returns (w, alpha, converged).  converged is False when the data is not
    separable at any positive margin (the dual diverges) or the sweep budget
    runs out; w then still carries the current search direction.
    """
    X = as_sample_matrix(X)
    y = as_sign_vector(y, m=X.shape[0])
    if not c > 0:
        raise ValueError("margin target must be positive")
    A = X * y[:, None]
    Q = A @ A.T
    diag = np.diag(Q).copy()
    n = y.size
    alpha = np.zeros(n)
    qa = np.zeros(n)  # Q @ alpha, maintained incrementally
    live = diag > 0
    converged = False
    for _ in range(max_sweeps):
        for i in range(n):
            if not live[i]:
                continue
            step = (c - qa[i]) / diag[i]
            new = max(0.0, alpha[i] + step)
            delta = new - alpha[i]
            if delta != 0.0:
                alpha[i] = new
                qa += delta * Q[:, i]
        grad = qa - c
        pos = alpha > 0
        kkt = 0.0
        if pos.any():
            kkt = float(np.abs(grad[pos]).max())
        zero_live = live & ~pos
        if zero_live.any():
            kkt = max(kkt, float(np.maximum(0.0, -grad[zero_live]).max()))
        if kkt <= tol * max(1.0, c):
            converged = True
            break
        if float(alpha @ qa) > norm_cap ** 2:
            break  # dual diverging: not separable at any positive margin
    if (~live).any():
        converged = False  # a zero point can never reach a positive margin
    w = alpha @ A
    return w, alpha, converged


def mem_fit_heuristic(X, y, gamma: float, restarts: int = 8, seed=0,
                      tau: float = STRICTNESS_TAU) -> LearnerReport:
    """Best-of-restarts greedy exclusion search; never certified optimal.

    Each restart repeatedly solves the minimum-norm problem at margin
    gamma*(1+tau) on the currently included points and drops a most-violated
    point until the solution fits in the unit ball; restarts beyond the
    first randomize ties among the two most-violated points.
    """
    X = as_sample_matrix(X)
    y = as_sign_vector(y, m=X.shape[0])
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    m = y.size
    c_plus = gamma * (1.0 + tau)
    best = None
    best_key = (m + 1, math.inf)
    for restart in range(restarts):
        rng = stream(*seed_path(seed), restart)
        included = list(range(m))
        w = np.zeros(X.shape[1])
        while included:
            Xi, yi = X[included], y[included]
            w_try, _, converged = min_norm_hard_margin(Xi, yi, c_plus)
            if converged and np.linalg.norm(w_try) <= 1.0 + _BALL_TOL:
                w = w_try
                break
            margins = yi * (Xi @ w_try)
            order = np.argsort(margins, kind="stable")
            span = 1 if (restart == 0 or len(included) == 1) else 2
            pick = int(order[int(rng.integers(min(span, len(included))))])
            included.pop(pick)
        report = _make_report(w, X, y, gamma, certificate="heuristic")
        key = (report.error_count, report.norm_w)
        if key < best_key:
            best, best_key = report, key
    return best


def adversarial_mem(X_s, y_s, X_t, y_t, gamma: float,
                    cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Exact-margin witness that is correct on (X_s, y_s) and sign-flipped on
    (X_t, y_t); both by margin exactly gamma.

    Requires the union of the two point sets to be gamma-shattered at the
    origin (verified exactly when the union is within the enumeration cap,
    otherwise by the smallest-eigenvalue sufficient condition).
    """
    y_s = np.asarray(y_s, dtype=float).ravel()
    y_t = np.asarray(y_t, dtype=float).ravel()
    blocks, signs = [], []
    if y_s.size:
        blocks.append(as_sample_matrix(X_s))
        signs.append(as_sign_vector(y_s))
    if y_t.size:
        blocks.append(as_sample_matrix(X_t))
        signs.append(-as_sign_vector(y_t))
    if not blocks:
        raise ValueError("need at least one labeled point")
    X = np.vstack(blocks)
    signs = np.concatenate(signs)
    if X.shape[0] <= cap:
        ok = is_gamma_shattered_at_origin(X, gamma, cap=cap)
    else:
        ok = eigenvalue_sufficient_check(X, gamma)
    if not ok:
        raise AdversarialUnavailableError(
            "adversarial construction unavailable: sample not certified "
            f"{gamma}-shattered at the origin")
    return exact_margin_witness(X, signs, gamma)


# --- distribution-specific sample complexity ---------------------------------

@dataclass(frozen=True)
class SampleComplexityReport:
    algorithm: str
    gamma: float
    epsilon: float
    delta: float
    loss_star: float
    m_hat: int | None
    exceeds_grid: bool
    curve: tuple


def _mc_loss_star(spec, gamma, seed):
    w = spec.optimal_direction()
    if w is None:
        raise ValueError("spec declares no analytic loss* and no optimal "
                         "direction to estimate it from; pass loss_star=")
    path = seed_path(seed)
    batch = 100_000
    count = 0
    for i in range(_LOSS_STAR_SAMPLES // batch):
        X, y = spec.sample(batch, path + (_LOSS_STAR_TAG, i))
        count += int(np.count_nonzero(y * (X @ w) <= gamma))
    return count / _LOSS_STAR_SAMPLES


def _resolve_loss_star(spec, gamma, seed, loss_star):
    if loss_star is not None:
        return float(loss_star)
    analytic = spec.loss_star(gamma)
    if analytic is not None:
        return float(analytic)
    return _mc_loss_star(spec, gamma, seed)


def _benign_interpolator(X, y, gamma):
    # least-squares interpolator of the true labels, pulled into the unit ball
    a, *_ = np.linalg.lstsq(X @ X.T, gamma * y, rcond=None)
    w = X.T @ a
    norm = np.linalg.norm(w)
    return w / norm if norm > 1.0 else w


def adversarial_round(spec, m, gamma, path, shatter_cap, attempts=1,
                      selection_size=512):
    """One draw of the flip-half adversarial margin-error minimizer.

    Splits the m-point sample into halves S and S-tilde and returns the
    exact-margin witness that is correct on S and flipped on S-tilde,
    provided the union is gamma-shattered.  With attempts > 1 the adversary
    redraws its own auxiliary flip half (the construction per attempt is
    unchanged) and keeps the hypothesis whose misclassification on a private
    validation draw is worst; this approximates the worst-case minimizer
    more tightly than the single coupled draw.  Returns (w, shattered_any).
    """
    X, y = spec.sample(m, path + (0,))
    n = m // 2
    if n == 0:
        return np.zeros(spec.d), False
    Xs, ys = X[:n], y[:n]
    n_flip = m - n
    worst = None
    worst_err = -1.0
    validation = None
    for k in range(attempts):
        if k == 0:
            Xt, yt = X[n:], y[n:]
        else:
            Xt, yt = spec.sample(n_flip, path + (2, k))
        try:
            w = adversarial_mem(Xs, ys, Xt, yt, gamma, cap=shatter_cap)
        except AdversarialUnavailableError:
            continue
        if attempts == 1:
            return w, True
        if validation is None:
            validation = spec.sample(selection_size, path + (3,))
        err = misclassification_error(w, *validation)
        if err > worst_err:
            worst, worst_err = w, err
    if worst is not None:
        return worst, True
    return _benign_interpolator(X, y, gamma), False


def _train_one(spec, algorithm, m, gamma, path, exact_cap, restarts,
               shatter_cap, attempts=1):
    if m == 0:
        return np.zeros(spec.d)
    if algorithm == "adversarial":
        return adversarial_round(spec, m, gamma, path, shatter_cap,
                                 attempts=attempts)[0]
    X, y = spec.sample(m, path + (0,))
    if algorithm == "exact":
        return mem_fit_exact(X, y, gamma, cap=exact_cap).w
    if algorithm == "heuristic":
        return mem_fit_heuristic(X, y, gamma, restarts=restarts,
                                 seed=path + (2,)).w
    raise ValueError(f"unknown algorithm {algorithm!r}")


def estimate_sample_complexity(spec, epsilon: float, gamma: float,
                               delta: float, algorithm: str = "exact",
                               m_grid=None, trials: int = 100,
                               test_size: int = 2000, seed=0,
                               loss_star=None,
                               exact_cap: int = EXACT_CAP_DEFAULT,
                               heuristic_restarts: int = 4,
                               shatter_cap: int = DEFAULT_ENUMERATION_CAP,
                               adversarial_attempts: int = 1,
                               threads: int = 1,
                               max_doubling: int = 512) -> SampleComplexityReport:
    """Empirical distribution-specific sample complexity of one algorithm.

    For each m, runs independent train/fresh-test rounds; a round fails when
    the test misclassification error exceeds loss*_gamma + epsilon.  m_hat is
    the smallest grid m whose failure rate is at most delta.  With m_grid
    None the grid doubles from 1 until a passing m (or max_doubling).
    """
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie in (0, 1)")
    if trials < 1 or test_size < 1:
        raise ValueError("trials and test_size must be positive")
    base = _resolve_loss_star(spec, gamma, seed, loss_star)
    path = seed_path(seed)
    doubling = m_grid is None
    if doubling:
        grid = []
        m = 1
        while m <= max_doubling:
            grid.append(m)
            m *= 2
    else:
        grid = sorted({int(m) for m in m_grid})
        if not grid:
            raise ValueError("m_grid must be non-empty")
        if grid[0] < 0:
            raise ValueError("sample sizes must be non-negative")
    curve = []
    m_hat = None
    for m in grid:
        def one(trial, m=m):
            trial_path = path + (m, trial)
            w = _train_one(spec, algorithm, m, gamma, trial_path,
                           exact_cap, heuristic_restarts, shatter_cap,
                           attempts=adversarial_attempts)
            X_test, y_test = spec.sample(test_size, trial_path + (1,))
            return misclassification_error(w, X_test, y_test)
        errors = np.array(map_trials(one, trials, threads))
        failures = int(np.count_nonzero(errors - base > epsilon))
        rate = failures / trials
        curve.append({
            "m": m, "trials": trials, "failures": failures,
            "failure_rate": rate,
            "stderr": math.sqrt(max(rate * (1 - rate), 0.0) / trials),
            "mean_test_error": float(errors.mean()),
        })
        if rate <= delta and m_hat is None:
            m_hat = m
            if doubling:
                break
    return SampleComplexityReport(
        algorithm=algorithm, gamma=float(gamma), epsilon=float(epsilon),
        delta=float(delta), loss_star=base, m_hat=m_hat,
        exceeds_grid=m_hat is None, curve=tuple(curve))
