"""Exact and sufficient margin-shattering tests for linear classifiers.

A set of points (rows of X) is gamma-shattered at the origin by the unit
ball of homogeneous linear classifiers exactly when the Gram matrix
G = X X^T is invertible and every labeling y in {+-1}^m satisfies
y^T G^{-1} y <= 1/gamma^2.  The maximum of that quadratic form over sign
vectors is a hard binary maximization, so it is computed by full
enumeration of the 2^(m-1) sign patterns (sign symmetry halves the work);
no heuristic is ever substituted.  A cheap sufficient condition is
lambda_min(G) >= m * gamma^2, which needs no enumeration.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "EnumerationCapError",
    "SingularGramError",
    "as_sample_matrix",
    "gram",
    "shattering_certificate",
    "is_gamma_shattered_at_origin",
    "min_shatter_margin",
    "eigenvalue_sufficient_check",
    "exact_margin_witness",
]

DEFAULT_ENUMERATION_CAP = 20

# G is treated as invertible iff lambda_min > INVERTIBILITY_RTOL * max(1, lambda_max).
INVERTIBILITY_RTOL = 1e-10

_CHUNK = 1 << 16


class EnumerationCapError(ValueError):
    """Raised when a labeling enumeration would exceed the configured cap."""


class SingularGramError(ValueError):
    """Raised when an operation requires an invertible Gram matrix."""


def as_sample_matrix(X) -> np.ndarray:
    """Validate and return an m x d float matrix whose rows are data points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("sample matrix must be 2-d with m, d >= 1")
    if not np.all(np.isfinite(X)):
        raise ValueError("sample matrix entries must be finite")
    return X


def as_sign_vector(y, m=None) -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if m is not None and y.size != m:
        raise ValueError(f"expected {m} labels, got {y.size}")
    if not np.all(np.abs(y) == 1):
        raise ValueError("labels must be +-1")
    return y


def gram(X) -> np.ndarray:
    X = as_sample_matrix(X)
    return X @ X.T


def _gram_eigh(G):
    lam, V = np.linalg.eigh(G)
    return lam, V


def _is_invertible(lam) -> bool:
    lam_min, lam_max = float(lam[0]), float(lam[-1])
    return lam_min > INVERTIBILITY_RTOL * max(1.0, lam_max)


@lru_cache(maxsize=4)
def _sign_table(m_free: int) -> np.ndarray:
    """All sign patterns of length m_free as an int8 matrix (first sign fixed
    to +1 separately by the caller)."""
    if m_free == 0:
        return np.zeros((1, 0), dtype=np.int8)
    idx = np.arange(1 << m_free, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(m_free, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


def _worst_labeling(Ginv):
    """Max of y^T Ginv y over y in {+-1}^m and the first argmax labeling."""
    m = Ginv.shape[0]
    table = _sign_table(m - 1)
    best_val = -math.inf
    best_idx = 0
    for start in range(0, table.shape[0], _CHUNK):
        block = table[start:start + _CHUNK].astype(float)
        Y = np.empty((block.shape[0], m))
        Y[:, 0] = 1.0
        Y[:, 1:] = block
        vals = ((Y @ Ginv) * Y).sum(axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            best_idx = start + j
    y = np.empty(m)
    y[0] = 1.0
    y[1:] = _sign_table(m - 1)[best_idx].astype(float)
    return best_val, y


def shattering_certificate(X, gamma: float, cap: int = DEFAULT_ENUMERATION_CAP) -> dict:
    """Full exact-test record for one sample matrix.

    Returns a dict with keys ``shattered``, ``gamma_star``, ``lambda_min``
    and ``certificate_y`` (the labeling maximizing y^T G^{-1} y, or None
    when the Gram matrix is singular).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    X = as_sample_matrix(X)
    m = X.shape[0]
    if m > cap:
        raise EnumerationCapError(
            f"enumeration too large: m={m} exceeds cap {cap} "
            f"(2^{m - 1} labelings); raise the cap or use "
            "eigenvalue_sufficient_check")
    G = gram(X)
    lam, V = _gram_eigh(G)
    lambda_min = max(0.0, float(lam[0]))
    if not _is_invertible(lam):
        return {"shattered": False, "gamma_star": 0.0,
                "lambda_min": lambda_min, "certificate_y": None}
    Ginv = (V / lam) @ V.T
    qmax, y = _worst_labeling(Ginv)
    return {
        "shattered": bool(qmax * gamma * gamma <= 1.0),
        "gamma_star": 1.0 / math.sqrt(qmax),
        "lambda_min": lambda_min,
        "certificate_y": [int(v) for v in y],
    }


def is_gamma_shattered_at_origin(X, gamma: float,
                                 cap: int = DEFAULT_ENUMERATION_CAP) -> bool:
    """Exact iff-test: G invertible and max_y y^T G^{-1} y <= 1/gamma^2."""
    return shattering_certificate(X, gamma, cap=cap)["shattered"]


def min_shatter_margin(X, cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Largest gamma* such that X is gamma-shattered for all 0 < gamma <= gamma*.

    Zero when the Gram matrix is rank deficient.
    """
    return shattering_certificate(X, gamma=1.0, cap=cap)["gamma_star"]


def eigenvalue_sufficient_check(X, gamma: float) -> bool:
    """Sufficient condition lambda_min(X X^T) >= m * gamma^2; works for any m."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    X = as_sample_matrix(X)
    lam = np.linalg.eigvalsh(gram(X))
    return bool(lam[0] >= X.shape[0] * gamma * gamma)


def exact_margin_witness(X, y, gamma: float) -> np.ndarray:
    """Minimum-norm w with X w = gamma * y (margins exactly gamma).

    This is w = X^T G^{-1} (gamma y); any other feasible interpolator has a
    larger norm.  Raises SingularGramError when G is not invertible.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    X = as_sample_matrix(X)
    y = as_sign_vector(y, m=X.shape[0])
    G = gram(X)
    lam = np.linalg.eigvalsh(G)
    if not _is_invertible(lam):
        raise SingularGramError("no exact-margin witness: Gram matrix is singular")
    target = gamma * y
    a = np.linalg.solve(G, target)
    a += np.linalg.solve(G, target - G @ a)  # one refinement step
    w = X.T @ a
    m = y.size
    residual = float(np.linalg.norm(X @ w - target))
    if residual > 1e-8 * gamma * math.sqrt(m):
        raise SingularGramError(
            f"witness residual {residual:.3e} exceeds tolerance; "
            "Gram matrix too ill-conditioned")
    norm_sq = float(w @ w)
    quad = float(target @ a)
    if abs(norm_sq - quad) > 1e-8 * max(norm_sq, quad, 1e-300):
        raise SingularGramError("witness norm identity failed; "
                                "Gram matrix too ill-conditioned")
    return w
