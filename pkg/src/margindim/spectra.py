"""Covariance spectra and the margin-adapted dimension.

A spectrum is the non-increasing sequence of eigenvalues of an uncentered
covariance (second-moment) matrix E[XX^T].  The margin-adapted dimension at
margin gamma is the smallest k such that the eigenvalue mass outside the top
k directions fits under gamma^2 * k; it refines both the plain dimension and
the norm-over-margin quantity E[|X|^2] / gamma^2.

Infinite-dimensional distributions are represented by explicit truncated
spectra supplied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CovarianceSpectrum",
    "MarginParams",
    "margin_adapted_dimension",
    "is_bk_limited",
    "empirical_uncentered_covariance",
    "mixture_gaussian_spectrum",
    "mixture_gaussian_kgamma",
]

# Eigenvalues below this fraction of the top eigenvalue are treated as zero
# when a spectrum is computed from data.
EIGENVALUE_CLAMP_RTOL = 1e-12


def _tie_tol(a, b):
    # Boundary ties in tail-sum comparisons count as satisfied; the slack
    # absorbs summation dust and scales with both sides so that rescaling a
    # spectrum by c^2 and the margin by c leaves every decision unchanged.
    return 1e-9 * (abs(a) + abs(b))


@dataclass(frozen=True)
class CovarianceSpectrum:
    """Non-increasing, non-negative eigenvalues of an uncentered covariance."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float, copy=True)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("spectrum must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(lam)):
            raise ValueError("spectrum entries must be finite")
        if np.any(lam < 0):
            raise ValueError("spectrum entries must be non-negative")
        if np.any(np.diff(lam) > 0):
            raise ValueError("spectrum must be sorted non-increasing")
        lam.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def d(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def trace(self) -> float:
        """Sum of eigenvalues; equals E[|X|^2] of the summarized distribution."""
        return float(self.eigenvalues.sum())


@dataclass(frozen=True)
class MarginParams:
    """Margin gamma > 0, excess error epsilon and confidence delta in (0,1)."""

    gamma: float
    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


def as_spectrum(spectrum) -> CovarianceSpectrum:
    """Coerce an eigenvalue sequence into a validated CovarianceSpectrum."""
    if isinstance(spectrum, CovarianceSpectrum):
        return spectrum
    return CovarianceSpectrum(np.asarray(spectrum, dtype=float))


def margin_adapted_dimension(spectrum, gamma: float) -> int:
    """Smallest k in {0, ..., d} with sum_{i>k} lambda_i <= gamma^2 * k.

    Linear scan with a running tail sum; boundary ties count as satisfied.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    lam = as_spectrum(spectrum).eigenvalues
    g2 = gamma * gamma
    tail = float(lam.sum())
    for k in range(lam.size + 1):
        bound = g2 * k
        if tail <= bound + _tie_tol(tail, bound):
            return k
        tail -= float(lam[k])
    return lam.size  # unreachable: k = d always satisfies the condition


def is_bk_limited(spectrum, b: float, k: int) -> bool:
    """Whether dropping the top-k eigendirections leaves tail mass <= b.

    For a spectrum the top-k drop is the optimal codimension-k projection,
    so no subspace search is needed.
    """
    spec = as_spectrum(spectrum)
    k = int(k)
    if k < 0 or k > spec.d:
        raise ValueError(f"k must lie in [0, {spec.d}], got {k}")
    if b < 0:
        raise ValueError("b must be non-negative")
    tail = float(spec.eigenvalues[k:].sum())
    return tail <= b + _tie_tol(tail, b)


def empirical_uncentered_covariance(sample):
    """Return ((1/m) X^T X, spectrum) for a sample matrix with rows as points.

    The matrix is symmetrized and eigenvalues below
    ``EIGENVALUE_CLAMP_RTOL * lambda_max`` are clamped to zero to suppress
    floating-point negatives.
    """
    X = np.atleast_2d(np.asarray(sample, dtype=float))
    if X.size == 0:
        raise ValueError("sample must contain at least one point")
    m = X.shape[0]
    cov = X.T @ X / m
    cov = (cov + cov.T) / 2.0
    lam = np.linalg.eigvalsh(cov)[::-1].copy()
    if lam[0] > 0:
        lam[lam < EIGENVALUE_CLAMP_RTOL * lam[0]] = 0.0
    else:
        lam[:] = 0.0
    return cov, CovarianceSpectrum(lam)


def mixture_gaussian_spectrum(d: int, v: float) -> CovarianceSpectrum:
    """Uncentered spectrum of the two-component Gaussian mixture N(+-v e1, I_d)."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if not v > 0:
        raise ValueError("v must be positive")
    lam = np.ones(d)
    lam[0] = 1.0 + v * v
    return CovarianceSpectrum(lam)


def mixture_gaussian_kgamma(d: int, v: float) -> int:
    """Margin-adapted dimension of the N(+-v e1, I_d) mixture at gamma = v/2.

    Equals ceil(d / (1 + v^2/4)); computed by the general scan on the
    explicit spectrum rather than the closed form.
    """
    return margin_adapted_dimension(mixture_gaussian_spectrum(d, v), v / 2.0)
