import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from margindim import (CovarianceSpectrum, MarginParams,
                       empirical_uncentered_covariance, is_bk_limited,
                       margin_adapted_dimension, mixture_gaussian_kgamma,
                       mixture_gaussian_spectrum)


def brute_force_kgamma(lam, gamma):
    lam = np.asarray(lam, float)
    for k in range(lam.size + 1):
        if lam[k:].sum() <= gamma * gamma * k + 1e-9 * (lam[k:].sum() + gamma * gamma * k):
            return k
    return lam.size


def test_spike_spectrum():
    lam = [1000.0] + [0.001] * 1000
    assert margin_adapted_dimension(lam, 1.0) == 1


def test_all_zero_spectrum():
    assert margin_adapted_dimension(np.zeros(5), 0.3) == 0
    assert margin_adapted_dimension(np.zeros(5), 10.0) == 0


def test_one_half_spectrum_d9():
    # brute-force scan: (d-k)/2 <= k first holds at k = ceil(d/3) = 3
    lam = [1.0] + [0.5] * 8
    assert brute_force_kgamma(lam, 1.0) == 3
    assert margin_adapted_dimension(lam, 1.0) == 3


@pytest.mark.parametrize("d", range(1, 201))
def test_unit_variance_coordinates_half_d(d):
    assert margin_adapted_dimension(np.ones(d), 1.0) == math.ceil(d / 2)


def test_validation_rejects_bad_spectra():
    with pytest.raises(ValueError):
        CovarianceSpectrum(np.array([1.0, 2.0]))  # unsorted
    with pytest.raises(ValueError):
        CovarianceSpectrum(np.array([1.0, -0.1]))
    with pytest.raises(ValueError):
        CovarianceSpectrum(np.array([]))
    with pytest.raises(ValueError):
        margin_adapted_dimension([1.0], 0.0)


def test_is_bk_limited_examples():
    lam = [4.0, 1.0, 1.0]
    assert is_bk_limited(lam, 2.0, 1)
    assert not is_bk_limited(lam, 1.9, 1)
    assert is_bk_limited(lam, 0.0, 3)  # empty tail
    with pytest.raises(ValueError):
        is_bk_limited(lam, 1.0, 4)


def test_empirical_covariance_trivial():
    e1 = np.zeros(4)
    e1[0] = 1.0
    cov, spec = empirical_uncentered_covariance(np.tile(e1, (7, 1)))
    assert np.allclose(spec.eigenvalues, [1, 0, 0, 0])
    _, spec2 = empirical_uncentered_covariance(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(spec2.eigenvalues, [0.5, 0.5])
    with pytest.raises(ValueError):
        empirical_uncentered_covariance(np.zeros((0, 3)))


def test_empirical_covariance_gaussian_clt():
    for seed in (0, 1, 2):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((100_000, 2)) * np.array([2.0, 1.0])
        cov, spec = empirical_uncentered_covariance(X)
        assert np.allclose(cov, cov.T)
        assert abs(spec.eigenvalues[0] - 4.0) < 0.2
        assert abs(spec.eigenvalues[1] - 1.0) < 0.05


def test_mixture_kgamma_examples():
    assert mixture_gaussian_kgamma(100, 4.0) == 20
    assert mixture_gaussian_kgamma(5, 0.01) == 5
    assert mixture_gaussian_kgamma(100, 2.0) == 50
    lam = mixture_gaussian_spectrum(6, 3.0).eigenvalues
    assert lam[0] == 10.0 and np.all(lam[1:] == 1.0)


@pytest.mark.parametrize("v", [0.5, 1.0, 2.0, 4.0, 8.0])
@pytest.mark.parametrize("d", [1, 2, 3, 7, 50, 137, 200])
def test_mixture_closed_form_agrees_with_scan(d, v):
    assert mixture_gaussian_kgamma(d, v) == math.ceil(d / (1 + v * v / 4))


def test_margin_params_validation():
    MarginParams(gamma=1.0, epsilon=0.1, delta=0.05)
    with pytest.raises(ValueError):
        MarginParams(gamma=0.0, epsilon=0.1, delta=0.05)
    with pytest.raises(ValueError):
        MarginParams(gamma=1.0, epsilon=1.0, delta=0.05)
    with pytest.raises(ValueError):
        MarginParams(gamma=1.0, epsilon=0.1, delta=0.0)


spectra_strategy = st.lists(
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
    min_size=1, max_size=40,
).map(lambda xs: np.sort(np.asarray(xs))[::-1])

gamma_strategy = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(lam=spectra_strategy, g1=gamma_strategy, g2=gamma_strategy)
def test_monotone_in_gamma(lam, g1, g2):
    lo, hi = min(g1, g2), max(g1, g2)
    assert margin_adapted_dimension(lam, lo) >= margin_adapted_dimension(lam, hi)


@settings(max_examples=200, deadline=None)
@given(lam=spectra_strategy, gamma=gamma_strategy)
def test_upper_sandwich_with_ceiling(lam, gamma):
    k = margin_adapted_dimension(lam, gamma)
    d = lam.size
    assert k <= min(d, math.ceil(lam.sum() / (gamma * gamma)))


@settings(max_examples=200, deadline=None)
@given(lam=spectra_strategy, gamma=gamma_strategy,
       log2c=st.integers(min_value=-20, max_value=20))
def test_scale_equivariance(lam, gamma, log2c):
    # powers of two scale floats exactly, so the decision must be identical
    c = 2.0 ** log2c
    assert (margin_adapted_dimension(lam * c * c, gamma * c)
            == margin_adapted_dimension(lam, gamma))


@settings(max_examples=200, deadline=None)
@given(lam=spectra_strategy, gamma=gamma_strategy)
def test_definition_consistency_with_bk_limited(lam, gamma):
    k = margin_adapted_dimension(lam, gamma)
    candidates = [j for j in range(lam.size + 1)
                  if is_bk_limited(lam, gamma * gamma * j, j)]
    assert k == min(candidates)
