"""Margin-adapted dimension toolkit: covariance spectra, fat-shattering
tests for linear classifiers, sub-Gaussian samplers with moment verifiers,
random Gram-matrix experiments, exact margin-error minimization, and
sample-complexity bound evaluation."""

from .bounds import (RademacherReport, dimension_bound, kgamma_upper_bound,
                     lower_bound_value, norm_bound, rademacher_bounds,
                     ramp_loss, ramp_losses)
from .experiments import EXPERIMENTS, run_experiment
from .gram import (ShatteringProbabilityReport, asymptotic_lambda_min_limit,
                   critical_sample_size, eigen_frontier,
                   finite_sample_eigen_curve, lambda_min_gram,
                   shattering_probability)
from .mem import (AdversarialUnavailableError, LearnerReport,
                  SampleComplexityReport, adversarial_mem,
                  estimate_sample_complexity, margin_error,
                  margin_error_strict, mem_fit_exact, mem_fit_heuristic,
                  min_norm_hard_margin, misclassification_error)
from .shattering import (EnumerationCapError, SingularGramError,
                         eigenvalue_sufficient_check, exact_margin_witness,
                         is_gamma_shattered_at_origin, min_shatter_margin,
                         shattering_certificate)
from .spectra import (CovarianceSpectrum, MarginParams,
                      empirical_uncentered_covariance, is_bk_limited,
                      margin_adapted_dimension, mixture_gaussian_kgamma,
                      mixture_gaussian_spectrum)
from .subgauss import (MarginalSpec, MixtureGaussianSpec, PlantedMarginSpec,
                       ProductDistributionSpec, TwinDistributionSpec,
                       find_min_relative_moment, iid_product,
                       parse_distribution_spec, twin_subgaussian_direction_check,
                       verify_relative_moment, verify_squared_norm_mgf)

__version__ = "0.1.0"
