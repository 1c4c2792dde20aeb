"""Symmetric-property estimation for discrete distributions.

Estimates entropy, support size, support coverage and distance to
uniformity from samples, via the empirical plug-in, specialized
split-sample polynomial and smoothed unseen-symbols estimators, and the
plug-in through the profile-likelihood maximizer, together with an
exhaustive desk-scale verification harness.
"""

from ._kernels import BACKEND as kernel_backend
from .distributions import (DiscreteDistribution, PropertyKind, make_two_step, make_uniform,
                            make_zipf, parse_dist_spec, sample, true_property)
from .estimators import (EstimatorConfig, SplitSample, dtu_estimate, entropy_estimate,
                         good_toulmin_coefficients, median_boost, sml_plugin,
                         support_coverage_estimate, support_estimate)
from .harness import (ExperimentConfig, ExperimentReport, bounded_difference_probe,
                      report_to_csv, run_experiment, verify_ml_metatheorem)
from .pml import PmlResult, beta_certificate, pml_exact_tiny, pml_optimize, pml_plugin
from .poly_approx import (AbsShift, NegYLogY, PolynomialApprox, best_poly_approx,
                          falling_factorial_estimate)
from .profiles import (Prevalence, Profile, enumerate_profiles, extract_profile, prevalence,
                       profile_log_probability, profile_probability)

__version__ = "0.1.0"

__all__ = [
    "AbsShift",
    "DiscreteDistribution",
    "EstimatorConfig",
    "ExperimentConfig",
    "ExperimentReport",
    "NegYLogY",
    "PmlResult",
    "PolynomialApprox",
    "Prevalence",
    "Profile",
    "PropertyKind",
    "SplitSample",
    "best_poly_approx",
    "beta_certificate",
    "bounded_difference_probe",
    "dtu_estimate",
    "entropy_estimate",
    "enumerate_profiles",
    "extract_profile",
    "falling_factorial_estimate",
    "good_toulmin_coefficients",
    "kernel_backend",
    "make_two_step",
    "make_uniform",
    "make_zipf",
    "median_boost",
    "parse_dist_spec",
    "pml_exact_tiny",
    "pml_optimize",
    "pml_plugin",
    "prevalence",
    "profile_log_probability",
    "profile_probability",
    "report_to_csv",
    "run_experiment",
    "sample",
    "sml_plugin",
    "support_coverage_estimate",
    "support_estimate",
    "true_property",
    "verify_ml_metatheorem",
]
