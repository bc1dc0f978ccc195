"""Closed-form critical-point probabilities for uncertain scalar fields.

Per-pixel uncertainty is a bounded distribution (uniform, Epanechnikov,
or histogram; Gaussian for sampling-only comparisons).  The package
computes exact probabilities that each grid point is a local minimum,
local maximum, or saddle, plus Monte Carlo, semianalytical, and
combinatorial estimators for cross-validation.
"""

from .distributions import (
    FiniteDistribution,
    GaussianSampler,
    Support,
    epanechnikov,
    epanechnikov_from_samples,
    histogram,
    histogram_from_samples,
    uniform,
    uniform_from_samples,
)
from .engine import (
    EstimatorSpec,
    NeighborhoodCase,
    ProbabilityTriple,
    case_at,
    classify_field,
    closed_form_triple,
    closed_pattern_prob,
    combinatorial_triple,
    histogram_min_prob_combinatorial,
    local_max_prob,
    local_min_prob,
    mc_all_patterns,
    mc_pattern_prob,
    saddle_prob,
    semianalytical_prob,
)
from .fields import (
    CHANNELS,
    MODEL_KINDS,
    EnsembleStack,
    ModelSpec,
    ProbabilityField,
    UncertainField,
)
from .field_io import (
    UcvfError,
    UcvfFormatError,
    UcvfPayloadError,
    UcvfValueError,
    export_heatmap,
    load_ensemble,
    load_probability_field,
    load_scalar_field,
    save_ensemble,
    save_probability_field,
    save_scalar_field,
    uniform_field_from_scalar,
)
from .piecewise import PiecewisePolynomial
from .synth import (
    ackley,
    ackley_ensemble,
    gaussian_mixture_ensemble,
    mixture_base,
    random_case,
)
from .bench import (
    ConvergenceReport,
    TimingReport,
    ValidationSummary,
    convergence_study,
    max_abs_error,
    rmse,
    robustness_ratio,
    timing_report,
    validate_random_cases,
)

__version__ = "0.1.0"

__all__ = [
    "CHANNELS",
    "MODEL_KINDS",
    "ConvergenceReport",
    "EnsembleStack",
    "EstimatorSpec",
    "FiniteDistribution",
    "GaussianSampler",
    "ModelSpec",
    "NeighborhoodCase",
    "PiecewisePolynomial",
    "ProbabilityField",
    "ProbabilityTriple",
    "Support",
    "TimingReport",
    "UcvfError",
    "UcvfFormatError",
    "UcvfPayloadError",
    "UcvfValueError",
    "UncertainField",
    "ValidationSummary",
    "ackley",
    "ackley_ensemble",
    "case_at",
    "classify_field",
    "closed_form_triple",
    "closed_pattern_prob",
    "combinatorial_triple",
    "convergence_study",
    "epanechnikov",
    "epanechnikov_from_samples",
    "export_heatmap",
    "gaussian_mixture_ensemble",
    "histogram",
    "histogram_from_samples",
    "histogram_min_prob_combinatorial",
    "load_ensemble",
    "load_probability_field",
    "load_scalar_field",
    "local_max_prob",
    "local_min_prob",
    "max_abs_error",
    "mc_all_patterns",
    "mc_pattern_prob",
    "mixture_base",
    "random_case",
    "rmse",
    "robustness_ratio",
    "saddle_prob",
    "save_ensemble",
    "save_probability_field",
    "save_scalar_field",
    "semianalytical_prob",
    "timing_report",
    "uniform",
    "uniform_field_from_scalar",
    "uniform_from_samples",
    "validate_random_cases",
]
