"""Gibbs-type exchangeable partitions and Poisson-Kingman models.

Kernels in ``gibbspk._kernels`` are numba-compiled; set the environment
variable ``GIBBSPK_DISABLE_NUMBA=1`` before import to use the pure numpy
versions instead.
"""
from ._kernels import BACKEND
from .combinatorics import (MAX_ENUMERATION_N, PartitionShape, SetPartition, bell_number,
                            enumerate_set_partitions, integer_partitions, log_rising_factorial,
                            rising_factorial, shape_counts_by_enumeration, shape_multiplicity, shape_of)
from .eppf import (GibbsModel, MixingDensity, ShapeRow, conditional_stable_eppf, conditional_stable_model,
                   dump_v_table, eppf_table, gg_v_weights, gibbs_eppf, load_v_table, log_gibbs_eppf,
                   lognormal_bump, mixture_eppf, mixture_v_weights, pd_log_v, pd_v_weights, stable_mixing,
                   tilted_stable_mixing, truncated_gamma_mixing, verify_consistency, verify_gibbs_recursion,
                   verify_normalization)
from .errors import (BoundsError, GibbsPKError, ModelError, NumericalError, ParameterError, QuadratureError,
                     TableError)
from .levy import (LevyModel, gamma_model, generalized_gamma_model, inverse_gaussian_log_density,
                   laplace_exponent_by_quadrature, stable_model, tilt, verify_laplace_exponent)
from .quadrature import QuadratureSpec, integrate_01, integrate_0inf
from .samplers import (PredictiveState, RandomSource, crp_sample, crp_sample_labels, fisher_sample,
                       fisher_sample_labels, gibbs_predictive_labels, gibbs_predictive_sample,
                       shape_histogram)
from .structural import (StructuralDensity, structural_density, structural_moment, structural_moments,
                         verify_tilt_invariance)
from .verification import CheckReport, run_all, run_proposition2_suite, run_theorem1_suite

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "MAX_ENUMERATION_N",
    "PartitionShape",
    "SetPartition",
    "bell_number",
    "enumerate_set_partitions",
    "integer_partitions",
    "log_rising_factorial",
    "rising_factorial",
    "shape_counts_by_enumeration",
    "shape_multiplicity",
    "shape_of",
    "GibbsModel",
    "MixingDensity",
    "ShapeRow",
    "conditional_stable_eppf",
    "conditional_stable_model",
    "dump_v_table",
    "eppf_table",
    "gg_v_weights",
    "gibbs_eppf",
    "load_v_table",
    "log_gibbs_eppf",
    "lognormal_bump",
    "mixture_eppf",
    "mixture_v_weights",
    "pd_log_v",
    "pd_v_weights",
    "stable_mixing",
    "tilted_stable_mixing",
    "truncated_gamma_mixing",
    "verify_consistency",
    "verify_gibbs_recursion",
    "verify_normalization",
    "BoundsError",
    "GibbsPKError",
    "ModelError",
    "NumericalError",
    "ParameterError",
    "QuadratureError",
    "TableError",
    "LevyModel",
    "gamma_model",
    "generalized_gamma_model",
    "inverse_gaussian_log_density",
    "laplace_exponent_by_quadrature",
    "stable_model",
    "tilt",
    "verify_laplace_exponent",
    "QuadratureSpec",
    "integrate_01",
    "integrate_0inf",
    "PredictiveState",
    "RandomSource",
    "crp_sample",
    "crp_sample_labels",
    "fisher_sample",
    "fisher_sample_labels",
    "gibbs_predictive_labels",
    "gibbs_predictive_sample",
    "shape_histogram",
    "StructuralDensity",
    "structural_density",
    "structural_moment",
    "structural_moments",
    "verify_tilt_invariance",
    "CheckReport",
    "run_all",
    "run_proposition2_suite",
    "run_theorem1_suite",
]
