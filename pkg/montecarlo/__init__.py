from .checks import (ENUMERATION_LIMIT, InvarianceReport, SLLNReport, VarianceCheck, estimator_distribution,
                     exact_estimator_mean, importance_sampling_mean, likelihood_ratio, minimizer_invariance_check,
                     slln_trend, variance_bound_check)
from .fixtures import CheckResult, run_all
from .measures import DiscreteMeasure, WeightMatrix, exact, objective, weighted_energy
