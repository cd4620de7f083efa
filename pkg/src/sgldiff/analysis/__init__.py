"""Wasserstein estimators, theorem-constant calculators, and Monte Carlo
verifiers for the convergence bounds."""

from .checks import (
    CheckReport,
    lemma1_check,
    lemma2_check,
    lemma3_check,
    lemma4_check,
    supermartingale_check,
    supermartingale_from_values,
)
from .constants import (
    PowerLawFit,
    StrongErrorBound,
    TheoremConstants,
    combined_bound,
    compute_constants,
    fit_power_law,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
)
from .target import TargetDensity1D, build_target_density_1d
from .wasserstein import (
    EXACT_1D,
    QUANTILE_VS_GAUSSIAN,
    SLICED,
    WassersteinEstimate,
    bootstrap_w1_stderr,
    effective_sample_size,
    exact_matching_w1,
    w1_noise_floor,
    wasserstein1_1d,
    wasserstein1_sliced,
    wasserstein1_vs_gaussian,
)

__all__ = [
    "CheckReport",
    "EXACT_1D",
    "PowerLawFit",
    "QUANTILE_VS_GAUSSIAN",
    "SLICED",
    "StrongErrorBound",
    "TargetDensity1D",
    "TheoremConstants",
    "WassersteinEstimate",
    "bootstrap_w1_stderr",
    "build_target_density_1d",
    "combined_bound",
    "compute_constants",
    "effective_sample_size",
    "exact_matching_w1",
    "fit_power_law",
    "lemma1_check",
    "lemma2_check",
    "lemma3_check",
    "lemma4_check",
    "supermartingale_check",
    "supermartingale_from_values",
    "theorem1_bound",
    "theorem2_bound",
    "theorem3_bound",
    "w1_noise_floor",
    "wasserstein1_1d",
    "wasserstein1_sliced",
    "wasserstein1_vs_gaussian",
]
