"""sgldiff: switched Langevin diffusions, their discrete chains, and the
numerical machinery to verify their convergence bounds.

The package simulates a Langevin diffusion whose drift uses one component
gradient at a time (the index switching after exponential waiting times with
mean proportional to a learning rate eta), the limiting mean-field
diffusion, and the corresponding Euler-Maruyama chains.  Wasserstein
estimators, reflection couplings, and closed-form bound calculators support
quantitative convergence experiments, driven by a config-based CLI.
"""

__version__ = "0.1.0"

from .potentials import (
    AssumptionReport,
    PotentialFamily,
    check_assumption1,
    check_assumption2,
    check_dissipativeness,
    make_appendix_c_derivative,
    make_quadratic_family,
    make_trig_family,
    mean_gradient,
    wrap_gradient_1d,
)
from .processes import (
    CoupledTrajectory,
    IndexProcessPath,
    Trajectory,
    distance_function_F,
    distance_profile,
    sample_index_path,
    sgld_chain,
    simulate_langevin,
    simulate_reflection_coupling,
    simulate_sgldiff,
    simulate_synchronous_pair,
    ula_chain,
)

__all__ = [
    "AssumptionReport",
    "CoupledTrajectory",
    "IndexProcessPath",
    "PotentialFamily",
    "Trajectory",
    "__version__",
    "check_assumption1",
    "check_assumption2",
    "check_dissipativeness",
    "distance_function_F",
    "distance_profile",
    "make_appendix_c_derivative",
    "make_quadratic_family",
    "make_trig_family",
    "mean_gradient",
    "sample_index_path",
    "sgld_chain",
    "simulate_langevin",
    "simulate_reflection_coupling",
    "simulate_sgldiff",
    "simulate_synchronous_pair",
    "ula_chain",
    "wrap_gradient_1d",
]
