from .exceptions import *
from .helpers import *
from .logging import LogLevel, configure_logging
from .noise import NoiseDensity, NoiseFamily, NoiseStats, create_noise, noise_from_json, noise_stats, parse_noise_json
from .system import IFSSystem, Branch, Violation, ViolationRule, ValidationReport, validate_system, \
    map_apply, map_inverse, image_interval, perturbed_bernoulli_convolution
from .gridfn import Grid, GridFunction, HolderEstimate, evaluate, integrate_dm, cumulative_dm, finite_diff, \
    holder_log_constant, holder_log_estimate
from .operators import QuadratureSpec, apply_U, apply_L, apply_U_derivative, duality_residual
from .cones import ConeParams, ConeConstants, WitnessSet, EConeMembership, birkhoff_factor, contraction_constants, \
    e_cone_diameter, default_cone, cone_constants, in_d_cone, theta_D, witness_family, e_cone_membership, \
    theta_E_lower_bound
from .solver import DensityResult, GeometricFit, solve_density, weak_integrals, weak_integral_decay, \
    invariance_residual, convergence_rate, geometric_fit, cauchy_gap_bound
from .oracle import SampleSet, EmpiricalCDF, TwoSampleCheck, sample_chain, sample_chains, empirical_cdf, \
    density_cdf, ks_distance, two_sample_check
from .bounds import BoundRow, BoundReport, ScalingRow, Normalization, theorem_bound, u_derivative_bound, \
    check_smoothness, epsilon_scaling_study
from .config import RunConfig
from .experiment import Experiment, VerificationCheck, VerificationReport

# __all__ = [
#     'IFSSystem', 'solve_density', 'Experiment'
# ]
