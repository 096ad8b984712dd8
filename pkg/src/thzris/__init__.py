"""RIS phase and receive-beamformer optimization for THz links.

Models molecular re-radiation either as additive receiver noise or as a
correlated scattered channel component, and jointly optimizes the RIS
configuration vector (semidefinite relaxation + bisection + Gaussian
randomization) and the receive combiner (closed form) by alternating
updates.  A batch CLI reproduces throughput sweeps over RIS size, antenna
count, RIS position and carrier frequency.
"""

from .absorption import AbsorptionModel, FrequencyRangeError, default_table, load_table, \
    rician_factor, transmittance
from .channel import ChannelSet, build_channel_set, free_space_amplitude, steering, \
    synthesize_link
from .config import ScenarioConfig, SweepSpec, default_scenario, load_config
from .optimizer import BcdTrace, OptimizerConfig, bcd_optimize, gaussian_randomize, \
    optimal_beamformer, optimize_ris
from .scenario import FrontHemisphereError, Geometry, GeometryError, Placement, \
    SystemParams, resolve_geometry
from .sdp import FeasibilityProblem, FeasibilityResult, SolverError, solve_feasibility
from .signal_model import Beamformer, NoiseModel, RisConfig, molecular_noise, \
    simulate_appendix_chain, sinr, throughput
from .sweep import ResultRow, run_sweep, run_trial, write_csv

__version__ = "0.1.0"

__all__ = [
    "AbsorptionModel", "FrequencyRangeError", "default_table", "load_table",
    "rician_factor", "transmittance",
    "ChannelSet", "build_channel_set", "free_space_amplitude", "steering",
    "synthesize_link",
    "ScenarioConfig", "SweepSpec", "default_scenario", "load_config",
    "BcdTrace", "OptimizerConfig", "bcd_optimize", "gaussian_randomize",
    "optimal_beamformer", "optimize_ris",
    "FrontHemisphereError", "Geometry", "GeometryError", "Placement",
    "SystemParams", "resolve_geometry",
    "FeasibilityProblem", "FeasibilityResult", "SolverError", "solve_feasibility",
    "Beamformer", "NoiseModel", "RisConfig", "molecular_noise",
    "simulate_appendix_chain", "sinr", "throughput",
    "ResultRow", "run_sweep", "run_trial", "write_csv",
    "__version__",
]
