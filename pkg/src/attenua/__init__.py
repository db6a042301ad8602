"""attenua: a numerical laboratory for damped waves outside disk obstacles.

Verifies discrete energy identities, checks geometric control by billiard ray
tracing, and certifies polynomial decay rates of simulated solutions.
"""

__version__ = "0.1.0"

from .damping import DampingProfile, verify_hyp_a
from .decay import EnergySeries, RateVerdict
from .errors import AttenuaError, ConfigError
from .geometry import Disk, Grid, Obstacle, build_mask
from .rays import GccReport, RadialOmega, Ray, check_gcc, trace_ray
from .scenarios import (
    ScenarioConfig,
    builtin_scenarios,
    config_from_ini,
    config_to_ini,
    list_scenarios,
    load_scenario,
    run_scenario,
)
from .simulate import run_simulation
from .solver import InitialData, WaveState, cfl_timestep

__all__ = [
    "AttenuaError", "ConfigError", "DampingProfile", "Disk", "EnergySeries",
    "GccReport", "Grid", "InitialData", "Obstacle", "RadialOmega",
    "RateVerdict", "Ray", "ScenarioConfig", "WaveState", "build_mask",
    "builtin_scenarios", "cfl_timestep", "check_gcc", "config_from_ini",
    "config_to_ini", "list_scenarios", "load_scenario", "run_scenario",
    "run_simulation", "trace_ray", "verify_hyp_a", "__version__",
]
