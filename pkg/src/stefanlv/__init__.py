"""Two-species competition with free boundaries: solver, semi-wave speeds and checks."""

from .analysis import (
    Criteria,
    Outcome,
    Thresholds,
    classify,
    coexistence_limits,
    dichotomy_consistency,
    eigen_length,
    fit_front_speed,
    iteration_bounds,
    persistence_scenario,
    speed_lower_bound_check,
    thm6_certificate,
    thm7_delta_max,
    thresholds,
)
from .config import RunSpec, echo, parse_config, preset_spec
from .fbsolver import Trajectory, run, solve_single_species, step
from .params import GridSpec, InitialData, Params, Profile, SingleSpeciesSpec
from .semiwave import (
    SemiWaveParams,
    competition_speeds,
    in_region_A,
    semiwave_speed,
    solve_semiwave,
)

__version__ = "0.1.0"
