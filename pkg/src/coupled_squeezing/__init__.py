"""Spin squeezing of a spin ensemble through its coupling to a second, driven ensemble."""

from . import bessel, hamiltonians, observables, propagator, spin_algebra
from .errors import (
    AccuracyError,
    ConfigError,
    DimensionMismatchError,
    InvalidArgumentError,
    NoSolutionError,
    SingularConditionError,
    SqueezingError,
    UndefinedDirectionError,
)
from .hamiltonians import DriveConfig, effective_params, solve_omega_prime, tat_branch_select
from .observables import find_optimal_squeezing, husimi_q, squeezing_parameter
from .propagator import Propagator, TimeGrid, evolve
from .spin_algebra import coherent_spin_state, collective_operator, make_spin_space, partial_trace_S

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ConfigError",
    "DimensionMismatchError",
    "DriveConfig",
    "InvalidArgumentError",
    "NoSolutionError",
    "Propagator",
    "SingularConditionError",
    "SqueezingError",
    "TimeGrid",
    "UndefinedDirectionError",
    "bessel",
    "coherent_spin_state",
    "collective_operator",
    "effective_params",
    "evolve",
    "find_optimal_squeezing",
    "hamiltonians",
    "husimi_q",
    "make_spin_space",
    "observables",
    "partial_trace_S",
    "propagator",
    "solve_omega_prime",
    "spin_algebra",
    "squeezing_parameter",
    "tat_branch_select",
]
