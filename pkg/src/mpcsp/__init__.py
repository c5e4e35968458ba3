"""Multi-period two-dimensional cutting with usable leftovers."""

from .harness import classify, gap_percent, run_experiment
from .instance import GenConfig, Instance, generate_instance, load_instance, parse_instance, serialize_instance
from .matheuristic import TrainingConfig, run_forward_looking, run_myopic
from .model import build_flook_subproblem, build_full_model, build_myopic_subproblem
from .oracle import exact_multi_period, validate_plan
from .solver import SolverConfig, solve

__all__ = ["GenConfig", "Instance", "SolverConfig", "TrainingConfig", "build_flook_subproblem", "build_full_model",
           "build_myopic_subproblem", "classify", "exact_multi_period", "gap_percent", "generate_instance",
           "load_instance", "parse_instance", "run_experiment", "run_forward_looking", "run_myopic",
           "serialize_instance", "solve", "validate_plan"]
