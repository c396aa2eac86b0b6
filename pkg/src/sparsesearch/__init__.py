"""Effort allocation for multi-agent discrete search with sparse accessibility."""

from .baseline import brute_force, build_network, solve_mincost
from .certificate import Certificate, build_certificate, verify
from .flowsolver import SolveTrace, solve
from .greedy import check_matroid, check_submodular, f_value, greedy_solve, naive_greedy
from .model import (Heterogeneous, Homogeneous, Schedule, SearchInstance, ValidationError,
                    marginal_value, objective, validate)
from .scenario import SpatialField, compile_instance, generate_field, random_instance

__all__ = [
    "Certificate", "Heterogeneous", "Homogeneous", "Schedule", "SearchInstance", "SolveTrace",
    "SpatialField", "ValidationError", "brute_force", "build_certificate", "build_network",
    "check_matroid", "check_submodular", "compile_instance", "f_value", "generate_field",
    "greedy_solve", "marginal_value", "naive_greedy", "objective", "random_instance", "solve",
    "solve_mincost", "validate", "verify",
]
