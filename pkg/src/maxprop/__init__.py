"""Controlled transport with velocity-jump operators.

Solvers for the stationary problem (monotone upwind fixed point and a
semi-Lagrangian value-iteration oracle), reachable-set growth for the
underlying controlled drift, and verification of maximum propagation on
grid functions.
"""

__version__ = "0.1.0"

from .drift import ControlSet, DriftField
from .fields import grid_sample
from .grids import Domain, GridFunction
from .measures import (VelocityMeasure, atoms, measure_mass,
                       support_ball_radius, support_contains_ball,
                       uniform_ball, uniform_box, uniform_sphere)
from .nonlocal_ops import (JumpEvaluation, JumpOperator, RhoDegenerateError,
                           ShiftOperator, jump_apply, jump_evaluate,
                           levy_jump_apply, rho)
from .reachability import (ControllabilityResult, ReachConfig, ReachReport,
                           TrajectorySpec, arrival_time, integrate_trajectory,
                           is_controllable, reach_step, reachable_set)
from .registry import ExampleRegistryEntry, build_example, example_names, get_example
from .scenario import Scenario, ScenarioError, build_scenario
from .scenario_io import load_scenario, parse_scenario_text, save_scenario, scenario_to_text
from .semilag import semi_lagrangian_value
from .smp import (JumpSignAudit, SMPReport, argmax_set, jump_sign_audit,
                  subsolution_check, verify_smp)
from .solver import (ComparisonReport, SolveResult, SolverConfig,
                     SolverConvergenceError, comparison_check, hamiltonian,
                     residual, solve_stationary, upwind_gradient)

__all__ = [
    "ControlSet", "DriftField", "Domain", "GridFunction", "VelocityMeasure",
    "atoms", "uniform_ball", "uniform_box", "uniform_sphere", "measure_mass",
    "support_ball_radius", "support_contains_ball", "grid_sample",
    "JumpEvaluation", "JumpOperator", "ShiftOperator", "RhoDegenerateError",
    "jump_apply", "jump_evaluate", "levy_jump_apply", "rho",
    "Scenario", "ScenarioError", "build_scenario",
    "load_scenario", "save_scenario", "parse_scenario_text", "scenario_to_text",
    "SolverConfig", "SolveResult", "SolverConvergenceError", "ComparisonReport",
    "solve_stationary", "semi_lagrangian_value", "residual", "hamiltonian",
    "upwind_gradient", "comparison_check",
    "TrajectorySpec", "ReachConfig", "ReachReport", "ControllabilityResult",
    "integrate_trajectory", "reach_step", "reachable_set", "is_controllable",
    "arrival_time",
    "SMPReport", "JumpSignAudit", "subsolution_check", "argmax_set",
    "verify_smp", "jump_sign_audit",
    "ExampleRegistryEntry", "build_example", "example_names", "get_example",
]
