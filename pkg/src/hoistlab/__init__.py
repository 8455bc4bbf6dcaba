"""Cyclic single-hoist scheduling: instances, schedules, MIP formulations and an exact native solver."""

from .bench import GeneratorParams, builtin, generate, load_instance, save_instance
from .core import (
    INF, Instance, LoadConfig, MultiTank, Rules, big_m, dissociated, lower_bound, to_dissociated, upper_bound,
    validate_instance,
)
from .formulations import (
    FormulationId, FormulationSpec, MultiDegreeOptions, MultifunctionMode, attach_carrier_limit,
    attach_load_constraints, attach_multifunction_constraints, attach_multitank_constraints, build_model,
    build_multidegree_model,
)
from .milp import ModelIR, lp_relax, mip_solve, write_lp_file
from .result import Budget, SolveResult, Status
from .schedule import (
    MultiSchedule, Schedule, build_trajectory, check_simple_cycle, count_carriers, execution_order,
    operation_start_times,
)
from .solver import brute_force, feasible_at_C, min_cycle_for_order, solve_multidegree, solve_simple_cycle
from .svg import render_timeway_svg

__version__ = "0.1.0"

__all__ = [
    "INF", "Budget", "FormulationId", "FormulationSpec", "GeneratorParams", "Instance", "LoadConfig", "ModelIR",
    "MultiDegreeOptions", "MultiSchedule", "MultiTank", "MultifunctionMode", "Rules", "Schedule", "SolveResult",
    "Status", "attach_carrier_limit", "attach_load_constraints", "attach_multifunction_constraints",
    "attach_multitank_constraints", "big_m", "brute_force", "build_model", "build_multidegree_model",
    "build_trajectory", "builtin", "check_simple_cycle", "count_carriers", "dissociated", "execution_order",
    "feasible_at_C", "generate", "load_instance", "lower_bound", "lp_relax", "min_cycle_for_order", "mip_solve",
    "operation_start_times", "render_timeway_svg", "save_instance", "solve_multidegree", "solve_simple_cycle",
    "to_dissociated", "upper_bound", "validate_instance", "write_lp_file",
]
