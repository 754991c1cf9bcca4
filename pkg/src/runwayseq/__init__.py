"""Runway sequencing with wake separations on single and dual runways."""

from .dual import BlockKind, DualInstance, DualOptions, enumerate_blocks, solve_dual
from .harness import GenSpec, Instance, export_mip, gen_instance, load_instance, run_bench, verify_tables
from .oracle import LimitExceeded, oracle_dual, oracle_single
from .separation import Layout, SeparationModel, Task, builtin_model, load_model, min_separation
from .sequence import Aircraft, Infeasible, Schedule, earliest_schedule, landing, takeoff
from .single import Optimality, Solution, SolverOptions, fcfs_baseline, solve_single

__all__ = [
    "Aircraft", "BlockKind", "DualInstance", "DualOptions", "GenSpec", "Infeasible", "Instance", "Layout",
    "LimitExceeded", "Optimality", "Schedule", "SeparationModel", "Solution", "SolverOptions", "Task",
    "builtin_model", "earliest_schedule", "enumerate_blocks", "export_mip", "fcfs_baseline", "gen_instance",
    "landing", "load_instance", "load_model", "min_separation", "oracle_dual", "oracle_single", "run_bench",
    "solve_dual", "solve_single", "takeoff", "verify_tables",
]
