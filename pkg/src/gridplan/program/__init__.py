from gridplan.program.indexing import LinearProgram, VariableLayout, tag_family
from gridplan.program.builder import (
    add_cyclic_and_reliability,
    add_dispatch_constraints,
    add_network_constraints,
    add_planning_bounds,
    build_deterministic_equivalent,
    build_objective,
)
from gridplan.program.centralized import aggregate_to_single_bus, build_centralized_variant
from gridplan.program.solution import (
    PlanningSolution,
    decode_solution,
    decode_values,
    read_solution,
    solution_to_dict,
    write_solution,
)

__all__ = [
    "VariableLayout",
    "LinearProgram",
    "tag_family",
    "build_objective",
    "add_planning_bounds",
    "add_dispatch_constraints",
    "add_network_constraints",
    "add_cyclic_and_reliability",
    "build_deterministic_equivalent",
    "build_centralized_variant",
    "aggregate_to_single_bus",
    "PlanningSolution",
    "decode_solution",
    "decode_values",
    "solution_to_dict",
    "write_solution",
    "read_solution",
]
