"""shiftcg: joint rider trip planning and driver shift scheduling.

Column generation over shift-decomposed pricing subproblems solved by a
labeling dynamic program, with optional score-driven graph reduction ahead
of pricing and a brute-force oracle for desk-scale verification.
"""

__version__ = "0.1.0"

from .columns import Column, StopTime
from .driver import SolveConfig, SolveReport, TraceRecorder, solve
from .graph import Node, RoutingGraph, build_graph
from .instance import (
    GeneratorConfig,
    Instance,
    InstanceError,
    Rider,
    TripRequest,
    fleet_size,
    generate_instance,
    load_instance,
    save_instance,
)
from .master import MasterSolution, solve_rlmp
from .oracle import enumerate_routes, oracle_lp_objective, solve_exact
from .pricing import Label, PricingConfig, solve_pricing
from .reduction import (
    EdgeLabelSet,
    compute_label_sets,
    export_training_sample,
    extract_labels,
    reduce_graph,
)
from .shifts import Shift, enumerate_shifts, shifts_for
from .validate import validate_route, validate_solution

__all__ = [
    "Column",
    "StopTime",
    "SolveConfig",
    "SolveReport",
    "TraceRecorder",
    "solve",
    "Node",
    "RoutingGraph",
    "build_graph",
    "GeneratorConfig",
    "Instance",
    "InstanceError",
    "Rider",
    "TripRequest",
    "fleet_size",
    "generate_instance",
    "load_instance",
    "save_instance",
    "MasterSolution",
    "solve_rlmp",
    "enumerate_routes",
    "oracle_lp_objective",
    "solve_exact",
    "Label",
    "PricingConfig",
    "solve_pricing",
    "EdgeLabelSet",
    "compute_label_sets",
    "export_training_sample",
    "extract_labels",
    "reduce_graph",
    "Shift",
    "enumerate_shifts",
    "shifts_for",
    "validate_route",
    "validate_solution",
]
