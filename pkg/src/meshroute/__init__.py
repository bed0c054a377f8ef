"""Interference-aware max-min SNIR routing for fixed-wireless mesh backhaul."""

from .linkbudget import (
    DirectedLink,
    InterferenceContext,
    RadioConfig,
    antenna_gain_db,
    exclude_interferers,
    fspl_db,
    interference_power_dbm,
    link_snir_db,
    received_power_dbm,
    total_interference_dbm,
)
from .topology import (
    GenParams,
    GenerationError,
    MeshNetwork,
    NetworkValidationError,
    generate_network,
    load_network,
    save_network,
)
from .pathtree import Path, PathTree, build_tree, valid_paths
from .router import (
    Assignment,
    GroupingPlan,
    RouteStats,
    RoutingError,
    SnirEvaluator,
    best_path_in_tree,
    evaluate_assignment,
    make_plan,
    path_cost,
    route,
    route_group,
)
from .baselines import (
    GaParams,
    route_ga,
    route_no_interference,
    route_random,
    route_random_avg,
)
from .experiments import (
    Scenario,
    TABLE1_SCENARIOS,
    coa,
    run_comparison,
    snir_count_bound,
    theorem1_bound,
    write_csv,
)

__version__ = "0.1.0"
