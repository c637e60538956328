"""Growing hyperbolic network models, growth-replay embedding, and the
evaluation harnesses built on them (model fit, missing-link prediction,
greedy geometric routing)."""

__version__ = "0.1.0"

from .core import (
    LikelihoodContext,
    ModelParams,
    PolarPoint,
    connection_probability,
    connection_radius,
    expected_initial_links,
    expected_internal_links,
    global_connection_probability,
    hyperbolic_distance,
    radial_coordinate,
    radial_density,
)
from .embed import (
    Embedding,
    embed,
    estimate_gamma,
    estimate_params,
    infer_birth_order,
    infer_temperature,
    truth_embedding,
)
from .generate import GrownNetwork, expected_degree_curve, grow
from .graph import AdjacencySnapshot
from .io import read_coordinates, read_edge_list, write_coordinates, write_edge_list
from .linkpred import LinkSplit, auc, roc_curve, score_baseline, score_hyperbolic, split
from .metrics import (
    ConnectionProbabilityCurve,
    connection_curve,
    global_log_likelihood,
    logloss_report,
    topology_stats,
)
from .routing import RoutingStats, evaluate_routing, greedy_route

__all__ = [
    "__version__",
    "ModelParams",
    "PolarPoint",
    "LikelihoodContext",
    "AdjacencySnapshot",
    "GrownNetwork",
    "Embedding",
    "LinkSplit",
    "RoutingStats",
    "ConnectionProbabilityCurve",
    "radial_coordinate",
    "hyperbolic_distance",
    "connection_radius",
    "connection_probability",
    "expected_internal_links",
    "expected_initial_links",
    "radial_density",
    "global_connection_probability",
    "grow",
    "expected_degree_curve",
    "infer_birth_order",
    "embed",
    "truth_embedding",
    "infer_temperature",
    "estimate_gamma",
    "estimate_params",
    "connection_curve",
    "global_log_likelihood",
    "logloss_report",
    "topology_stats",
    "split",
    "score_hyperbolic",
    "score_baseline",
    "auc",
    "roc_curve",
    "greedy_route",
    "evaluate_routing",
    "read_edge_list",
    "write_edge_list",
    "read_coordinates",
    "write_coordinates",
]
