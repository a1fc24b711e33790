"""Random-walk estimation of connected induced subgraph (motif) concentrations."""

__version__ = "0.1.0"

from .estimators import (  # noqa: E402
    ConcentrationVector,
    ErrorReport,
    ht_edge_estimate,
    ht_node_estimate,
    ht_reduce_estimate,
    nrmse,
    plain_average,
)
from .graph import EdgeLabel, LabeledGraph, largest_connected_component, load_edge_list  # noqa: E402
from .motifs import Cis, ClassRegistry, build_registry, canonical_code, classify, induced_cis, is_connected  # noqa: E402
from .oracle import BudgetExhausted, LatencyModel, QueryOracle  # noqa: E402
from .walkers import WalkConfig, run_guise, run_mhsrw, run_mss, run_psrw, run_srw, run_walk  # noqa: E402

__all__ = [
    "BudgetExhausted",
    "Cis",
    "ClassRegistry",
    "ConcentrationVector",
    "EdgeLabel",
    "ErrorReport",
    "LabeledGraph",
    "LatencyModel",
    "QueryOracle",
    "WalkConfig",
    "build_registry",
    "canonical_code",
    "classify",
    "ht_edge_estimate",
    "ht_node_estimate",
    "ht_reduce_estimate",
    "induced_cis",
    "is_connected",
    "largest_connected_component",
    "load_edge_list",
    "nrmse",
    "plain_average",
    "run_guise",
    "run_mhsrw",
    "run_mss",
    "run_psrw",
    "run_srw",
    "run_walk",
]
