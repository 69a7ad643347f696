"""Personalized PageRank estimation over an instrumented graph-access model."""

from .bench import ALGORITHMS, ExperimentRecord, RunOptions, ScalingFit, fit_scaling, run_algorithm, run_vector
from .bidirectional import bippr_avg_pair, jump_bidirectional_st, single_node
from .config import EstimatorConfig, RandomStream
from .errors import (
    ConstructionError,
    GenerationError,
    GraphFormatError,
    InvalidIndexError,
    InvalidVertexError,
    ModelViolationError,
    PPRError,
    PreconditionError,
    SwapViolationError,
)
from .estimators import ExactPPR, PPREstimator
from .exact import (
    PprVector,
    exact_pagerank,
    exact_ppr_matrix,
    exact_single_source,
    exact_single_target,
    truncated_dp_oracle,
)
from .graph import AccessModel, AccessSession, Graph, QueryCounts, load_graph, read_graph, write_graph
from .instances import SwapFamily, SwapQuadruple, compute_overlap_K, gen_family, verify_separation
from .montecarlo import bmc_single_node, bmc_single_target, mc_single_source
from .push import (
    PushState,
    backwards_push,
    backwards_push_avg,
    hybrid_single_target,
    power_method_source,
    power_method_target,
    rand_push,
)

__version__ = "0.1.0"

__all__ = sorted(name for name, obj in globals().items()
                 if not name.startswith("_") and not hasattr(obj, "__path__") and type(obj).__name__ != "module")
