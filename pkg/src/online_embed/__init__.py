"""Deterministic online metric embeddings and the adversaries that stress them."""
from .errors import (
    CertificateFailure,
    DimensionMismatch,
    DimensionUnknown,
    EmbeddingError,
    NonPositiveDistance,
    NotATreeMetric,
    TriangleViolation,
)
from .kernels import DEFAULT as KERNEL
from .line import LineEmbedder, leftmost_gap
from .linf import (
    LinfEmbedder,
    LinfLineageEmbedder,
    admissible_points,
    delta_for_epsilon,
    dimension_bound,
    feasible_interval,
)
from .metric import DistortionReport, HostPointSet, MetricSpace, distortion_report, host_distance
from .tree import (
    GreedyTreeEmbedder,
    SteinerGreedyEmbedder,
    SteinerTreeRealizer,
    TreeL1Embedder,
    TreeLinfEmbedder,
    WeightedTree,
    four_point_check,
    l1_to_linf_lift,
    paths_intersect,
    realize_tree_metric,
    tree_distance,
)

__version__ = "0.1.0"
