"""Sparse (1 + epsilon)-approximations of k-fold Cech filtrations."""
from .estimators import KDistancePermutation, SparseKFoldCech, SparseKFoldPersistence
from .exceptions import IngestionError, ResourceLimitError, SparseKFoldError, VerificationError
from .geometry import (
    Ball,
    balls_have_common_point,
    min_enclosing_ball,
    min_enclosing_ball_of_balls,
    squared_distance,
)
from .kdp import KPermutation, PointCloud, k_distance, kdp_fast, kdp_simple, spread
from .oracle import exact_cech
from .persistence import PersistenceDiagram, compute_persistence, log_bottleneck
from .sparse import (
    FilteredSimplex,
    Params,
    SiteSchedule,
    SparseFiltration,
    build_filtration,
    gamma_bound,
    size_bound,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "FilteredSimplex",
    "IngestionError",
    "KDistancePermutation",
    "KPermutation",
    "Params",
    "PersistenceDiagram",
    "PointCloud",
    "ResourceLimitError",
    "SiteSchedule",
    "SparseFiltration",
    "SparseKFoldCech",
    "SparseKFoldError",
    "SparseKFoldPersistence",
    "VerificationError",
    "balls_have_common_point",
    "build_filtration",
    "compute_persistence",
    "exact_cech",
    "gamma_bound",
    "k_distance",
    "kdp_fast",
    "kdp_simple",
    "log_bottleneck",
    "min_enclosing_ball",
    "min_enclosing_ball_of_balls",
    "size_bound",
    "spread",
]
