"""Seriation toolkit for one-mode adjacency matrices.

Reorders the nodes of a (directed or undirected) weighted graph so the
adjacency matrix exposes its latent structure.  The main method trains
an autoencoder-style network whose shared encoder assigns each node a
scalar feature; three spectral baselines (rank-one SVD, SVD angles,
classical MDS), synthetic generators and a benchmark harness round out
the package.
"""

from .errors import (AutollError, CheckpointError, ConfigurationError,
                     ConvergenceError, DegenerateFeaturesWarning,
                     DegenerateInputError, ParseError, ShapeError)
from .graph import (AdjacencyMatrix, ErrorReport, flip_order,
                    graph_reordering_error, invert_permutation,
                    permute_matrix, spearman_rank_correlation)
from .model import (AutoLLModel, ReorderResult, TrainConfig,
                    extract_features, fit_reorder, node_input,
                    order_from_features, pair_loss, reorder, train,
                    train_with_restarts)
from .nn import (AdamState, MlpNetwork, TrainHyper, adam_step, bce_loss,
                 glorot_init, mlp_backward, mlp_forward)
from .baselines import (mds_order, svd_angle_order, svd_rank_one_order,
                        top_singular_triplets)
from .synthetic import (DgmParams, GroundTruth, SbmParams, gen_dgm, gen_sbm,
                        inject_outliers, make_dataset, normalize_unit_interval,
                        shuffle_nodes, symmetrize_upper)
from .bench import SweepConfig, parse_sweep_config, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "AdjacencyMatrix", "AdamState", "AutoLLModel", "AutollError",
    "CheckpointError", "ConfigurationError", "ConvergenceError",
    "DegenerateFeaturesWarning", "DegenerateInputError", "DgmParams",
    "ErrorReport", "GroundTruth", "MlpNetwork", "ParseError",
    "ReorderResult", "SbmParams", "ShapeError", "SweepConfig",
    "TrainConfig", "TrainHyper", "adam_step", "bce_loss", "extract_features",
    "fit_reorder", "flip_order", "gen_dgm", "gen_sbm", "glorot_init",
    "graph_reordering_error", "inject_outliers", "invert_permutation",
    "make_dataset", "mds_order", "mlp_backward", "mlp_forward", "node_input",
    "normalize_unit_interval", "order_from_features", "pair_loss",
    "parse_sweep_config", "permute_matrix", "reorder", "run_benchmark",
    "shuffle_nodes", "spearman_rank_correlation", "svd_angle_order",
    "svd_rank_one_order", "symmetrize_upper", "top_singular_triplets",
    "train", "train_with_restarts", "__version__",
]
