"""Scalable graph autoencoders: train on a k-core, propagate to the rest.

The workflow has three steps: extract a dense k-core subgraph, train a
graph (variational) autoencoder on it, then spread the learned latent
vectors to every remaining node through layered fixed-point averaging.
``coregae.pipeline`` wires the steps together with edge-split evaluation
for link prediction and k-means/NMI for node clustering.
"""

from ._kernels import backend as kernel_backend
from .errors import CoregaeError, NumericError, ParseError, ValidationError
from .evaluation import (ClusterReport, LinkPredReport, TimingReport,
                         average_precision, kmeans, link_prediction_eval,
                         nmi, roc_auc)
from .graph import (EdgeSplit, Graph, NodeFeatures, NodeLabels, NodeMapping,
                    degrees, induced_subgraph, load_edge_list, load_features,
                    load_labels, save_edge_list, split_edges)
from .kcore import CoreDecomposition, core_numbers, core_size_table, k_core
from .models import (ModelParams, ModelSpec, TrainReport, decode_scores,
                     encode, kl_term, reconstruction_loss, train)
from .numerics import (AdamState, CSRMatrix, adam_step, glorot_init,
                       normalized_adjacency, scaled_laplacian, spmm)
from .pipeline import (PipelineConfig, RunSummary, emit_report, run_pipeline,
                       select_core_k)
from .propagation import (BlockSystem, PropagationConfig, build_blocks,
                          exact_solve, frontier, propagate_all,
                          propagate_layer)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "CoregaeError", "NumericError", "ParseError", "ValidationError",
    "Graph", "NodeFeatures", "NodeLabels", "NodeMapping", "EdgeSplit",
    "degrees", "load_edge_list", "save_edge_list", "load_features",
    "load_labels", "induced_subgraph", "split_edges",
    "CoreDecomposition", "core_numbers", "k_core", "core_size_table",
    "CSRMatrix", "spmm", "normalized_adjacency", "scaled_laplacian",
    "glorot_init", "AdamState", "adam_step",
    "ModelSpec", "ModelParams", "TrainReport", "encode", "decode_scores",
    "reconstruction_loss", "kl_term", "train",
    "PropagationConfig", "BlockSystem", "frontier", "build_blocks",
    "propagate_layer", "exact_solve", "propagate_all",
    "LinkPredReport", "ClusterReport", "TimingReport", "roc_auc",
    "average_precision", "link_prediction_eval", "kmeans", "nmi",
    "PipelineConfig", "RunSummary", "run_pipeline", "select_core_k",
    "emit_report",
]
