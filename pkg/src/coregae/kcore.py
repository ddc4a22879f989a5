"""k-core decomposition: core numbers, degeneracy, core extraction, size table.

Decomposition always works on topology; edge weights are ignored.
Isolated nodes get core number 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graph import Graph, NodeMapping, induced_subgraph

__all__ = ["CoreDecomposition", "CoreSizeRow", "core_numbers", "k_core", "core_size_table"]


@dataclass(frozen=True)
class CoreDecomposition:
    """Per-node core numbers c(v) plus the degeneracy max_v c(v)."""

    core_number: np.ndarray
    degeneracy: int
    source_n: int
    source_m: int

    def nodes_with_core_at_least(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.core_number >= k)


@dataclass(frozen=True)
class CoreSizeRow:
    k: int
    nodes: int
    edges: int


def core_numbers(g: Graph) -> CoreDecomposition:
    """Compute c(v) for every node by linear-time degree peeling."""
    core = _kernels.peel_cores(np.ascontiguousarray(g.indptr, dtype=np.int64),
                               np.ascontiguousarray(g.indices, dtype=np.int64))
    degeneracy = int(core.max()) if g.n else 0
    return CoreDecomposition(core_number=core, degeneracy=degeneracy,
                             source_n=g.n, source_m=g.m)


def k_core(g: Graph, k: int, decomposition: CoreDecomposition | None = None) -> tuple[Graph, NodeMapping]:
    """Induced subgraph on {v : c(v) >= k}; empty graph when k exceeds the
    degeneracy, the whole graph for k = 0."""
    if k < 0:
        raise ValidationError("k must be >= 0")
    dec = decomposition if decomposition is not None else core_numbers(g)
    return induced_subgraph(g, dec.nodes_with_core_at_least(k))


def core_size_table(g: Graph, decomposition: CoreDecomposition | None = None) -> list[CoreSizeRow]:
    """Node and edge counts of every k-core, k = 0 .. degeneracy.

    An edge survives in the k-core iff min(c(i), c(j)) >= k, so both
    columns are suffix sums of histograms; no subgraph is materialized.
    """
    dec = decomposition if decomposition is not None else core_numbers(g)
    kmax = dec.degeneracy
    node_hist = np.bincount(dec.core_number, minlength=kmax + 1)
    edges = g.undirected_edges()
    edge_level = np.minimum(dec.core_number[edges[:, 0]], dec.core_number[edges[:, 1]])
    edge_hist = np.bincount(edge_level, minlength=kmax + 1)
    node_counts = np.cumsum(node_hist[::-1])[::-1]
    edge_counts = np.cumsum(edge_hist[::-1])[::-1]
    return [CoreSizeRow(k=k, nodes=int(node_counts[k]), edges=int(edge_counts[k]))
            for k in range(kmax + 1)]
