"""Synthetic graph generators for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .graph import Graph, NodeLabels

__all__ = ["configuration_graph", "sbm_graph"]


def configuration_graph(n: int, m: int, seed: int, exponent: float = 2.2) -> Graph:
    """Random graph from power-law degree stubs (configuration model).

    Heavy-tailed degrees give a gradual k-core profile, unlike flat random
    graphs whose deep cores are all-or-nothing.  Self-loops and duplicate
    edges from the stub matching are dropped, so the realized edge count
    comes out slightly below 2 * m stubs' worth; we oversample and trim to
    exactly ``m`` edges.
    """
    rng = np.random.default_rng(seed)
    weights = (np.arange(1, n + 1, dtype=np.float64)) ** (-1.0 / (exponent - 1.0))
    weights /= weights.sum()
    need = int(m * 1.2) + 16
    src = rng.choice(n, size=need, p=weights)
    dst = rng.choice(n, size=need, p=weights)
    keep = src != dst
    lo = np.minimum(src[keep], dst[keep])
    hi = np.maximum(src[keep], dst[keep])
    _, first = np.unique(lo * np.int64(n) + hi, return_index=True)
    first.sort()
    first = first[:m]
    return Graph.from_edges(lo[first], hi[first], n=n)


def sbm_graph(sizes, p_in: float, p_out: float, seed: int) -> tuple[Graph, NodeLabels]:
    """Stochastic block model with ground-truth block labels."""
    rng = np.random.default_rng(seed)
    sizes = list(sizes)
    n = sum(sizes)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    iu, ju = np.triu_indices(n, k=1)
    same = labels[iu] == labels[ju]
    p = np.where(same, p_in, p_out)
    keep = rng.random(len(p)) < p
    g = Graph.from_edges(iu[keep], ju[keep], n=n)
    return g, NodeLabels.from_array(labels)
