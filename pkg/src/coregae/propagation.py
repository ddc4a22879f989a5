"""Spread core embeddings to the rest of the graph, one frontier at a time.

Each layer collects the not-yet-embedded neighbors of the current source
set, normalizes the bipartite (source | frontier) adjacency rows to sum to
one, and iterates Z2 <- A1~ Z1 + A2~ Z2 a fixed number of times from a
random start.  The iteration contracts at the spectral radius of A2~,
which is provably below one because every frontier node keeps at least
one normalized link back to the sources; ``exact_solve`` provides the
closed-form fixed point for use as an oracle.  Nodes never reached get
uniform random vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import Graph
from .numerics import CSRMatrix, spmm

__all__ = [
    "PropagationConfig",
    "BlockSystem",
    "frontier",
    "build_blocks",
    "propagate_layer",
    "exact_solve",
    "propagate_all",
]


@dataclass(frozen=True)
class PropagationConfig:
    iterations: int = 10
    seed: int = 0
    init_low: float = -1.0
    init_high: float = 1.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValidationError("iterations must be >= 1")


@dataclass(frozen=True)
class BlockSystem:
    """Row-normalized blocks of one propagation layer.

    ``a1`` is |V2| x |V1| (the cross block, stored frontier-major) and
    ``a2`` is |V2| x |V2|; each frontier row of (a1 | a2) sums to one.
    """

    v1: np.ndarray
    v2: np.ndarray
    a1: CSRMatrix
    a2: CSRMatrix


def frontier(g: Graph, embedded) -> np.ndarray:
    """Nodes outside ``embedded`` with at least one embedded neighbor,
    ascending."""
    mask = np.zeros(g.n, dtype=bool)
    mask[np.asarray(embedded, dtype=np.int64)] = True
    hit = np.concatenate([[0], np.cumsum(mask[g.indices])])
    counts = hit[g.indptr[1:]] - hit[g.indptr[:-1]]
    return np.flatnonzero(~mask & (counts > 0))


def _take_ranges(starts, ends):
    """Concatenate [s0:e0), [s1:e1), ... without a python loop."""
    lens = ends - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    run_offsets = np.concatenate([[0], np.cumsum(lens)[:-1]])
    return np.repeat(starts - run_offsets, lens) + np.arange(total, dtype=np.int64)


def build_blocks(g: Graph, v1, v2) -> BlockSystem:
    """Normalized cross/in-frontier blocks for one layer.

    Rows are divided by each frontier node's total (weighted) degree into
    V1 union V2; neighbors outside both sets do not count.
    """
    v1 = np.asarray(v1, dtype=np.int64)
    v2 = np.asarray(v2, dtype=np.int64)
    pos1 = np.full(g.n, -1, dtype=np.int64)
    pos1[v1] = np.arange(len(v1))
    pos2 = np.full(g.n, -1, dtype=np.int64)
    pos2[v2] = np.arange(len(v2))

    starts = g.indptr[v2]
    ends = g.indptr[v2 + 1]
    counts = ends - starts
    rows = np.repeat(np.arange(len(v2), dtype=np.int64), counts)
    take = _take_ranges(starts, ends)
    nbrs = g.indices[take]
    w = g.entry_weights()[take]

    in1 = pos1[nbrs] >= 0
    in2 = pos2[nbrs] >= 0
    rowsum = np.bincount(rows, weights=w * (in1 | in2), minlength=len(v2))
    cross_per_row = np.bincount(rows, weights=w * in1, minlength=len(v2))
    if len(v2) and not (cross_per_row > 0).all():
        raise RuntimeError("frontier node without a source neighbor; "
                           "blocks built from a set that is not the frontier")

    wn = w / rowsum[rows]
    a1 = CSRMatrix.from_coo(len(v2), len(v1), rows[in1], pos1[nbrs[in1]], wn[in1])
    a2 = CSRMatrix.from_coo(len(v2), len(v2), rows[in2], pos2[nbrs[in2]], wn[in2])
    return BlockSystem(v1=v1, v2=v2, a1=a1, a2=a2)


def propagate_layer(blocks: BlockSystem, z1: np.ndarray,
                    cfg: PropagationConfig, rng=None) -> np.ndarray:
    """Fixed-count iteration of Z2 <- A1~ Z1 + A2~ Z2 from a uniform start."""
    if z1.shape[0] != len(blocks.v1):
        raise ValidationError("Z1 rows do not match |V1|")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    f = z1.shape[1]
    z2 = rng.uniform(cfg.init_low, cfg.init_high, size=(len(blocks.v2), f))
    base = spmm(blocks.a1, z1)
    for _ in range(cfg.iterations):
        z2 = base + spmm(blocks.a2, z2)
    return z2


def exact_solve(blocks: BlockSystem, z1: np.ndarray, cap: int = 2000) -> np.ndarray:
    """Exact fixed point (I - A2~)^{-1} A1~ Z1 by LU with partial pivoting.

    Test oracle; refuses systems above ``cap`` frontier nodes.  The system
    is strictly diagonally dominant, so singularity means a bug upstream.
    """
    n2 = len(blocks.v2)
    if n2 > cap:
        raise ValidationError(f"exact_solve capped at {cap} frontier nodes, got {n2}")
    if n2 == 0:
        return np.zeros((0, z1.shape[1]))
    lhs = np.eye(n2) - blocks.a2.to_dense()
    rhs = spmm(blocks.a1, z1)
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"singular propagation system: {exc}") from exc


def propagate_all(g: Graph, core_nodes, z_core: np.ndarray,
                  cfg: PropagationConfig) -> np.ndarray:
    """Embed every node: layered propagation from the core, random vectors
    for nodes the core cannot reach.  Output row v is node v's vector."""
    core_nodes = np.asarray(core_nodes, dtype=np.int64)
    if len(core_nodes) == 0:
        raise ValidationError("cannot propagate from an empty core")
    if z_core.shape[0] != len(core_nodes):
        raise ValidationError("core embedding rows do not match core nodes")

    f = z_core.shape[1]
    out = np.empty((g.n, f))
    embedded = np.zeros(g.n, dtype=bool)
    out[core_nodes] = z_core
    embedded[core_nodes] = True

    rng = np.random.default_rng(cfg.seed)
    v1, z1 = core_nodes, z_core
    while True:
        v2 = frontier(g, np.flatnonzero(embedded))
        if len(v2) == 0:
            break
        blocks = build_blocks(g, v1, v2)
        z2 = propagate_layer(blocks, z1, cfg, rng=rng)
        out[v2] = z2
        embedded[v2] = True
        v1, z1 = v2, z2

    unreached = np.flatnonzero(~embedded)
    if len(unreached):
        out[unreached] = rng.uniform(cfg.init_low, cfg.init_high,
                                     size=(len(unreached), f))
    return out
