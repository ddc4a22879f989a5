"""Sparse undirected graphs, edge-list/feature/label ingestion, edge splits.

The on-disk edge-list format is UTF-8 text, one edge per line, the two
endpoint ids separated by any run of spaces or tabs, lines starting with
'#' ignored, optional third field = positive weight.  Node ids may be
arbitrary non-negative integers; they are compacted to [0, n) in ascending
order of original id and the compaction is returned as a ``NodeMapping``.
A line ``i i`` declares node ``i`` without adding an edge (self-loops are
dropped as edges but their endpoint is kept as a node), which is how
isolated nodes survive a round-trip through the text format.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "Graph",
    "NodeMapping",
    "NodeFeatures",
    "NodeLabels",
    "EdgeSplit",
    "EdgeListData",
    "degrees",
    "load_edge_list",
    "save_edge_list",
    "load_features",
    "load_labels",
    "induced_subgraph",
    "split_edges",
]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph in compressed adjacency form.

    ``indptr``/``indices`` hold both directions of every edge, neighbor
    lists sorted ascending with no duplicates and no self-loops, so
    ``len(indices) == 2 * m``.  ``weights`` is None for unweighted graphs
    (all weights read as 1.0); otherwise it aligns with ``indices`` and is
    symmetric.
    """

    n: int
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "indptr", _frozen(self.indptr))
        object.__setattr__(self, "indices", _frozen(self.indices))
        if self.weights is not None:
            object.__setattr__(self, "weights", _frozen(self.weights))

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def entry_weights(self) -> np.ndarray:
        """Per-directed-entry weights (ones when unweighted)."""
        if self.weights is not None:
            return self.weights
        return np.ones(len(self.indices), dtype=np.float64)

    def undirected_edges(self) -> np.ndarray:
        """(m, 2) array of edges with i < j, sorted lexicographically."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def undirected_edge_weights(self) -> np.ndarray:
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return self.entry_weights()[keep]

    def has_edge_set(self) -> set[int]:
        """Set of i * n + j keys (i < j) for fast membership tests."""
        e = self.undirected_edges()
        return set((e[:, 0] * np.int64(self.n) + e[:, 1]).tolist())

    @staticmethod
    def from_edges(src, dst, weight=None, n=None, weighted=False) -> "Graph":
        """Canonical construction from (possibly messy) edge arrays.

        Self-loops are dropped, duplicate edges collapsed (weights summed
        when ``weighted``), both directions materialized.  ``n`` defaults
        to max id + 1.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
        if len(src) and (src.min() < 0 or dst.min() < 0):
            raise ValidationError("negative node id")
        if len(src) and max(src.max(), dst.max()) >= n:
            raise ValidationError("node id out of range")

        keep = src != dst
        lo = np.minimum(src[keep], dst[keep])
        hi = np.maximum(src[keep], dst[keep])
        w = None
        if weighted:
            w = (np.ones(len(src), dtype=np.float64) if weight is None
                 else np.asarray(weight, dtype=np.float64))[keep]

        if len(lo):
            order = np.lexsort((hi, lo))
            lo, hi = lo[order], hi[order]
            boundary = np.empty(len(lo), dtype=bool)
            boundary[0] = True
            boundary[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
            starts = np.flatnonzero(boundary)
            if weighted:
                w = np.add.reduceat(w[order], starts)
            lo, hi = lo[starts], hi[starts]
        m = len(lo)

        fsrc = np.concatenate([lo, hi])
        fdst = np.concatenate([hi, lo])
        fw = np.concatenate([w, w]) if weighted else None
        order = np.lexsort((fdst, fsrc))
        fsrc, fdst = fsrc[order], fdst[order]
        if weighted:
            fw = fw[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(fsrc, minlength=n), out=indptr[1:])
        return Graph(n=n, m=m, indptr=indptr, indices=fdst, weights=fw)


@dataclass(frozen=True)
class NodeMapping:
    """Bijection between original node ids and dense ids [0, n).

    ``original_ids[dense]`` gives the original id; ``to_dense`` inverts.
    """

    original_ids: np.ndarray
    _inverse: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "original_ids", _frozen(np.asarray(self.original_ids, dtype=np.int64)))
        object.__setattr__(self, "_inverse",
                           {int(o): i for i, o in enumerate(self.original_ids)})

    def __len__(self):
        return len(self.original_ids)

    def to_original(self, dense):
        return self.original_ids[dense]

    def to_dense(self, original: int) -> int:
        return self._inverse[int(original)]

    @staticmethod
    def identity(n: int) -> "NodeMapping":
        return NodeMapping(np.arange(n, dtype=np.int64))


@dataclass(frozen=True)
class NodeFeatures:
    """Node feature matrix; ``identity=True`` is featureless mode (X = I)
    and never materializes the n x n matrix."""

    n: int
    d: int
    values: np.ndarray | None
    identity: bool = False

    def __post_init__(self):
        if self.identity:
            if self.values is not None or self.d != self.n:
                raise ValidationError("identity features must have values=None and d=n")
        else:
            v = np.ascontiguousarray(self.values, dtype=np.float64)
            if v.shape != (self.n, self.d):
                raise ValidationError(
                    f"feature shape {v.shape} != ({self.n}, {self.d})")
            if not np.isfinite(v).all():
                raise ValidationError("non-finite feature values")
            object.__setattr__(self, "values", _frozen(v))

    @staticmethod
    def from_identity(n: int) -> "NodeFeatures":
        return NodeFeatures(n=n, d=n, values=None, identity=True)

    @staticmethod
    def from_dense(values) -> "NodeFeatures":
        values = np.asarray(values, dtype=np.float64)
        return NodeFeatures(n=values.shape[0], d=values.shape[1], values=values)

    def restrict(self, nodes) -> "NodeFeatures":
        """Features of a node subset (identity stays identity)."""
        nodes = np.asarray(nodes)
        if self.identity:
            return NodeFeatures.from_identity(len(nodes))
        return NodeFeatures.from_dense(self.values[nodes])


@dataclass(frozen=True)
class NodeLabels:
    """One class index per node, classes dense in [0, k)."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if len(lab) and (lab.min() < 0 or lab.max() >= self.k):
            raise ValidationError("label outside [0, k)")
        object.__setattr__(self, "labels", _frozen(lab))

    @staticmethod
    def from_array(labels) -> "NodeLabels":
        labels = np.asarray(labels, dtype=np.int64)
        k = int(labels.max()) + 1 if len(labels) else 0
        return NodeLabels(labels=labels, k=k)


@dataclass(frozen=True)
class EdgeSplit:
    """Link-prediction split: masked train graph plus held-out pairs.

    Positive pairs are removed true edges; negative pairs are sampled
    non-edges of the original graph, disjoint between val and test.
    """

    train_graph: Graph
    val_pos: np.ndarray
    val_neg: np.ndarray
    test_pos: np.ndarray
    test_neg: np.ndarray
    seed: int


@dataclass(frozen=True)
class EdgeListData:
    """Result of edge-list ingestion: graph, id compaction, raw line count.

    ``raw_edges`` counts edge lines before dedup/self-loop removal so both
    the raw and deduplicated sizes of a dataset can be checked.
    """

    graph: Graph
    mapping: NodeMapping
    raw_edges: int


def degrees(g: Graph) -> np.ndarray:
    """Per-node degree (number of neighbors, weights ignored)."""
    return np.diff(g.indptr)


def load_edge_list(path, weighted: bool = False) -> EdgeListData:
    """Parse an edge-list file into a compacted undirected Graph."""
    us, vs, ws = [], [], []
    raw = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"{path}:{lineno}: expected 2 or 3 fields, got {len(parts)}")
            try:
                u = int(parts[0])
                v = int(parts[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer node id") from None
            if u < 0 or v < 0:
                raise ParseError(f"{path}:{lineno}: negative node id")
            w = 1.0
            if weighted and len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: non-numeric weight") from None
                if not np.isfinite(w) or w <= 0:
                    raise ValidationError(f"{path}:{lineno}: weight must be positive and finite")
            raw += 1
            us.append(u)
            vs.append(v)
            ws.append(w)

    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    originals = np.unique(np.concatenate([us, vs])) if raw else np.empty(0, np.int64)
    mapping = NodeMapping(originals)
    dense_u = np.searchsorted(originals, us)
    dense_v = np.searchsorted(originals, vs)
    g = Graph.from_edges(dense_u, dense_v,
                         weight=np.asarray(ws) if weighted else None,
                         n=len(originals), weighted=weighted)
    return EdgeListData(graph=g, mapping=mapping, raw_edges=raw)


def save_edge_list(g: Graph, path, mapping: NodeMapping | None = None) -> None:
    """Write a graph back to the text format (ids mapped through ``mapping``).

    Isolated nodes are written as ``i i`` declaration lines so a reload
    reconstructs an identical graph.
    """
    ids = mapping.original_ids if mapping is not None else np.arange(g.n)
    edges = g.undirected_edges()
    with open(path, "w", encoding="utf-8") as fh:
        if g.weighted:
            w = g.undirected_edge_weights()
            for (i, j), wij in zip(edges, w):
                fh.write(f"{ids[i]} {ids[j]} {float(wij)!r}\n")
        else:
            for i, j in edges:
                fh.write(f"{ids[i]} {ids[j]}\n")
        for v in np.flatnonzero(np.diff(g.indptr) == 0):
            fh.write(f"{ids[v]} {ids[v]}\n")


def load_features(path, n: int) -> NodeFeatures:
    """Load a dense TSV feature matrix; row i belongs to node i."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            try:
                row = [float(p) for p in parts]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric feature value") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
            rows.append(row)
    if len(rows) != n:
        raise ValidationError(f"{path}: {len(rows)} feature rows for {n} nodes")
    return NodeFeatures.from_dense(np.asarray(rows, dtype=np.float64))


def load_labels(path, n: int) -> NodeLabels:
    """Load one integer class label per node (row i = node i)."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                labels.append(int(line.split()[-1]))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer label") from None
    if len(labels) != n:
        raise ValidationError(f"{path}: {len(labels)} labels for {n} nodes")
    return NodeLabels.from_array(labels)


def induced_subgraph(g: Graph, nodes) -> tuple[Graph, NodeMapping]:
    """Subgraph on the given nodes with ids compacted (ascending order)."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if len(nodes) and (nodes[0] < 0 or nodes[-1] >= g.n):
        raise ValidationError("subgraph node id out of range")
    member = np.zeros(g.n, dtype=bool)
    member[nodes] = True
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    keep = member[src] & member[g.indices] & (src < g.indices)
    lo = np.searchsorted(nodes, src[keep])
    hi = np.searchsorted(nodes, g.indices[keep])
    w = g.entry_weights()[keep] if g.weighted else None
    sub = Graph.from_edges(lo, hi, weight=w, n=len(nodes), weighted=g.weighted)
    return sub, NodeMapping(nodes)


def split_edges(g: Graph, val_frac: float, test_frac: float, seed: int) -> EdgeSplit:
    """Remove random edge fractions for validation/test and sample negatives.

    floor(val_frac * m) and floor(test_frac * m) edges are removed
    uniformly; the same counts of uniform non-edge pairs are sampled by
    rejection, without duplicates, disjoint from every original edge and
    from each other.  Deterministic for a fixed seed.
    """
    if val_frac < 0 or test_frac < 0 or val_frac + test_frac >= 1:
        raise ValidationError("need 0 <= val_frac + test_frac < 1")
    rng = np.random.default_rng(seed)
    edges = g.undirected_edges()
    ew = g.undirected_edge_weights() if g.weighted else None
    m = len(edges)
    n_val = int(np.floor(val_frac * m))
    n_test = int(np.floor(test_frac * m))
    if m > 0 and m - n_val - n_test == 0:
        raise ValidationError("split would leave the train graph without edges")

    perm = rng.permutation(m)
    val_idx = perm[:n_val]
    test_idx = perm[n_val:n_val + n_test]
    train_idx = perm[n_val + n_test:]
    train_idx.sort()

    train = Graph.from_edges(edges[train_idx, 0], edges[train_idx, 1],
                             weight=ew[train_idx] if ew is not None else None,
                             n=g.n, weighted=g.weighted)

    existing = g.has_edge_set()
    need = n_val + n_test
    max_pairs = g.n * (g.n - 1) // 2
    if max_pairs - m < need:
        raise ValidationError("not enough non-edges to sample negatives")
    chosen: list[int] = []
    taken = set()
    while len(chosen) < need:
        batch = max(64, 2 * (need - len(chosen)))
        cand = rng.integers(0, g.n, size=(batch, 2))
        for a, b in cand:
            if a == b:
                continue
            if a > b:
                a, b = b, a
            key = int(a) * g.n + int(b)
            if key in existing or key in taken:
                continue
            taken.add(key)
            chosen.append(key)
            if len(chosen) == need:
                break
    keys = np.asarray(chosen, dtype=np.int64)
    neg = np.column_stack([keys // g.n, keys % g.n])

    return EdgeSplit(
        train_graph=train,
        val_pos=edges[np.sort(val_idx)],
        val_neg=neg[:n_val],
        test_pos=edges[np.sort(test_idx)],
        test_neg=neg[n_val:],
        seed=seed,
    )
