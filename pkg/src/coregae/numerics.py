"""Numerical substrate: CSR matrices, graph operators, init, Adam.

Everything is 64-bit; all randomness flows through explicit seeds or
``numpy.random.Generator`` instances, never global state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graph import Graph

__all__ = [
    "CSRMatrix",
    "spmm",
    "normalized_adjacency",
    "scaled_laplacian",
    "glorot_init",
    "AdamState",
    "adam_step",
]


@dataclass(frozen=True)
class CSRMatrix:
    """Compressed sparse row matrix with sorted column indices per row."""

    rows: int
    cols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        src = np.repeat(np.arange(self.rows), np.diff(self.indptr))
        out[src, self.indices] = self.data
        return out

    def row_sums(self) -> np.ndarray:
        out = np.zeros(self.rows)
        np.add.at(out, np.repeat(np.arange(self.rows), np.diff(self.indptr)), self.data)
        return out

    @staticmethod
    def from_coo(rows: int, cols: int, r, c, v) -> "CSRMatrix":
        """Build from coordinate triples (no duplicate coordinates)."""
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        v = np.asarray(v, dtype=np.float64)
        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], v[order]
        indptr = np.zeros(rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=rows), out=indptr[1:])
        return CSRMatrix(rows=rows, cols=cols, indptr=indptr, indices=c, data=v)


def spmm(s: CSRMatrix, d: np.ndarray) -> np.ndarray:
    """Sparse @ dense with a fixed per-row reduction order."""
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 2 or s.cols != d.shape[0]:
        raise ValidationError(f"spmm shape mismatch: {s.rows}x{s.cols} @ {d.shape}")
    out = np.empty((s.rows, d.shape[1]), dtype=np.float64)
    _kernels.csr_spmm(s.indptr, s.indices, s.data,
                      np.ascontiguousarray(d), out)
    return out


def _coo_of_graph(g: Graph):
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    return src, g.indices, g.entry_weights()


def normalized_adjacency(g: Graph) -> CSRMatrix:
    """Symmetric normalization of A + I used by the convolutional encoder.

    D is the diagonal degree matrix of A + I; entry (i, j) is
    w_ij / sqrt(d_i * d_j) for neighbors and 1 / d_i on the diagonal.
    Isolated nodes get a diagonal entry of exactly 1.
    """
    src, dst, w = _coo_of_graph(g)
    d = np.ones(g.n)
    np.add.at(d, src, w)
    dinv = 1.0 / np.sqrt(d)
    rows = np.concatenate([src, np.arange(g.n, dtype=np.int64)])
    cols = np.concatenate([dst, np.arange(g.n, dtype=np.int64)])
    vals = np.concatenate([w * dinv[src] * dinv[dst], 1.0 / d])
    return CSRMatrix.from_coo(g.n, g.n, rows, cols, vals)


def scaled_laplacian(g: Graph, lambda_max: float = 2.0) -> CSRMatrix:
    """(2 / lambda_max) * L_sym - I with L_sym = I - D^{-1/2} A D^{-1/2}.

    D here is the degree matrix of A itself; rows of isolated nodes reduce
    to the diagonal 1 in L_sym.  With lambda_max covering the spectrum, the
    result has eigenvalues in [-1, 1].
    """
    if lambda_max <= 0:
        raise ValidationError("lambda_max must be positive")
    src, dst, w = _coo_of_graph(g)
    d = np.zeros(g.n)
    np.add.at(d, src, w)
    dinv = np.zeros(g.n)
    nz = d > 0
    dinv[nz] = 1.0 / np.sqrt(d[nz])
    scale = 2.0 / lambda_max
    rows = np.concatenate([src, np.arange(g.n, dtype=np.int64)])
    cols = np.concatenate([dst, np.arange(g.n, dtype=np.int64)])
    vals = np.concatenate([
        -scale * w * dinv[src] * dinv[dst],
        np.full(g.n, scale - 1.0),
    ])
    return CSRMatrix.from_coo(g.n, g.n, rows, cols, vals)


def glorot_init(rows: int, cols: int, seed) -> np.ndarray:
    """Uniform on [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))]."""
    if rows < 1 or cols < 1:
        raise ValidationError("glorot_init needs positive dimensions")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))


@dataclass
class AdamState:
    """First/second moment accumulators for a fixed list of parameters."""

    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @staticmethod
    def for_params(params, lr: float = 0.01, beta1: float = 0.9,
                   beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps, step=0,
                         m=[np.zeros_like(p) for p in params],
                         v=[np.zeros_like(p) for p in params])


def adam_step(state: AdamState, params, grads):
    """One bias-corrected Adam update; returns the new parameter list."""
    if len(params) != len(state.m) or len(params) != len(grads):
        raise ValidationError("adam_step: parameter/gradient count mismatch")
    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    out = []
    for i, (p, gr) in enumerate(zip(params, grads)):
        if p.shape != gr.shape or p.shape != state.m[i].shape:
            raise ValidationError("adam_step: shape mismatch")
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * gr
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * (gr * gr)
        mhat = state.m[i] / bc1
        vhat = state.v[i] / bc2
        out.append(p - state.lr * mhat / (np.sqrt(vhat) + state.eps))
    return out
