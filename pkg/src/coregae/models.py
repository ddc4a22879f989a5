"""Graph autoencoders: plain, variational, deep and Chebyshev variants.

The encoder is a stack of graph-convolution layers (symmetric-normalized
adjacency, or Chebyshev polynomial filters of the scaled Laplacian for the
cheb variants); the decoder is the inner product sigmoid(z_i . z_j).
Variational variants learn mean and log-std heads that share every earlier
layer, sample with the reparameterization trick during training and use
the mean at inference.

All gradients are hand-derived.  The decoder term touches every ordered
node pair, so its loss/gradient pass runs blockwise over rows of Z Z^T:
peak additional memory stays O(n * f + block * n) and no n x n matrix is
ever materialized.  Training refuses graphs above ``dense_cap`` nodes so
the quadratic decoder cost stays tractable; use a deeper core instead.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericError, ValidationError
from .graph import Graph, NodeFeatures
from .numerics import (AdamState, CSRMatrix, adam_step, glorot_init,
                       normalized_adjacency, scaled_laplacian, spmm)

__all__ = [
    "VARIANTS",
    "ModelSpec",
    "ModelParams",
    "TrainReport",
    "EncodeResult",
    "encode",
    "decode_scores",
    "reconstruction_loss",
    "kl_term",
    "train",
]

VARIANTS = ("gae", "vgae", "deepgae", "deepvgae", "chebgae", "chebvgae")

# fixed spectrum bound for the Chebyshev filters; avoids an eigensolve
LAMBDA_MAX = 2.0

# rows per block in the dense-decoder pass, sized so a block of logits
# stays a few tens of MB for the largest supported graphs
_BLOCK_ENTRIES = 4_000_000


@dataclass(frozen=True)
class ModelSpec:
    """Hyperparameters of one encoder variant."""

    variant: str = "gae"
    hidden_dims: tuple = None
    latent_dim: int = 16
    epochs: int = 200
    lr: float = 0.01
    seed: int = 0
    cheb_order: int = 3
    dense_cap: int = 50_000

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.latent_dim < 1:
            raise ValidationError("latent_dim must be >= 1")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.hidden_dims is not None:
            object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))

    @property
    def variational(self) -> bool:
        return self.variant in ("vgae", "deepvgae", "chebvgae")

    @property
    def chebyshev(self) -> bool:
        return self.variant in ("chebgae", "chebvgae")

    def resolved_hidden(self) -> tuple:
        if self.hidden_dims is not None:
            return self.hidden_dims
        if self.variant in ("deepgae", "deepvgae"):
            return (32, 32)
        return (32,)


@dataclass
class ModelParams:
    """Layer weights; for variational variants the two output heads share
    every hidden layer."""

    hidden: list
    w_out: np.ndarray        # output layer (mean head for variational)
    w_logstd: np.ndarray | None = None

    def flat(self) -> list:
        out = list(self.hidden) + [self.w_out]
        if self.w_logstd is not None:
            out.append(self.w_logstd)
        return out

    @staticmethod
    def from_flat(arrays, n_hidden: int, variational: bool) -> "ModelParams":
        hidden = list(arrays[:n_hidden])
        w_out = arrays[n_hidden]
        w_logstd = arrays[n_hidden + 1] if variational else None
        return ModelParams(hidden=hidden, w_out=w_out, w_logstd=w_logstd)


@dataclass
class TrainReport:
    """Per-epoch loss terms plus the final state of the model."""

    recon_history: np.ndarray
    kl_history: np.ndarray
    total_history: np.ndarray
    train_seconds: float
    z: np.ndarray
    mu: np.ndarray | None = None
    logstd: np.ndarray | None = None


@dataclass
class EncodeResult:
    z: np.ndarray
    mu: np.ndarray | None = None
    logstd: np.ndarray | None = None
    caches: list = field(default_factory=list, repr=False)


def init_params(spec: ModelSpec, in_dim: int, rng) -> ModelParams:
    """Glorot-uniform weights; chebyshev layers get one matrix per
    polynomial order, drawn slice by slice in fixed order."""
    dims = [in_dim, *spec.resolved_hidden(), spec.latent_dim]

    def draw(r, c):
        if spec.chebyshev:
            return np.stack([glorot_init(r, c, rng) for _ in range(spec.cheb_order + 1)])
        return glorot_init(r, c, rng)

    hidden = [draw(dims[i], dims[i + 1]) for i in range(len(dims) - 2)]
    w_out = draw(dims[-2], dims[-1])
    w_logstd = draw(dims[-2], dims[-1]) if spec.variational else None
    return ModelParams(hidden=hidden, w_out=w_out, w_logstd=w_logstd)


def build_propagator(g: Graph, spec: ModelSpec) -> CSRMatrix:
    if spec.chebyshev:
        return scaled_laplacian(g, LAMBDA_MAX)
    return normalized_adjacency(g)


def _cheb_term(lap: CSRMatrix, mat: np.ndarray, p: int) -> np.ndarray:
    """T_p(lap) @ mat via the T recursion, O(p) sparse products."""
    if p == 0:
        return mat
    prev, cur = mat, spmm(lap, mat)
    for _ in range(2, p + 1):
        prev, cur = cur, 2.0 * spmm(lap, cur) - prev
    return cur


def _layer_forward(prop, w, h, chebyshev):
    """Pre-activation of one layer; h=None means identity features.

    Returns (pre, cache) where cache carries whatever backward needs.
    """
    if not chebyshev:
        p = w if h is None else h @ w
        return spmm(prop, p), h
    order = w.shape[0] - 1
    if h is None:
        pre = sum(_cheb_term(prop, w[p], p) for p in range(order + 1))
        return pre, None
    basis = [h]
    if order >= 1:
        basis.append(spmm(prop, h))
    for p in range(2, order + 1):
        basis.append(2.0 * spmm(prop, basis[-1]) - basis[-2])
    pre = basis[0] @ w[0]
    for p in range(1, order + 1):
        pre += basis[p] @ w[p]
    return pre, basis


def _layer_backward(prop, w, cache, grad_pre, chebyshev, need_grad_h):
    """Gradients of one layer given d loss / d pre-activation."""
    if not chebyshev:
        h = cache
        gp = spmm(prop, grad_pre)          # prop is symmetric
        gw = gp if h is None else h.T @ gp
        gh = gp @ w.T if need_grad_h else None
        return gw, gh
    order = w.shape[0] - 1
    if cache is None:                      # identity features
        gw = np.stack([_cheb_term(prop, grad_pre, p) for p in range(order + 1)])
        return gw, None
    basis = cache
    gw = np.stack([basis[p].T @ grad_pre for p in range(order + 1)])
    gh = None
    if need_grad_h:
        gh = np.zeros_like(basis[0])
        for p in range(order + 1):
            gh += _cheb_term(prop, grad_pre @ w[p].T, p)
    return gw, gh


def _forward(params: ModelParams, spec: ModelSpec, prop: CSRMatrix,
             X: NodeFeatures, eps: np.ndarray | None) -> EncodeResult:
    h = None if X.identity else X.values
    caches = []
    for w in params.hidden:
        pre, cache = _layer_forward(prop, w, h, spec.chebyshev)
        caches.append((cache, pre))
        h = np.maximum(pre, 0.0)
    out, out_cache = _layer_forward(prop, params.w_out, h, spec.chebyshev)
    if not spec.variational:
        caches.append((out_cache, None))
        return EncodeResult(z=out, caches=caches)
    logstd, _ = _layer_forward(prop, params.w_logstd, h, spec.chebyshev)
    caches.append((out_cache, None))
    z = out if eps is None else out + np.exp(logstd) * eps
    return EncodeResult(z=z, mu=out, logstd=logstd, caches=caches)


def encode(params: ModelParams, spec: ModelSpec, prop: CSRMatrix,
           X: NodeFeatures, eps: np.ndarray | None = None) -> EncodeResult:
    """Encoder forward pass.

    For variational variants, pass ``eps`` (standard normal, n x f) to
    sample with the reparameterization trick; without it the embedding is
    the posterior mean.
    """
    if not X.identity and X.d != (params.hidden[0] if params.hidden else params.w_out).shape[-2]:
        raise ValidationError("feature dimension does not match first-layer weights")
    return _forward(params, spec, prop, X, eps)


def _sigmoid(x):
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _softplus(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def decode_scores(z: np.ndarray, pairs) -> np.ndarray:
    """Inner-product decoder: sigmoid(z_i . z_j) per (i, j) pair."""
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.size == 0:
        return np.empty(0)
    if pairs.max() >= z.shape[0] or pairs.min() < 0:
        raise ValidationError("pair index out of range")
    dots = np.einsum("ij,ij->i", z[pairs[:, 0]], z[pairs[:, 1]])
    return _sigmoid(dots)


def reconstruction_loss(z: np.ndarray, g: Graph) -> tuple[float, np.ndarray]:
    """Weighted cross-entropy of sigmoid(Z Z^T) against A + I.

    All n^2 ordered pairs count; the positive class is the adjacency plus
    the diagonal (every node reconstructs itself), weighted by
    (n^2 - 2m) / 2m, and the mean over pairs is rescaled by
    n^2 / (2 (n^2 - 2m)).  Returns the loss and its gradient in Z,
    computed blockwise: the dense-logit gradient G is symmetric, so
    grad = 2 G Z splits into a streamed sigmoid(Z Z^T) Z product plus a
    sparse correction over the 2m + n positive entries.
    """
    z = np.ascontiguousarray(z, dtype=np.float64)
    n, f = z.shape
    if n != g.n:
        raise ValidationError("embedding rows do not match graph nodes")
    total = float(n) * float(n)
    two_m = 2.0 * g.m
    w_pos = (total - two_m) / two_m if two_m > 0 else 1.0
    norm = total / (2.0 * (total - two_m)) if total > two_m else 1.0
    scale = norm / total

    grad = np.empty_like(z)
    loss_all = 0.0
    block = max(1, min(n, _BLOCK_ENTRIES // max(n, 1)))
    for a in range(0, n, block):
        b = min(a + block, n)
        logits = z[a:b] @ z.T
        loss_all += _kernels.sigmoid_softplus_inplace(logits)
        grad[a:b] = logits @ z

    # positive entries: flip softplus(x) to w+ * softplus(-x) and the
    # gradient factor sigma(x) to -w+ * (1 - sigma(x))
    if g.m > 0:
        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
        x_e = np.einsum("ij,ij->i", z[src], z[g.indices])
        loss_all += float(np.sum(w_pos * _softplus(-x_e) - _softplus(x_e)))
        coef = w_pos + (1.0 - w_pos) * _sigmoid(x_e)
        corr = CSRMatrix(rows=n, cols=n, indptr=g.indptr, indices=g.indices, data=coef)
        grad -= spmm(corr, z)
    x_d = np.einsum("ij,ij->i", z, z)
    loss_all += float(np.sum(w_pos * _softplus(-x_d) - _softplus(x_d)))
    coef_d = w_pos + (1.0 - w_pos) * _sigmoid(x_d)
    grad -= coef_d[:, None] * z

    return scale * loss_all, (2.0 * scale) * grad


def kl_term(mu: np.ndarray, logstd: np.ndarray) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """KL divergence of the factorized Gaussian posterior from N(0, I).

    Per-node mean, scaled by a further 1/n so it balances the mean-reduced
    reconstruction term: value = 0.5/n^2 * sum(mu^2 + sigma^2 - 1 - 2 logstd).
    Always >= 0; returns gradients for both heads.
    """
    if mu.shape != logstd.shape:
        raise ValidationError("mu/logstd shape mismatch")
    n = mu.shape[0]
    s2 = np.exp(2.0 * logstd)
    scale = 0.5 / (n * n)
    value = scale * float(np.sum(mu * mu + s2 - 1.0 - 2.0 * logstd))
    grad_mu = (2.0 * scale) * mu
    grad_logstd = (2.0 * scale) * (s2 - 1.0)
    return value, (grad_mu, grad_logstd)


def loss_and_grads(params: ModelParams, spec: ModelSpec, prop: CSRMatrix,
                   X: NodeFeatures, g: Graph, eps: np.ndarray | None):
    """Full loss (reconstruction + KL for variational variants) and the
    gradient of every weight matrix, ordered like ``params.flat()``."""
    enc = _forward(params, spec, prop, X, eps)
    recon, grad_z = reconstruction_loss(enc.z, g)

    kl = 0.0
    if spec.variational:
        kl, (kl_gmu, kl_glogstd) = kl_term(enc.mu, enc.logstd)
        grad_mu = grad_z + kl_gmu
        sigma = np.exp(enc.logstd)
        grad_logstd = kl_glogstd
        if eps is not None:
            grad_logstd = grad_logstd + grad_z * eps * sigma
    else:
        grad_mu = grad_z

    out_cache = enc.caches[-1][0]
    gw_out, gh = _layer_backward(prop, params.w_out, out_cache, grad_mu,
                                 spec.chebyshev, need_grad_h=bool(params.hidden))
    gw_logstd = None
    if spec.variational:
        gw_logstd, gh2 = _layer_backward(prop, params.w_logstd, out_cache, grad_logstd,
                                         spec.chebyshev, need_grad_h=bool(params.hidden))
        if gh is not None:
            gh = gh + gh2

    hidden_grads = [None] * len(params.hidden)
    for l in range(len(params.hidden) - 1, -1, -1):
        cache, pre = enc.caches[l]
        grad_pre = gh * (pre > 0.0)
        hidden_grads[l], gh = _layer_backward(prop, params.hidden[l], cache, grad_pre,
                                              spec.chebyshev, need_grad_h=l > 0)

    grads = hidden_grads + [gw_out] + ([gw_logstd] if spec.variational else [])
    return recon, kl, grads, enc


def train(g: Graph, X: NodeFeatures, spec: ModelSpec) -> tuple[ModelParams, TrainReport]:
    """Full-batch training with Adam; deterministic for a fixed seed."""
    if g.n == 0:
        raise ValidationError("cannot train on an empty graph")
    if g.n > spec.dense_cap:
        raise ValidationError(
            f"graph has {g.n} nodes, above the dense-decoder cap of "
            f"{spec.dense_cap}; train on a higher k-core or raise dense_cap")
    if not X.identity and X.n != g.n:
        raise ValidationError("feature rows do not match graph nodes")

    prop = build_propagator(g, spec)
    rng = np.random.default_rng(spec.seed)
    params = init_params(spec, X.d, rng)
    n_hidden = len(params.hidden)
    flat = params.flat()
    adam = AdamState.for_params(flat, lr=spec.lr)

    recon_hist = np.empty(spec.epochs)
    kl_hist = np.empty(spec.epochs)
    t0 = time.perf_counter()
    for epoch in range(spec.epochs):
        eps = rng.standard_normal((g.n, spec.latent_dim)) if spec.variational else None
        params = ModelParams.from_flat(flat, n_hidden, spec.variational)
        recon, kl, grads, _ = loss_and_grads(params, spec, prop, X, g, eps)
        if not np.isfinite(recon):
            raise NumericError(f"non-finite reconstruction loss at epoch {epoch}")
        if not np.isfinite(kl):
            raise NumericError(f"non-finite KL term at epoch {epoch}")
        recon_hist[epoch] = recon
        kl_hist[epoch] = kl
        flat = adam_step(adam, flat, grads)
    seconds = time.perf_counter() - t0

    params = ModelParams.from_flat(flat, n_hidden, spec.variational)
    enc = _forward(params, spec, prop, X, eps=None)
    report = TrainReport(
        recon_history=recon_hist,
        kl_history=kl_hist,
        total_history=recon_hist + kl_hist,
        train_seconds=seconds,
        z=enc.z,
        mu=enc.mu,
        logstd=enc.logstd,
    )
    return params, report
