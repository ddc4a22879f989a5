"""Metrics: tie-aware AUC and average precision, k-means++ clustering, NMI.

AUC uses the Mann-Whitney form with ties counted half, computed by sorted
search so it matches brute-force pair enumeration exactly.  AP treats
equal scores as one group with pooled precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import EdgeSplit
from .models import decode_scores

__all__ = [
    "LinkPredReport",
    "ClusterReport",
    "TimingReport",
    "KMeansResult",
    "roc_auc",
    "average_precision",
    "link_prediction_eval",
    "kmeans",
    "nmi",
]


@dataclass(frozen=True)
class LinkPredReport:
    auc: float
    ap: float
    split: str
    seed: int | None = None


@dataclass(frozen=True)
class ClusterReport:
    nmi: float
    k: int
    kmeans_seed: int
    inertia: float


@dataclass(frozen=True)
class TimingReport:
    kcore_seconds: float
    train_seconds: float
    propagation_seconds: float
    total_seconds: float
    speed_gain: float | None = None


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    inertia: float
    iterations: int


def roc_auc(pos_scores, neg_scores) -> float:
    """P(random positive outscores random negative), ties counting half."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if len(pos) == 0 or len(neg) == 0:
        raise ValidationError("roc_auc needs non-empty score lists")
    neg_sorted = np.sort(neg)
    lo = np.searchsorted(neg_sorted, pos, side="left")
    hi = np.searchsorted(neg_sorted, pos, side="right")
    wins = int(lo.sum())
    ties = int((hi - lo).sum())
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def average_precision(pos_scores, neg_scores) -> float:
    """Area under the precision-recall steps of the descending ranking,
    equal scores pooled into one group."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if len(pos) == 0 or len(neg) == 0:
        raise ValidationError("average_precision needs non-empty score lists")
    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(len(pos), dtype=np.int64),
                             np.zeros(len(neg), dtype=np.int64)])
    uniq, inv = np.unique(scores, return_inverse=True)
    n_groups = len(uniq)
    desc = n_groups - 1 - inv            # group 0 = highest score
    tp_group = np.bincount(desc, weights=labels, minlength=n_groups)
    all_group = np.bincount(desc, minlength=n_groups)
    tp = np.cumsum(tp_group)
    seen = np.cumsum(all_group)
    recall = tp / len(pos)
    precision = tp / seen
    drecall = np.diff(np.concatenate([[0.0], recall]))
    return float(np.sum(drecall * precision))


def link_prediction_eval(z: np.ndarray, split: EdgeSplit, which: str = "test",
                         seed: int | None = None) -> LinkPredReport:
    """Score held-out pairs with the inner-product decoder."""
    if which == "test":
        pos, neg = split.test_pos, split.test_neg
    elif which == "val":
        pos, neg = split.val_pos, split.val_neg
    else:
        raise ValidationError("which must be 'test' or 'val'")
    pairs = np.concatenate([pos, neg])
    if len(pairs) and pairs.max() >= z.shape[0]:
        raise ValidationError("split references a node without an embedding")
    pos_scores = decode_scores(z, pos)
    neg_scores = decode_scores(z, neg)
    return LinkPredReport(auc=roc_auc(pos_scores, neg_scores),
                          ap=average_precision(pos_scores, neg_scores),
                          split=which, seed=seed)


def _kmeans_pp(x: np.ndarray, k: int, rng) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining mass at distance zero: take points not yet
            # chosen, lowest index first, to stay deterministic
            chosen = {tuple(centers[i]) for i in range(c)}
            idx = next((i for i in range(n) if tuple(x[i]) not in chosen), 0)
        else:
            idx = rng.choice(n, p=d2 / total)
        centers[c] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))
    return centers


def kmeans(z: np.ndarray, k: int, seed: int, max_iter: int = 300) -> KMeansResult:
    """Lloyd iterations from k-means++ seeding until the assignment is a
    fixpoint or ``max_iter`` passes; deterministic per seed."""
    x = np.asarray(z, dtype=np.float64)
    n = x.shape[0]
    if k > n:
        raise ValidationError(f"k={k} exceeds {n} points")
    if k < 1:
        raise ValidationError("k must be >= 1")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(x, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    it = 0
    for it in range(1, max_iter + 1):
        d2 = (np.sum(x * x, axis=1)[:, None]
              - 2.0 * x @ centers.T
              + np.sum(centers * centers, axis=1)[None, :])
        new_labels = np.argmin(d2, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = labels == c
            if members.any():
                centers[c] = x[members].mean(axis=0)
            else:
                best = d2[np.arange(n), labels]
                far = int(np.argmax(best))
                if best[far] > 0:
                    centers[c] = x[far]
    inertia = float(np.sum((x - centers[labels]) ** 2))
    return KMeansResult(labels=labels, inertia=inertia, iterations=it)


def nmi(pred_labels, true_labels) -> float:
    """Mutual information normalized by the arithmetic mean of entropies.

    1.0 for identical partitions, 0.0 when either partition carries no
    information and the two differ.
    """
    a = np.asarray(pred_labels, dtype=np.int64)
    b = np.asarray(true_labels, dtype=np.int64)
    if a.shape != b.shape:
        raise ValidationError("label arrays differ in length")
    n = len(a)
    if n == 0:
        raise ValidationError("empty label arrays")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    ka, kb = ai.max() + 1, bi.max() + 1
    cont = np.bincount(ai * kb + bi, minlength=ka * kb).reshape(ka, kb)
    pij = cont / n
    pa = pij.sum(axis=1)
    pb = pij.sum(axis=0)
    ha = -np.sum(pa[pa > 0] * np.log(pa[pa > 0]))
    hb = -np.sum(pb[pb > 0] * np.log(pb[pb > 0]))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    nz = pij > 0
    mi = float(np.sum(pij[nz] * (np.log(pij[nz]) - np.log(np.outer(pa, pb)[nz]))))
    mi = max(mi, 0.0)
    return min(mi / (0.5 * (ha + hb)), 1.0)
