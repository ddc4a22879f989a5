"""Pure-python (numpy) fallbacks for the compiled kernels.

Same contracts as ``_ckern``; used when the extension is unavailable or
when COREGAE_PURE_PYTHON is set.
"""

import numpy as np

# rows are processed in nnz chunks of roughly this size to bound temporaries
_CHUNK_NNZ = 1 << 19


def sigmoid_softplus_inplace(x):
    """Replace x by sigmoid(x) elementwise; return sum(softplus(x))."""
    if x.size == 0:
        return 0.0
    e = np.abs(x)
    np.negative(e, out=e)
    np.exp(e, out=e)                      # e = exp(-|x|)
    acc = float(np.log1p(e).sum() + np.maximum(x, 0.0).sum())
    den = e + 1.0
    np.reciprocal(den, out=den)           # 1 / (1 + e)
    neg = x < 0.0
    np.multiply(e, den, out=e)            # e / (1 + e)
    np.copyto(x, den)
    np.copyto(x, e, where=neg)
    return acc


def peel_cores(indptr, indices):
    """Core number of every node by bin-sorted degree peeling."""
    n = len(indptr) - 1
    core = np.zeros(n, dtype=np.int64)
    if n == 0:
        return core
    deg = np.diff(indptr).astype(np.int64)
    md = int(deg.max())
    bins = np.zeros(md + 2, dtype=np.int64)
    for v in range(n):
        bins[deg[v]] += 1
    start = 0
    for d in range(md + 1):
        cnt = bins[d]
        bins[d] = start
        start += cnt
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    for v in range(n):
        pos[v] = bins[deg[v]]
        vert[pos[v]] = v
        bins[deg[v]] += 1
    bins[1:md + 1] = bins[0:md]
    bins[0] = 0

    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    deg_l = deg.tolist()
    bins_l = bins.tolist()
    pos_l = pos.tolist()
    vert_l = vert.tolist()
    core_l = core.tolist()
    for i in range(n):
        v = vert_l[i]
        dv = deg_l[v]
        core_l[v] = dv
        for k in range(indptr_l[v], indptr_l[v + 1]):
            u = indices_l[k]
            du = deg_l[u]
            if du > dv:
                pu = pos_l[u]
                pw = bins_l[du]
                w = vert_l[pw]
                if u != w:
                    pos_l[u] = pw
                    vert_l[pu] = w
                    pos_l[w] = pu
                    vert_l[pw] = u
                bins_l[du] = pw + 1
                deg_l[u] = du - 1
    return np.asarray(core_l, dtype=np.int64)


def csr_spmm(indptr, indices, data, b, out):
    """out = CSR(indptr, indices, data) @ b, chunked over row blocks."""
    rows = len(indptr) - 1
    if rows == 0:
        return
    r0 = 0
    while r0 < rows:
        r1 = r0 + 1
        while r1 < rows and indptr[r1 + 1] - indptr[r0] <= _CHUNK_NNZ:
            r1 += 1
        s, e = indptr[r0], indptr[r1]
        if s == e:
            out[r0:r1] = 0.0
        else:
            prod = data[s:e, None] * b[indices[s:e]]
            offsets = (indptr[r0:r1] - s).astype(np.intp)
            np.add.reduceat(prod, offsets, axis=0, out=out[r0:r1])
            empty = np.diff(indptr[r0:r1 + 1]) == 0
            if empty.any():
                out[r0:r1][empty] = 0.0   # reduceat yields prod[o] for o==o'
        r0 = r1
