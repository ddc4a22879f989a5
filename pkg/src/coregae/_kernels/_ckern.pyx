# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: core peeling, CSR spmm, fused decoder pass."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    #include <math.h>

    /* Overwrite x with sigmoid(x) and return the sum of softplus(x).
     * One exp and one log1p per entry; written so gcc vectorizes the
     * loop via libmvec under -ffast-math. */
    static double cg_sigmoid_softplus(double *x, long long nelems) {
        double acc = 0.0;
        long long i;
        for (i = 0; i < nelems; i++) {
            double v = x[i];
            double a = fabs(v);
            double e = exp(-a);
            double den = 1.0 / (1.0 + e);
            acc += (v > 0.0 ? v : 0.0) + log1p(e);
            x[i] = (v >= 0.0) ? den : e * den;
        }
        return acc;
    }
    """
    double cg_sigmoid_softplus(double *x, long long nelems) nogil


def sigmoid_softplus_inplace(double[:, ::1] x):
    """Replace x by sigmoid(x) elementwise; return sum(softplus(x))."""
    cdef long long nelems = x.shape[0] * x.shape[1]
    cdef double acc
    if nelems == 0:
        return 0.0
    with nogil:
        acc = cg_sigmoid_softplus(&x[0, 0], nelems)
    return acc


def peel_cores(const long long[::1] indptr, const long long[::1] indices):
    """Core number of every node by bin-sorted degree peeling.

    O(max(m, n)) time, O(m + n) space; ties between equal-degree nodes
    resolved by ascending node id.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    core_arr = np.zeros(n, dtype=np.int64)
    if n == 0:
        return core_arr
    deg_arr = np.diff(np.asarray(indptr)).astype(np.int64)
    cdef long long md = int(deg_arr.max()) if n else 0
    bins_arr = np.zeros(md + 2, dtype=np.int64)
    pos_arr = np.empty(n, dtype=np.int64)
    vert_arr = np.empty(n, dtype=np.int64)

    cdef long long[::1] core = core_arr
    cdef long long[::1] deg = deg_arr
    cdef long long[::1] bins = bins_arr
    cdef long long[::1] pos = pos_arr
    cdef long long[::1] vert = vert_arr
    cdef Py_ssize_t v, i, k
    cdef long long d, start, cnt, u, w, du, pu, pw

    with nogil:
        for v in range(n):
            bins[deg[v]] += 1
        start = 0
        for d in range(md + 1):
            cnt = bins[d]
            bins[d] = start
            start += cnt
        for v in range(n):                      # stable: ascending node id
            pos[v] = bins[deg[v]]
            vert[pos[v]] = v
            bins[deg[v]] += 1
        for d in range(md, 0, -1):
            bins[d] = bins[d - 1]
        bins[0] = 0

        for i in range(n):
            v = vert[i]
            core[v] = deg[v]
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if deg[u] > deg[v]:
                    du = deg[u]
                    pu = pos[u]
                    pw = bins[du]
                    w = vert[pw]
                    if u != w:
                        pos[u] = pw
                        vert[pu] = w
                        pos[w] = pu
                        vert[pw] = u
                    bins[du] += 1
                    deg[u] -= 1
    return core_arr


def csr_spmm(const long long[::1] indptr, const long long[::1] indices,
             const double[::1] data, const double[:, ::1] b, double[:, ::1] out):
    """out = CSR(indptr, indices, data) @ b; sequential reduction per row."""
    cdef Py_ssize_t rows = indptr.shape[0] - 1
    cdef Py_ssize_t f = b.shape[1]
    cdef Py_ssize_t r, c
    cdef long long k, j
    cdef double w
    with nogil:
        for r in range(rows):
            for c in range(f):
                out[r, c] = 0.0
            for k in range(indptr[r], indptr[r + 1]):
                j = indices[k]
                w = data[k]
                for c in range(f):
                    out[r, c] += w * b[j, c]
