"""Timing harness comparing the compiled kernels with the numpy fallback."""

from __future__ import annotations

import time

import numpy as np

from .numerics import normalized_adjacency
from .synth import configuration_graph

__all__ = ["available_backends", "run_kernel_benchmarks", "format_table"]


def available_backends() -> dict:
    from ._kernels import _pykern

    backends = {"python": _pykern}
    try:
        from ._kernels import _ckern

        backends["compiled"] = _ckern
    except ImportError:
        pass
    return backends


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_kernel_benchmarks(n: int = 50_000, m: int = 400_000, f: int = 16,
                          seed: int = 0, repeats: int = 3) -> list[dict]:
    """Per-kernel best-of-``repeats`` wall time for every backend."""
    g = configuration_graph(n, m, seed)
    adj = normalized_adjacency(g)
    rng = np.random.default_rng(seed)
    dense = rng.standard_normal((n, f))
    block = rng.standard_normal((512, 4096))

    rows = []
    for name, mod in sorted(available_backends().items()):
        rows.append({
            "kernel": "peel_cores", "backend": name,
            "seconds": _time(lambda: mod.peel_cores(g.indptr, g.indices), repeats),
            "work": f"n={g.n} m={g.m}",
        })
        out = np.empty_like(dense)
        rows.append({
            "kernel": "csr_spmm", "backend": name,
            "seconds": _time(
                lambda: mod.csr_spmm(adj.indptr, adj.indices, adj.data, dense, out),
                repeats),
            "work": f"nnz={adj.nnz} f={f}",
        })
        buf = np.empty_like(block)
        def fused():
            np.copyto(buf, block)
            mod.sigmoid_softplus_inplace(buf)
        rows.append({
            "kernel": "sigmoid_softplus", "backend": name,
            "seconds": _time(fused, repeats),
            "work": f"entries={block.size}",
        })
    return rows


def format_table(rows) -> str:
    lines = [f"{'kernel':<18} {'backend':<10} {'seconds':>12}  work"]
    by_kernel = {}
    for row in rows:
        by_kernel.setdefault(row["kernel"], {})[row["backend"]] = row["seconds"]
        lines.append(f"{row['kernel']:<18} {row['backend']:<10} "
                     f"{row['seconds']:>12.6f}  {row['work']}")
    for kernel, times in by_kernel.items():
        if "compiled" in times and "python" in times:
            lines.append(f"{kernel}: compiled is "
                         f"{times['python'] / times['compiled']:.1f}x faster")
    return "\n".join(lines) + "\n"
