import numpy as np
import pytest

from coregae.graph import Graph

_ACCEPTANCE_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    crit = _ACCEPTANCE_RESULTS.get(report.nodeid)
    if crit is None:
        return
    if report.when == "setup" and report.skipped:
        crit["outcome"] = f"SKIP ({report.longrepr[2] if report.longrepr else ''})"
    elif report.when == "call":
        crit["outcome"] = "PASS" if report.passed else "FAIL"


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            _ACCEPTANCE_RESULTS[item.nodeid] = {
                "n": marker.args[0], "title": marker.args[1], "outcome": "NOT RUN"}


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE_RESULTS.values(), key=lambda c: c["n"]):
        terminalreporter.write_line(
            f"criterion {crit['n']:>2} [{crit['outcome']}] {crit['title']}")


def make_graph(edges, n=None, weights=None):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(edges[:, 0], edges[:, 1], weight=weights, n=n,
                            weighted=weights is not None)


def random_graph(rng, n, p):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph.from_edges(iu[keep], ju[keep], n=n)


def validate_graph(g):
    """Check every structural invariant of the Graph type."""
    assert len(g.indptr) == g.n + 1
    assert g.indptr[0] == 0 and g.indptr[-1] == len(g.indices) == 2 * g.m
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    assert (src != g.indices).all(), "self-loop present"
    for v in range(g.n):
        nb = g.neighbors(v)
        assert (np.diff(nb) > 0).all(), "neighbors not strictly sorted"
    pairs = set(zip(src.tolist(), g.indices.tolist()))
    assert all((j, i) in pairs for i, j in pairs), "not symmetric"
    if g.weighted:
        w = {(i, j): wij for i, j, wij in
             zip(src.tolist(), g.indices.tolist(), g.weights.tolist())}
        assert all(w[(i, j)] == w[(j, i)] for i, j in w), "weights not symmetric"
        assert all(wij > 0 for wij in w.values())


def bf_core_numbers(g):
    """Literal 'remove all nodes with degree < k to fixpoint' oracle."""
    core = np.zeros(g.n, dtype=np.int64)
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    k = 1
    alive = set(range(g.n))
    while alive:
        changed = True
        while changed:
            drop = {v for v in alive if len(adj[v] & alive) < k}
            changed = bool(drop)
            alive -= drop
        for v in alive:
            core[v] = k
        k += 1
    return core


def random_csr(rng, rows, cols, density=0.4):
    """Random CSR matrix together with its dense mirror."""
    from coregae.numerics import CSRMatrix

    dense = rng.standard_normal((rows, cols)) * (rng.random((rows, cols)) < density)
    r, c = np.nonzero(dense)
    return CSRMatrix.from_coo(rows, cols, r, c, dense[r, c]), dense


def numeric_gradient(f, x, eps=1e-5):
    """Central finite differences of a scalar function of an array."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.ravel()
    gflat = grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = f(x)
        flat[i] = orig - eps
        lo = f(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def rel_err(analytic, numeric):
    denom = max(1.0, float(np.abs(numeric).max()))
    return float(np.abs(analytic - numeric).max()) / denom


def power_radius(dense, iters=2000, seed=0):
    """Power-iteration estimate of the spectral radius."""
    n = dense.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.random(n) + 0.1
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = dense @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        lam = norm
        v = w / norm
    return float(lam)


@pytest.fixture
def triangle():
    return make_graph([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return make_graph([(0, 1), (1, 2)])


@pytest.fixture
def star4():
    return make_graph([(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def k4_pendant():
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)] + [(0, 4)]
    return make_graph(edges)
