"""Cross-check the hand-derived training stack against a torch autograd twin.

The twin rebuilds the same encoder, loss and optimizer from the same
initial weights and noise draws, with gradients coming from autograd
instead of the hand derivation.  Forward values, gradients and whole Adam
trajectories must coincide to float precision.
"""

import numpy as np
import pytest

torch = pytest.importorskip("torch")

from coregae.graph import NodeFeatures
from coregae.models import (ModelParams, ModelSpec, build_propagator,
                            init_params, kl_term, loss_and_grads,
                            reconstruction_loss, train)
from coregae.numerics import AdamState, adam_step

from conftest import random_graph

torch.set_default_dtype(torch.float64)


def dense_propagator(g, spec):
    return torch.tensor(build_propagator(g, spec).to_dense())


def torch_forward(g, spec, weights, x, eps):
    """Same network as models._forward, in torch ops."""
    prop = dense_propagator(g, spec)
    order = spec.cheb_order

    def apply_layer(w, h):
        if not spec.chebyshev:
            p = w if h is None else h @ w
            return prop @ p
        basis = torch.eye(g.n) if h is None else h
        out = basis @ w[0]
        cur, prev = prop @ basis, basis
        out = out + cur @ w[1]
        for p in range(2, order + 1):
            cur, prev = 2.0 * (prop @ cur) - prev, cur
            out = out + cur @ w[p]
        return out

    n_hidden = len(weights) - (2 if spec.variational else 1)
    h = x
    for l in range(n_hidden):
        h = torch.relu(apply_layer(weights[l], h))
    mu = apply_layer(weights[n_hidden], h)
    if not spec.variational:
        return mu, None, mu
    logstd = apply_layer(weights[n_hidden + 1], h)
    z = mu if eps is None else mu + torch.exp(logstd) * eps
    return mu, logstd, z


def torch_loss(g, spec, weights, x, eps):
    mu, logstd, z = torch_forward(g, spec, weights, x, eps)
    n = g.n
    total = float(n * n)
    two_m = 2.0 * g.m
    w_pos = (total - two_m) / two_m if two_m > 0 else 1.0
    norm = total / (2.0 * (total - two_m)) if total > two_m else 1.0
    labels = torch.eye(n)
    src = np.repeat(np.arange(n), np.diff(g.indptr))
    labels[src, g.indices] = 1.0
    logits = z @ z.T
    recon = norm * torch.nn.functional.binary_cross_entropy_with_logits(
        logits, labels, pos_weight=torch.tensor(w_pos), reduction="mean")
    if not spec.variational:
        return recon, torch.tensor(0.0)
    kl = (0.5 / (n * n)) * torch.sum(
        mu * mu + torch.exp(2.0 * logstd) - 1.0 - 2.0 * logstd)
    return recon, kl


def setup(variant, featureless, seed=31, n=12, latent=3):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, 0.35)
    while g.m < 5:
        g = random_graph(rng, n, 0.5)
    hidden = (5, 4) if variant.startswith("deep") else (5,)
    spec = ModelSpec(variant=variant, hidden_dims=hidden, latent_dim=latent,
                     epochs=1, seed=seed, cheb_order=3)
    X = NodeFeatures.from_identity(g.n) if featureless else \
        NodeFeatures.from_dense(rng.standard_normal((g.n, 6)))
    params = init_params(spec, X.d, rng)
    eps = rng.standard_normal((g.n, latent)) if spec.variational else None
    return g, spec, X, params, eps


def to_torch(params):
    return [torch.tensor(w, requires_grad=True) for w in params.flat()]


@pytest.mark.parametrize("variant", ["gae", "vgae", "deepvgae", "chebgae", "chebvgae"])
@pytest.mark.parametrize("featureless", [True, False])
def test_loss_and_gradients_match_autograd(variant, featureless):
    g, spec, X, params, eps = setup(variant, featureless)
    prop = build_propagator(g, spec)
    recon, kl, grads, _ = loss_and_grads(params, spec, prop, X, g, eps)

    weights = to_torch(params)
    x = None if X.identity else torch.tensor(X.values)
    t_eps = None if eps is None else torch.tensor(eps)
    t_recon, t_kl = torch_loss(g, spec, weights, x, t_eps)
    assert recon == pytest.approx(t_recon.item(), rel=1e-10)
    assert kl == pytest.approx(t_kl.item(), rel=1e-10, abs=1e-15)

    (t_recon + t_kl).backward()
    for mine, theirs in zip(grads, weights):
        ref = theirs.grad.numpy()
        denom = max(1.0, np.abs(ref).max())
        assert np.abs(mine - ref).max() / denom < 1e-9


def test_adam_trajectory_matches_torch():
    g, spec, X, params, _ = setup("vgae", True, seed=7)
    spec = ModelSpec(variant="vgae", hidden_dims=spec.hidden_dims,
                     latent_dim=spec.latent_dim, epochs=30, seed=7)
    prop = build_propagator(g, spec)

    # my side: replay exactly what train() does
    rng = np.random.default_rng(spec.seed)
    mine = init_params(spec, X.d, rng)
    n_hidden = len(mine.hidden)
    flat = mine.flat()
    adam = AdamState.for_params(flat, lr=spec.lr)
    eps_draws, my_losses = [], []
    for _ in range(spec.epochs):
        eps = rng.standard_normal((g.n, spec.latent_dim))
        eps_draws.append(eps)
        p = ModelParams.from_flat(flat, n_hidden, True)
        recon, kl, grads, _ = loss_and_grads(p, spec, prop, X, g, eps)
        my_losses.append(recon + kl)
        flat = adam_step(adam, flat, grads)

    # torch side: same initial weights, same eps draws, torch.optim.Adam
    rng = np.random.default_rng(spec.seed)
    weights = to_torch(init_params(spec, X.d, rng))
    opt = torch.optim.Adam(weights, lr=spec.lr, betas=(0.9, 0.999), eps=1e-8)
    torch_losses = []
    for eps in eps_draws:
        opt.zero_grad()
        t_recon, t_kl = torch_loss(g, spec, weights, None, torch.tensor(eps))
        loss = t_recon + t_kl
        torch_losses.append(loss.item())
        loss.backward()
        opt.step()

    assert np.allclose(my_losses, torch_losses, rtol=1e-8, atol=1e-12), \
        np.abs(np.asarray(my_losses) - np.asarray(torch_losses)).max()


def test_train_endpoint_matches_torch_twin():
    # the public train() itself, loss history against the twin
    g, _, X, _, _ = setup("gae", True, seed=11)
    spec = ModelSpec(variant="gae", hidden_dims=(5,), latent_dim=3,
                     epochs=20, seed=11)
    _, report = train(g, X, spec)

    rng = np.random.default_rng(spec.seed)
    weights = to_torch(init_params(spec, X.d, rng))
    opt = torch.optim.Adam(weights, lr=spec.lr)
    losses = []
    for _ in range(spec.epochs):
        opt.zero_grad()
        recon, _ = torch_loss(g, spec, weights, None, None)
        losses.append(recon.item())
        recon.backward()
        opt.step()
    assert np.allclose(report.total_history, losses, rtol=1e-8)


def test_reconstruction_and_kl_primitives_match():
    rng = np.random.default_rng(17)
    g = random_graph(rng, 9, 0.4)
    z = rng.standard_normal((9, 4))
    loss, grad = reconstruction_loss(z, g)
    tz = torch.tensor(z, requires_grad=True)
    labels = torch.eye(9)
    src = np.repeat(np.arange(9), np.diff(g.indptr))
    labels[src, g.indices] = 1.0
    total, two_m = 81.0, 2.0 * g.m
    w_pos = (total - two_m) / two_m
    norm = total / (2.0 * (total - two_m))
    t_loss = norm * torch.nn.functional.binary_cross_entropy_with_logits(
        tz @ tz.T, labels, pos_weight=torch.tensor(w_pos), reduction="mean")
    t_loss.backward()
    assert loss == pytest.approx(t_loss.item(), rel=1e-12)
    assert np.abs(grad - tz.grad.numpy()).max() < 1e-12

    mu = rng.standard_normal((6, 3))
    logstd = rng.standard_normal((6, 3)) * 0.3
    value, (gm, gs) = kl_term(mu, logstd)
    tmu = torch.tensor(mu, requires_grad=True)
    tls = torch.tensor(logstd, requires_grad=True)
    t_kl = (0.5 / 36.0) * torch.sum(tmu * tmu + torch.exp(2 * tls) - 1 - 2 * tls)
    t_kl.backward()
    assert value == pytest.approx(t_kl.item(), rel=1e-12)
    assert np.abs(gm - tmu.grad.numpy()).max() < 1e-14
    assert np.abs(gs - tls.grad.numpy()).max() < 1e-14
