"""Shared oracles and generators used by both the unit and acceptance suites."""

import numpy as np

from covertnav.nn import Mlp


def min_abs_preactivation(net, xs):
    """Smallest |pre-activation| over hidden units; guards the finite-difference
    oracle against rectifier kinks inside the perturbation interval."""
    worst = np.inf
    a = np.atleast_2d(xs)
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        if i < len(net.weights) - 1:
            worst = min(worst, float(np.abs(z).min()))
            a = np.maximum(z, 0.0)
        else:
            a = z
    return worst


def fd_param_grads(net, xs, upstream, h=1e-6):
    """Central finite differences of sum(upstream * output) wrt every parameter."""

    def scalar():
        return float(np.sum(np.atleast_2d(net.forward(xs)) * upstream))

    grads = []
    for p in net.params():
        g = np.zeros_like(p)
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            hi = scalar()
            flat[i] = keep - h
            lo = scalar()
            flat[i] = keep
            gflat[i] = (hi - lo) / (2.0 * h)
        grads.append(g)
    return grads


def random_net_and_input(seed, max_hidden_layers=3, max_width=32):
    """A random net/input pair whose hidden pre-activations stay clear of zero."""
    attempt = seed
    while True:
        rng = np.random.default_rng(attempt)
        n_hidden = int(rng.integers(0, max_hidden_layers + 1))
        sizes = (
            [int(rng.integers(2, 7))]
            + [int(rng.integers(2, max_width + 1)) for _ in range(n_hidden)]
            + [int(rng.integers(1, 4))]
        )
        act = str(rng.choice(["identity", "tanh", "relu"]))
        net = Mlp(sizes, act, rng)
        net.weights[-1][...] = rng.normal(0.0, 0.5, size=net.weights[-1].shape)
        xs = rng.normal(size=(int(rng.integers(1, 4)), sizes[0]))
        if min_abs_preactivation(net, xs) > 1e-4:
            return net, xs, rng
        attempt += 10_000


def max_grad_rel_error(analytic, numeric):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(n)))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def value_iteration_qstar(gamma, tol=1e-10):
    """Exact Q* of the two-state toggle MDP by value iteration."""
    q = np.zeros((2, 2))  # [state, bucket]; bucket 1 = toggle
    while True:
        nxt = np.zeros_like(q)
        for s in range(2):
            for bucket in range(2):
                s2 = 1 - s if bucket == 1 else s
                reward = 1.0 if s2 == 1 else 0.0
                nxt[s, bucket] = reward + gamma * q[s2].max()
        if np.abs(nxt - q).max() < tol:
            return nxt
        q = nxt
