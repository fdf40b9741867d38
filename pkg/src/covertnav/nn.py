"""Small fully-connected networks with exact reverse-mode gradients, plus the
adaptive-moment optimizer. Everything runs on float64 numpy arrays; inputs may
be single vectors or (batch, dim) matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

_ACTIVATIONS = ("identity", "tanh", "relu")
_FINAL_INIT_SCALE = 3e-3  # small last layer keeps initial outputs near zero


def _apply(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    return z


def _deriv_from_output(name: str, a: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (a > 0.0).astype(float)
    if name == "tanh":
        return 1.0 - a * a
    return np.ones_like(a)


class Mlp:
    """Affine layers with rectifier hidden units and a configurable output."""

    def __init__(
        self,
        sizes: list[int] | tuple[int, ...],
        output_activation: str = "identity",
        rng: np.random.Generator | None = None,
    ):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if output_activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {output_activation!r}")
        rng = rng if rng is not None else np.random.default_rng()
        self.sizes = tuple(int(s) for s in sizes)
        self.output_activation = output_activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        last = len(self.sizes) - 2
        for i, (fan_in, fan_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:])):
            if i == last:
                w = rng.uniform(-_FINAL_INIT_SCALE, _FINAL_INIT_SCALE, (fan_in, fan_out))
            else:
                w = rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out))
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))

    def _activation(self, layer: int) -> str:
        return self.output_activation if layer == len(self.weights) - 1 else "relu"

    def _as_batch(self, x) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[-1] != self.sizes[0]:
            raise DimensionMismatchError(
                f"input width {arr.shape[-1]} != expected {self.sizes[0]}"
            )
        return arr, single

    def forward_cached(self, x) -> tuple[np.ndarray, list[np.ndarray]]:
        """Batch forward pass returning the output and per-layer activations."""
        arr, _ = self._as_batch(x)
        acts = [arr]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            acts.append(_apply(self._activation(i), acts[-1] @ w + b))
        return acts[-1], acts

    def forward(self, x) -> np.ndarray:
        single = np.asarray(x).ndim == 1
        out, _ = self.forward_cached(x)
        return out[0] if single else out

    def backward(
        self, acts: list[np.ndarray], grad_output: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Exact gradients from cached activations.

        Returns ([dW0, db0, dW1, db1, ...], grad wrt the input batch);
        gradients are summed over the batch.
        """
        grad_output = np.atleast_2d(np.asarray(grad_output, dtype=float))
        if grad_output.shape != acts[-1].shape:
            raise DimensionMismatchError(
                f"upstream gradient shape {grad_output.shape} != output {acts[-1].shape}"
            )
        grads: list[np.ndarray] = [np.empty(0)] * (2 * len(self.weights))
        delta = grad_output * _deriv_from_output(self._activation(len(self.weights) - 1), acts[-1])
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = acts[i].T @ delta
            grads[2 * i + 1] = delta.sum(axis=0)
            delta = delta @ self.weights[i].T
            if i > 0:
                delta = delta * _deriv_from_output("relu", acts[i])
        return grads, delta

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy_from(self, other: "Mlp") -> None:
        for dst, src in zip(self.params(), other.params()):
            dst[...] = src

    def clone(self) -> "Mlp":
        twin = Mlp(self.sizes, self.output_activation, np.random.default_rng(0))
        twin.copy_from(self)
        return twin

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "output_activation": self.output_activation,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mlp":
        net = cls(data["sizes"], data["output_activation"], np.random.default_rng(0))
        net.weights = [np.asarray(w, dtype=float) for w in data["weights"]]
        net.biases = [np.asarray(b, dtype=float) for b in data["biases"]]
        return net


def mlp_forward(net: Mlp, x) -> np.ndarray:
    """Functional forward pass through the network."""
    return net.forward(x)


def mlp_backward(net: Mlp, x, upstream_gradient) -> tuple[list[np.ndarray], np.ndarray]:
    """Gradients of the forward map at x: (parameter gradients, input gradient)."""
    _, acts = net.forward_cached(x)
    single = np.asarray(x).ndim == 1
    grads, dx = net.backward(acts, upstream_gradient)
    return grads, (dx[0] if single else dx)


class Critic:
    """Action-value network; the action joins at the first hidden layer."""

    def __init__(
        self,
        obs_dim: int,
        act_dim: int,
        hidden: int = 64,
        rng: np.random.Generator | None = None,
    ):
        rng = rng if rng is not None else np.random.default_rng()
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.trunk = Mlp([obs_dim, hidden], output_activation="relu", rng=rng)
        self.head = Mlp([hidden + act_dim, hidden, 1], output_activation="identity", rng=rng)

    def forward_cached(self, obs, act):
        obs2d = np.atleast_2d(np.asarray(obs, dtype=float))
        act2d = np.atleast_2d(np.asarray(act, dtype=float))
        h, trunk_acts = self.trunk.forward_cached(obs2d)
        q, head_acts = self.head.forward_cached(np.concatenate([h, act2d], axis=1))
        return q, (trunk_acts, head_acts)

    def q(self, obs, act) -> np.ndarray:
        return self.forward_cached(obs, act)[0]

    def backward(self, cache, grad_q):
        """Returns (parameter gradients, grad wrt obs, grad wrt action)."""
        trunk_acts, head_acts = cache
        head_grads, d_joint = self.head.backward(head_acts, grad_q)
        hidden = self.trunk.sizes[-1]
        trunk_grads, d_obs = self.trunk.backward(trunk_acts, d_joint[:, :hidden])
        return trunk_grads + head_grads, d_obs, d_joint[:, hidden:]

    def params(self) -> list[np.ndarray]:
        return self.trunk.params() + self.head.params()

    def copy_from(self, other: "Critic") -> None:
        for dst, src in zip(self.params(), other.params()):
            dst[...] = src

    def clone(self) -> "Critic":
        twin = Critic(self.obs_dim, self.act_dim, self.trunk.sizes[-1], np.random.default_rng(0))
        twin.copy_from(self)
        return twin

    def to_dict(self) -> dict:
        return {
            "obs_dim": self.obs_dim,
            "act_dim": self.act_dim,
            "trunk": self.trunk.to_dict(),
            "head": self.head.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Critic":
        critic = cls(data["obs_dim"], data["act_dim"], data["trunk"]["sizes"][-1])
        critic.trunk = Mlp.from_dict(data["trunk"])
        critic.head = Mlp.from_dict(data["head"])
        return critic


@dataclass
class OptState:
    """Adam accumulators for one parameter list."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: list[np.ndarray], lr: float = 1e-4) -> "OptState":
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
            lr=lr,
        )


def opt_step(
    params: list[np.ndarray], grads: list[np.ndarray], opt: OptState
) -> list[np.ndarray]:
    """One in-place Adam update with bias correction; returns the params."""
    if len(params) != len(grads) or any(p.shape != g.shape for p, g in zip(params, grads)):
        raise DimensionMismatchError("parameter and gradient shapes do not match")
    if len(params) != len(opt.m):
        raise DimensionMismatchError("optimizer state does not match parameters")
    opt.t += 1
    bc1 = 1.0 - opt.beta1**opt.t
    bc2 = 1.0 - opt.beta2**opt.t
    for p, g, m, v in zip(params, grads, opt.m, opt.v):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * g * g
        p -= opt.lr * (m / bc1) / (np.sqrt(v / bc2) + opt.eps)
    return params


def soft_update(dst: list[np.ndarray], src: list[np.ndarray], tau: float) -> None:
    """Polyak averaging dst <- tau * src + (1 - tau) * dst, in place."""
    for d, s in zip(dst, src):
        d *= 1.0 - tau
        d += tau * s
