"""Dense-network substrate: forward, exact backprop, Adam.

Everything downstream (score nets, coupling nets, embeddings, decoders) is
built from `Mlp`. All arithmetic is float64 and all operations are pure
functions of (params, input) except `adam_step`, which updates its buffers
in place; callers own their instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .util import ConfigError, TrainingDiverged

HIDDEN_ACTIVATIONS = ("relu", "requ", "tanh")
OUTPUT_ACTIVATIONS = ("identity", "scaled_tanh")


@dataclass
class Mlp:
    """Feedforward network: affine layers with an activation between them.

    `layer_dims` runs input-first, e.g. [3, 128, 128, 1]. Weight k maps
    dim k -> dim k+1. `output_bound` is the scale B of the scaled_tanh head
    (outputs land in [-B, B]); ignored for identity heads.
    """

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "relu"
    output_activation: str = "identity"
    output_bound: float = 1.0

    def __post_init__(self):
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ConfigError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ConfigError(f"unknown output activation {self.output_activation!r}")
        if any(d <= 0 for d in self.layer_dims):
            raise ConfigError(f"layer dims must be positive: {self.layer_dims}")
        if len(self.weights) != len(self.layer_dims) - 1 or len(self.biases) != len(self.weights):
            raise ConfigError("weights/biases do not chain with layer_dims")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_dims[k + 1], self.layer_dims[k])
            if w.shape != want or b.shape != (want[0],):
                raise ConfigError(f"layer {k}: weight {w.shape} != {want} or bias {b.shape}")

    @property
    def d_in(self) -> int:
        return self.layer_dims[0]

    @property
    def d_out(self) -> int:
        return self.layer_dims[-1]

    def params(self) -> list[np.ndarray]:
        """Live parameter arrays, interleaved [W0, b0, W1, b1, ...]."""
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "Mlp":
        return Mlp(
            list(self.layer_dims),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.hidden_activation,
            self.output_activation,
            self.output_bound,
        )


def init_mlp(
    layer_dims: list[int],
    hidden_activation: str = "relu",
    output_activation: str = "identity",
    output_bound: float = 1.0,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> Mlp:
    """He-uniform init for relu/requ hidden layers, Xavier-uniform otherwise."""
    if rng is None:
        rng = np.random.default_rng(seed)
    he = hidden_activation in ("relu", "requ")
    weights, biases = [], []
    for k in range(len(layer_dims) - 1):
        fan_in, fan_out = layer_dims[k], layer_dims[k + 1]
        if he:
            limit = math.sqrt(6.0 / fan_in)
        else:
            limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(list(layer_dims), weights, biases, hidden_activation, output_activation, output_bound)


def _act(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return np.maximum(z, 0.0)
    if tag == "requ":
        r = np.maximum(z, 0.0)
        return r * r
    return np.tanh(z)


def _act_grad(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return (z > 0.0).astype(np.float64)
    if tag == "requ":
        return 2.0 * np.maximum(z, 0.0)
    t = np.tanh(z)
    return 1.0 - t * t


def forward_cached(net: Mlp, x: np.ndarray):
    """Batched forward pass returning (output, cache) for a later backward."""
    a = np.asarray(x, dtype=np.float64)
    acts = [a]
    pre = []
    n_layers = len(net.weights)
    for k in range(n_layers):
        z = a @ net.weights[k].T + net.biases[k]
        pre.append(z)
        if k < n_layers - 1:
            a = _act(net.hidden_activation, z)
        elif net.output_activation == "scaled_tanh":
            a = net.output_bound * np.tanh(z)
        else:
            a = z
        acts.append(a)
    return a, (acts, pre)


def backward_cached(net: Mlp, cache, output_grad: np.ndarray):
    """Gradients of <output, output_grad> wrt params and input, from a cache."""
    acts, pre = cache
    n_layers = len(net.weights)
    delta = np.asarray(output_grad, dtype=np.float64)
    if net.output_activation == "scaled_tanh":
        t = np.tanh(pre[-1])
        delta = delta * net.output_bound * (1.0 - t * t)
    grads: list[np.ndarray] = [None] * (2 * n_layers)  # type: ignore[list-item]
    for k in range(n_layers - 1, -1, -1):
        grads[2 * k] = delta.T @ acts[k]
        grads[2 * k + 1] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ net.weights[k]) * _act_grad(net.hidden_activation, pre[k - 1])
        else:
            delta = delta @ net.weights[k]
    return grads, delta


def mlp_forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Evaluate the network; accepts a single vector or an (n, d_in) batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != net.d_in:
        raise ConfigError(f"input dim {x.shape[1]} != net input dim {net.d_in}")
    out, _ = forward_cached(net, x)
    return out[0] if single else out


def mlp_backward(net: Mlp, x: np.ndarray, output_grad: np.ndarray):
    """Exact reverse-mode gradients of <output, output_grad>.

    Returns (param_grads, input_grad) with param_grads interleaved like
    `Mlp.params()`. Batched inputs sum parameter gradients over rows and
    return per-row input gradients.
    """
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(output_grad, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
        g = g[None, :]
    if x.shape[1] != net.d_in or g.shape[1] != net.d_out:
        raise ConfigError(
            f"shapes ({x.shape}, {g.shape}) inconsistent with net {net.d_in}->{net.d_out}"
        )
    _, cache = forward_cached(net, x)
    grads, input_grad = backward_cached(net, cache, g)
    return grads, (input_grad[0] if single else input_grad)


def mlp_input_jacobian(net: Mlp, x: np.ndarray) -> np.ndarray:
    """d output / d input at a single point, shape (d_out, d_in)."""
    x = np.asarray(x, dtype=np.float64)
    _, cache = forward_cached(net, x[None, :])
    rows = []
    for j in range(net.d_out):
        one_hot = np.zeros((1, net.d_out))
        one_hot[0, j] = 1.0
        _, g = backward_cached(net, cache, one_hot)
        rows.append(g[0])
    return np.stack(rows)


def clip_params(net: Mlp, max_abs: float) -> None:
    """Optional max-norm projection of all weights and biases (off by default)."""
    for p in net.params():
        np.clip(p, -max_abs, max_abs, out=p)


@dataclass
class AdamState:
    """Adam moment buffers, shaped like the parameter list they optimize."""

    first_moment: list[np.ndarray]
    second_moment: list[np.ndarray]
    step_count: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(params: list[np.ndarray], learning_rate: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        first_moment=[np.zeros_like(p) for p in params],
        second_moment=[np.zeros_like(p) for p in params],
        step_count=0,
        learning_rate=learning_rate,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(params: list[np.ndarray], grads: list[np.ndarray], state: AdamState):
    """Bias-corrected Adam update, applied in place. Returns (params, state)."""
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise TrainingDiverged(f"non-finite gradient at step {state.step_count + 1}")
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= state.learning_rate * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params, state


def finite_diff_grad(loss, params: list[np.ndarray], step: float = 1e-5) -> list[np.ndarray]:
    """Central-difference gradient of `loss(params)`; test oracle only."""
    grads = []
    for p in params:
        g = np.zeros_like(p)
        flat_p = p.ravel()
        flat_g = g.ravel()
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + step
            hi = loss(params)
            flat_p[i] = orig - step
            lo = loss(params)
            flat_p[i] = orig
            flat_g[i] = (hi - lo) / (2.0 * step)
        grads.append(g)
    return grads


def requ_product_net() -> Mlp:
    """Fixed-weight requ network computing (x, y) -> x*y exactly.

    Uses the polarization identity x*y = ((x+y)^2 - (x-y)^2) / 4, with each
    square realized as requ(t) + requ(-t).
    """
    w1 = np.array([[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]])
    b1 = np.zeros(4)
    w2 = np.array([[0.25, 0.25, -0.25, -0.25]])
    b2 = np.zeros(1)
    return Mlp([2, 4, 1], [w1, w2], [b1, b2], hidden_activation="requ")
