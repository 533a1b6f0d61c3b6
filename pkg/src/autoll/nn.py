"""Minimal dense neural-network substrate.

Implements exactly what the reordering models need and nothing more: a
multilayer perceptron in which every layer is an affine map followed by
the logistic sigmoid, reverse-mode gradients for a binary cross-entropy
objective with L2 weight decay, and the Adam optimizer.  All arithmetic
is 64-bit.

Parameters of a network live in one flat vector (``MlpNetwork.theta``);
the per-layer weight matrices and bias vectors are reshaped views into
that vector.  This keeps optimizer updates and finite-difference checks
trivial: both operate on the flat vector, and the views follow along as
long as updates are written in place (``theta[:] = ...``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, ShapeError

# Predictions are clamped this far away from {0, 1} before any log.
PREDICTION_CLAMP = 1e-12


@dataclass
class TrainHyper:
    """Optimizer and regularization settings.

    Defaults: learning rate 1e-2, Adam decays (0.9, 0.999), epsilon
    1e-8, L2 weight-decay coefficient 1e-10.
    """

    eta: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    lam: float = 1e-10

    def validate(self):
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ConfigurationError("Adam decays must lie in (0, 1)")
        if self.epsilon <= 0.0:
            raise ConfigurationError("epsilon must be positive")
        if self.lam < 0.0:
            raise ConfigurationError("L2 coefficient must be >= 0")


def _layer_views(layer_sizes, vec):
    """Per-layer (weights, biases) views into the flat vector ``vec``."""
    weights, biases, off = [], [], 0
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(vec[off:off + fan_out * fan_in].reshape(fan_out, fan_in))
        off += fan_out * fan_in
        biases.append(vec[off:off + fan_out])
        off += fan_out
    return weights, biases


def _param_count(layer_sizes):
    return sum((i + 1) * o for i, o in zip(layer_sizes[:-1], layer_sizes[1:]))


class MlpNetwork:
    """Stack of sigmoid(W x + b) layers.

    ``layer_sizes`` lists the unit counts from input to output;
    ``weights[l]`` has shape ``(layer_sizes[l+1], layer_sizes[l])``.
    Every layer output therefore lies in (0, 1).
    """

    def __init__(self, layer_sizes, theta=None):
        layer_sizes = tuple(int(m) for m in layer_sizes)
        if len(layer_sizes) < 2:
            raise ConfigurationError("need at least an input and an output layer")
        if any(m <= 0 for m in layer_sizes):
            raise ConfigurationError(f"layer sizes must be positive: {layer_sizes}")
        self.layer_sizes = layer_sizes
        count = _param_count(layer_sizes)
        if theta is None:
            theta = np.zeros(count)
        else:
            theta = np.ascontiguousarray(theta, dtype=np.float64)
            if theta.shape != (count,):
                raise ShapeError(f"expected {count} parameters, got {theta.shape}")
        self.theta = theta
        self.weights, self.biases = _layer_views(layer_sizes, self.theta)

    @property
    def n_layers(self):
        return len(self.layer_sizes) - 1

    def views_of(self, vec):
        """View an external flat vector (e.g. a gradient) per layer."""
        vec = np.asarray(vec)
        if vec.shape != self.theta.shape:
            raise ShapeError(f"expected shape {self.theta.shape}, got {vec.shape}")
        return _layer_views(self.layer_sizes, vec)

    def copy(self):
        return MlpNetwork(self.layer_sizes, self.theta.copy())

    @classmethod
    def from_arrays(cls, layer_sizes, weights, biases):
        net = cls(layer_sizes)
        for view, w in zip(net.weights, weights):
            view[:] = np.asarray(w, dtype=np.float64).reshape(view.shape)
        for view, b in zip(net.biases, biases):
            view[:] = np.asarray(b, dtype=np.float64).reshape(view.shape)
        return net


def glorot_init(layer_sizes, rng) -> MlpNetwork:
    """Uniform init on [-1/sqrt(fan_in), 1/sqrt(fan_in)]; zero biases."""
    net = MlpNetwork(layer_sizes)
    for w in net.weights:
        limit = 1.0 / np.sqrt(w.shape[1])
        w[:] = rng.uniform(-limit, limit, size=w.shape)
    return net


def mlp_forward(net: MlpNetwork, x):
    """Run the network on ``x`` (one vector, or a batch in rows).

    Returns ``(output, cache)`` where the cache holds every layer's
    activation (input first) for a later backward pass.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.layer_sizes[0]:
        raise ShapeError(
            f"input has {x.shape[-1]} features, network expects {net.layer_sizes[0]}")
    cache = [x]
    for w, b in zip(net.weights, net.biases):
        x = expit(x @ w.T + b)
        cache.append(x)
    return x, cache


def mlp_backward(net: MlpNetwork, cache, dout, lam=0.0, need_input_grad=True):
    """Reverse accumulation through the sigmoid/affine stack.

    ``dout`` is the gradient of the loss at the network output (same
    shape as ``cache[-1]``); batches are summed.  Returns ``(grad,
    dinput)``: the gradient of ``loss + lam * sum(W**2)`` as a flat
    vector aligned with ``net.theta`` (the decay term contributes
    ``2 * lam * W`` to each weight gradient and nothing to biases), and
    the loss gradient at the network input for chaining into an
    upstream network.  Pass ``need_input_grad=False`` to skip the first
    layer's input-gradient product (then ``dinput`` is None); the
    training loop does this for the encoder, whose input gradient is
    never consumed.
    """
    if len(cache) != net.n_layers + 1:
        raise ShapeError("cache does not match network depth")
    d = np.asarray(dout, dtype=np.float64)
    if d.shape != cache[-1].shape:
        raise ShapeError(f"dout shape {d.shape} != output shape {cache[-1].shape}")
    grad = np.zeros_like(net.theta)
    gw, gb = _layer_views(net.layer_sizes, grad)
    for l in range(net.n_layers - 1, -1, -1):
        a = cache[l + 1]
        dpre = d * (a * (1.0 - a))
        if dpre.ndim == 1:
            gw[l][:] = np.outer(dpre, cache[l])
            gb[l][:] = dpre
        else:
            gw[l][:] = dpre.T @ cache[l]
            gb[l][:] = dpre.sum(axis=0)
        if l == 0 and not need_input_grad:
            d = None
            break
        d = dpre @ net.weights[l]
    if lam != 0.0:
        for l, w in enumerate(net.weights):
            gw[l] += 2.0 * lam * w
    return grad, d


def weight_decay_penalty(*nets, lam):
    """lam * sum of squared weights over the given networks (biases excluded)."""
    return lam * float(sum((w * w).sum() for net in nets for w in net.weights))


def bce_loss(prediction, target):
    """Binary cross-entropy -[y*log(x) + (1-y)*log(1-x)].

    Accepts scalars or arrays elementwise.  Predictions must lie
    strictly inside (0, 1) (they are additionally clamped to
    ``[1e-12, 1 - 1e-12]`` against log underflow); targets may be any
    value in [0, 1].
    """
    x = np.asarray(prediction, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise ValueError("prediction must lie strictly inside (0, 1)")
    if np.any(y < 0.0) or np.any(y > 1.0):
        raise ValueError("target must lie in [0, 1]")
    x = np.clip(x, PREDICTION_CLAMP, 1.0 - PREDICTION_CLAMP)
    out = -(y * np.log(x) + (1.0 - y) * np.log1p(-x))
    return float(out) if out.ndim == 0 else out


def bce_grad(prediction, target):
    """d/dx of ``bce_loss`` at the (already clamped) prediction."""
    x = np.clip(np.asarray(prediction, dtype=np.float64),
                PREDICTION_CLAMP, 1.0 - PREDICTION_CLAMP)
    y = np.asarray(target, dtype=np.float64)
    return (1.0 - y) / (1.0 - x) - y / x


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter."""

    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    t: int = 0

    @classmethod
    def zeros(cls, params):
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params], t=0)


def adam_step(params, grads, state: AdamState, hyper: TrainHyper):
    """One bias-corrected Adam update over a list of parameter arrays.

    Returns ``(new_params, state)``; the state is advanced in place
    (t grows by one), the parameter arrays are fresh.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError("params, grads and state must have matching structure")
    for p, g, m in zip(params, grads, state.m):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeError(f"shape mismatch: {p.shape} vs {g.shape}")
    state.t += 1
    t = state.t
    c1 = 1.0 - hyper.beta1 ** t
    c2 = 1.0 - hyper.beta2 ** t
    new_params = []
    for k, (p, g) in enumerate(zip(params, grads)):
        state.m[k] = hyper.beta1 * state.m[k] + (1.0 - hyper.beta1) * g
        state.v[k] = hyper.beta2 * state.v[k] + (1.0 - hyper.beta2) * (g * g)
        step = (state.m[k] / c1) / (np.sqrt(state.v[k] / c2) + hyper.epsilon)
        new_params.append(p - hyper.eta * step)
    return new_params, state
