"""Autoencoder-style node reordering for one-mode adjacency matrices.

A single shared encoder maps each node's connectivity pattern to a
scalar feature, and a two-input decoder reconstructs entry ``A[i, j]``
from the feature pair.  Training minimizes the mini-batch mean binary
cross-entropy between reconstruction and entry plus an L2 weight
penalty; the learned features then order the nodes by a plain sort.

Undirected variant: the encoder input of node i is row i (== column i).
Directed variant: row i and column i concatenated, so the feature sees
both fan-out and fan-in.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateFeaturesWarning, ShapeError
from .graph import AdjacencyMatrix, permute_matrix
from .nn import (AdamState, MlpNetwork, TrainHyper, adam_step, bce_grad,
                 glorot_init, mlp_backward, mlp_forward,
                 weight_decay_penalty, PREDICTION_CLAMP)
from .rng import split_streams

UNDIRECTED = "undirected"
DIRECTED = "directed"

# Features closer together than this carry no ordering signal.
FEATURE_COLLAPSE_TOL = 1e-9


def variant_for(adjacency: AdjacencyMatrix) -> str:
    return DIRECTED if adjacency.directed else UNDIRECTED


def node_input(adjacency: AdjacencyMatrix, i: int) -> np.ndarray:
    """Encoder input of node ``i`` (0-based).

    Undirected: row i of the matrix.  Directed: row i followed by
    column i, length 2n.
    """
    n = adjacency.n
    if not 0 <= i < n:
        raise IndexError(f"node index {i} out of range for n={n}")
    if adjacency.directed:
        return np.concatenate([adjacency.entries[i, :], adjacency.entries[:, i]])
    return adjacency.entries[i, :].copy()


def build_inputs(adjacency: AdjacencyMatrix) -> np.ndarray:
    """All node inputs stacked as rows: shape (n, n) or (n, 2n)."""
    if adjacency.directed:
        return np.hstack([adjacency.entries, adjacency.entries.T])
    return adjacency.entries.copy()


@dataclass
class AutoLLModel:
    """Shared encoder plus pair decoder for one graph size/variant."""

    variant: str
    encoder: MlpNetwork
    decoder: MlpNetwork

    def __post_init__(self):
        if self.variant not in (UNDIRECTED, DIRECTED):
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        if self.encoder.layer_sizes[-1] != 1 or self.decoder.layer_sizes[-1] != 1:
            raise ConfigurationError("encoder and decoder must end in one unit")
        if self.decoder.layer_sizes[0] != 2:
            raise ConfigurationError("decoder takes exactly two features")

    @property
    def n(self) -> int:
        """Graph size the model was built for."""
        d = self.encoder.layer_sizes[0]
        return d // 2 if self.variant == DIRECTED else d

    def check_compatible(self, adjacency: AdjacencyMatrix):
        if variant_for(adjacency) != self.variant or adjacency.n != self.n:
            raise ShapeError(
                f"model is {self.variant}/n={self.n}, matrix is "
                f"{variant_for(adjacency)}/n={adjacency.n}")


@dataclass
class TrainConfig:
    """Training settings; defaults follow the reference setup.

    ``encoder_sizes=None`` means the default [d, 10, 1] where d is the
    node-input width.  ``training_pairs=None`` trains on all n^2 index
    pairs (diagonal included); an explicit (P, 2) array restricts the
    pool (for undersampled sparse data).  Total iteration count is
    ``ceil(epochs * P / batch_size)``.
    """

    epochs: int = 200
    batch_size: int = 200
    encoder_sizes: tuple | None = None
    decoder_sizes: tuple = (2, 10, 1)
    restarts: int = 10
    last_window: int = 100
    hyper: TrainHyper = field(default_factory=TrainHyper)
    seed: int = 0
    training_pairs: np.ndarray | None = None

    def validate(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be positive")
        if self.restarts < 1 or self.last_window < 1:
            raise ConfigurationError("restarts and last_window must be positive")
        self.hyper.validate()
        if self.training_pairs is not None and len(self.training_pairs) == 0:
            raise ConfigurationError("training pair set is empty")


def iteration_count(cfg: TrainConfig, n: int) -> int:
    """ceil(epochs * P / batch_size) with P the training-pair count."""
    pool = n * n if cfg.training_pairs is None else len(cfg.training_pairs)
    return math.ceil(cfg.epochs * pool / cfg.batch_size)


def _check_normalized(adjacency: AdjacencyMatrix):
    e = adjacency.entries
    if e.size and (e.min() < 0.0 or e.max() > 1.0):
        raise ValueError("adjacency entries must lie in [0, 1]; rescale first")


def _batch_terms(encoder, decoder, inputs, targets, ii, jj, lam, stacked_buf=None):
    """Loss and flat gradients of the mean BCE + L2 penalty on one batch.

    Both encoder applications run in a single stacked forward pass, so
    the backward pass naturally accumulates the i-side and j-side
    gradients into the same shared parameters.  ``stacked_buf`` lets
    the training loop reuse one (2b, width) gather buffer instead of
    reallocating it every iteration.
    """
    b = len(ii)
    if stacked_buf is None:
        stacked = np.concatenate([inputs[ii], inputs[jj]], axis=0)
    else:
        stacked = stacked_buf
        np.take(inputs, ii, axis=0, out=stacked[:b])
        np.take(inputs, jj, axis=0, out=stacked[b:])
    z, enc_cache = mlp_forward(encoder, stacked)
    dec_in = np.concatenate([z[:b], z[b:]], axis=1)
    pred, dec_cache = mlp_forward(decoder, dec_in)
    x = np.clip(pred[:, 0], PREDICTION_CLAMP, 1.0 - PREDICTION_CLAMP)
    data_loss = float(np.mean(-(targets * np.log(x)
                                + (1.0 - targets) * np.log1p(-x))))
    loss = data_loss + weight_decay_penalty(encoder, decoder, lam=lam)
    dx = bce_grad(x, targets) / b
    dec_grad, d_dec_in = mlp_backward(decoder, dec_cache, dx[:, None], lam)
    dz = np.concatenate([d_dec_in[:, :1], d_dec_in[:, 1:2]], axis=0)
    enc_grad, _ = mlp_backward(encoder, enc_cache, dz, lam, need_input_grad=False)
    return loss, enc_grad, dec_grad


def pair_loss(model: AutoLLModel, adjacency: AdjacencyMatrix, i: int, j: int,
              lam: float = 0.0):
    """Reconstruction loss of one entry plus the full L2 penalty.

    Returns ``(loss, (encoder_grad, decoder_grad))`` with flat gradient
    vectors aligned with the networks' parameter vectors.
    """
    model.check_compatible(adjacency)
    _check_normalized(adjacency)
    inputs = np.stack([node_input(adjacency, i), node_input(adjacency, j)])
    target = np.array([adjacency.entries[i, j]])
    loss, enc_grad, dec_grad = _batch_terms(
        model.encoder, model.decoder, inputs, target,
        np.array([0]), np.array([1]), lam)
    return loss, (enc_grad, dec_grad)


def train(adjacency: AdjacencyMatrix, cfg: TrainConfig, seed=None):
    """Train one model; returns ``(model, loss_history)``.

    Each iteration draws ``batch_size`` pairs uniformly with
    replacement from the training pool, takes one Adam step on the
    mean-BCE + L2 objective, and records the pre-step loss.  The seed
    (default ``cfg.seed``) is split into independent initialization and
    mini-batch streams.
    """
    cfg.validate()
    _check_normalized(adjacency)
    n = adjacency.n
    inputs = build_inputs(adjacency)
    width = inputs.shape[1]
    enc_sizes = tuple(cfg.encoder_sizes) if cfg.encoder_sizes else (width, 10, 1)
    if enc_sizes[0] != width:
        raise ConfigurationError(
            f"encoder input must be {width} wide for this matrix, got {enc_sizes[0]}")
    dec_sizes = tuple(cfg.decoder_sizes)

    if cfg.training_pairs is None:
        pairs = None
        pool = n * n
    else:
        pairs = np.asarray(cfg.training_pairs, dtype=np.intp)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ConfigurationError("training_pairs must be an array of (i, j) rows")
        pool = len(pairs)

    init_rng, batch_rng = split_streams(cfg.seed if seed is None else seed, 2)
    encoder = glorot_init(enc_sizes, init_rng)
    decoder = glorot_init(dec_sizes, init_rng)
    state = AdamState.zeros([encoder.theta, decoder.theta])
    entries = adjacency.entries
    lam = cfg.hyper.lam
    iters = iteration_count(cfg, n)
    history = np.empty(iters)
    stacked_buf = np.empty((2 * cfg.batch_size, width))
    for step in range(iters):
        draw = batch_rng.integers(0, pool, size=cfg.batch_size)
        if pairs is None:
            ii, jj = draw // n, draw % n
        else:
            ii, jj = pairs[draw, 0], pairs[draw, 1]
        loss, enc_grad, dec_grad = _batch_terms(
            encoder, decoder, inputs, entries[ii, jj], ii, jj, lam,
            stacked_buf=stacked_buf)
        history[step] = loss
        (new_enc, new_dec), state = adam_step(
            [encoder.theta, decoder.theta], [enc_grad, dec_grad], state, cfg.hyper)
        encoder.theta[:] = new_enc
        decoder.theta[:] = new_dec
    model = AutoLLModel(variant=variant_for(adjacency), encoder=encoder,
                        decoder=decoder)
    return model, history


def restart_score(history, last_window: int) -> float:
    """Selection score of one run: mean loss over the final window."""
    window = min(last_window, len(history))
    return float(np.mean(history[-window:]))


def select_best(histories, last_window: int) -> int:
    """Index of the restart with the lowest selection score (first wins ties)."""
    return int(np.argmin([restart_score(h, last_window) for h in histories]))


def train_with_restarts(adjacency: AdjacencyMatrix, cfg: TrainConfig, base_seed=None):
    """Train ``cfg.restarts`` independent models and keep the best.

    Restart r uses seed ``base_seed + r`` (default base ``cfg.seed``).
    Returns ``(best_model, histories)`` where the winner minimizes the
    mean training loss over its final ``cfg.last_window`` iterations.
    """
    cfg.validate()
    base = cfg.seed if base_seed is None else base_seed
    histories = []
    models = []
    for r in range(cfg.restarts):
        model, history = train(adjacency, cfg, seed=base + r)
        models.append(model)
        histories.append(history)
    best = select_best(histories, cfg.last_window)
    return models[best], histories


def extract_features(model: AutoLLModel, adjacency: AdjacencyMatrix) -> np.ndarray:
    """Scalar feature of every node under the trained encoder."""
    model.check_compatible(adjacency)
    z, _ = mlp_forward(model.encoder, build_inputs(adjacency))
    return z[:, 0]


def order_from_features(features) -> np.ndarray:
    """Ascending stable sort of the features (ties keep index order)."""
    z = np.asarray(features, dtype=np.float64)
    if np.any(np.isnan(z)):
        raise ValueError("features contain NaN")
    return np.argsort(z, kind="stable")


def reconstruct(model: AutoLLModel, features) -> np.ndarray:
    """Decoder output for every feature pair: the denoised matrix."""
    z = np.asarray(features, dtype=np.float64)
    n = z.size
    dec_in = np.column_stack([np.repeat(z, n), np.tile(z, n)])
    pred, _ = mlp_forward(model.decoder, dec_in)
    return pred[:, 0].reshape(n, n)


@dataclass
class ReorderResult:
    """Everything the reordering produces for one matrix."""

    ordering: np.ndarray                  # position -> node
    features: np.ndarray                  # per-node feature, original index order
    features_sorted: np.ndarray           # non-decreasing
    reordered_observed: np.ndarray
    reordered_reconstruction: np.ndarray
    loss_history: np.ndarray | None = None
    model: AutoLLModel | None = None


def reorder(adjacency: AdjacencyMatrix, model: AutoLLModel,
            loss_history=None) -> ReorderResult:
    """Sort nodes by feature and reorder observation and reconstruction."""
    z = extract_features(model, adjacency)
    if float(z.max() - z.min()) < FEATURE_COLLAPSE_TOL:
        warnings.warn("encoder features collapsed; ordering is arbitrary",
                      DegenerateFeaturesWarning, stacklevel=2)
    order = order_from_features(z)
    return ReorderResult(
        ordering=order,
        features=z,
        features_sorted=z[order],
        reordered_observed=permute_matrix(adjacency.entries, order),
        reordered_reconstruction=permute_matrix(reconstruct(model, z), order),
        loss_history=None if loss_history is None else np.asarray(loss_history),
        model=model,
    )


def fit_reorder(adjacency: AdjacencyMatrix, cfg: TrainConfig,
                base_seed=None) -> ReorderResult:
    """Restarted training plus reordering in one call."""
    model, histories = train_with_restarts(adjacency, cfg, base_seed=base_seed)
    best = select_best(histories, cfg.last_window)
    return reorder(adjacency, model, loss_history=histories[best])
