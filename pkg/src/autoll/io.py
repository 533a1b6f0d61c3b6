"""File formats: matrix CSV, edge lists, checkpoints, PGM heatmaps.

Everything written here is byte-deterministic for a given input; floats
are serialized with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CheckpointError, ConfigurationError, ParseError
from .graph import SYMMETRY_TOL, AdjacencyMatrix
from .model import AutoLLModel
from .nn import MlpNetwork

CHECKPOINT_VERSION = 1


def _fmt(x: float) -> str:
    return repr(float(x))


def load_matrix_csv(path, directed: bool | None = None) -> AdjacencyMatrix:
    """Parse a dense numeric CSV into an adjacency matrix.

    Directedness is inferred (symmetric within 1e-12 means undirected)
    unless ``directed`` overrides it.  Ragged rows, non-numeric cells
    and non-square shapes raise ``ParseError`` with the 1-based line.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if rows and len(cells) != len(rows[0]):
                raise ParseError(
                    f"{path}: line {lineno} has {len(cells)} cells, "
                    f"expected {len(rows[0])}", line=lineno)
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}", line=lineno) from None
    if not rows:
        raise ParseError(f"{path}: empty matrix file", line=1)
    matrix = np.array(rows, dtype=np.float64)
    if matrix.shape[0] != matrix.shape[1]:
        raise ParseError(
            f"{path}: matrix is {matrix.shape[0]}x{matrix.shape[1]}, must be square",
            line=len(rows))
    if directed is None:
        directed = bool(np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOL)
    return AdjacencyMatrix(entries=matrix, directed=directed)


def save_matrix_csv(matrix, path):
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


@dataclass
class EdgeList:
    """Weighted edges over a dense 0-based node range.

    ``labels[k]`` is the original label of internal node k; labels are
    sorted numerically when every label parses as an integer, else
    lexicographically.
    """

    weights: np.ndarray
    directed: bool
    labels: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def to_adjacency(self) -> AdjacencyMatrix:
        return AdjacencyMatrix(entries=self.weights.copy(), directed=self.directed)


def load_edge_list(path, directed: bool) -> EdgeList:
    """Parse whitespace-separated ``src dst [weight]`` lines.

    A missing weight counts as 1; duplicate edges sum; undirected input
    is mirrored (self-loops counted once).  Lines starting with ``#``
    are comments.  Negative or non-finite weights raise ``ParseError``.
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(
                    f"{path}: line {lineno}: expected 'src dst [weight]', "
                    f"got {len(parts)} fields", line=lineno)
            src, dst = parts[0], parts[1]
            if len(parts) == 3:
                try:
                    weight = float(parts[2])
                except ValueError:
                    raise ParseError(
                        f"{path}: line {lineno}: bad weight {parts[2]!r}",
                        line=lineno) from None
            else:
                weight = 1.0
            if not np.isfinite(weight) or weight < 0:
                raise ParseError(
                    f"{path}: line {lineno}: weight must be finite and >= 0",
                    line=lineno)
            records.append((src, dst, weight))
    if not records:
        raise ParseError(f"{path}: no edges found", line=1)

    seen = {label for rec in records for label in rec[:2]}
    try:
        labels = sorted(seen, key=int)
    except ValueError:
        labels = sorted(seen)
    index = {label: k for k, label in enumerate(labels)}
    n = len(labels)
    weights = np.zeros((n, n))
    for src, dst, weight in records:
        i, j = index[src], index[dst]
        weights[i, j] += weight
        if not directed and i != j:
            weights[j, i] += weight
    return EdgeList(weights=weights, directed=directed, labels=list(labels))


def undersample_training_pairs(adjacency: AdjacencyMatrix, rng,
                               multiplier: int = 8) -> np.ndarray:
    """Training pool for sparse matrices: all non-zero pairs plus a
    without-replacement sample of ``multiplier`` times as many
    zero-weight pairs.

    Zero-weight means exactly 0 in the given matrix, so pass the
    original weights (not a rescaled copy) when the two differ.  If
    fewer zero pairs exist than requested, all of them are used and a
    warning is emitted.
    """
    if multiplier < 1:
        raise ConfigurationError("multiplier must be >= 1")
    entries = adjacency.entries
    n = adjacency.n
    flat_nonzero = np.flatnonzero(entries.ravel())
    flat_zero = np.flatnonzero(entries.ravel() == 0.0)
    want = multiplier * flat_nonzero.size
    if flat_zero.size < want:
        warnings.warn(
            f"only {flat_zero.size} zero-weight pairs available, "
            f"wanted {want}; using all of them", stacklevel=2)
        chosen = flat_zero
    else:
        chosen = rng.choice(flat_zero, size=want, replace=False)
    flat = np.concatenate([flat_nonzero, np.sort(chosen)])
    return np.column_stack([flat // n, flat % n]).astype(np.intp)


def _model_to_dict(model: AutoLLModel, seed=None, final_loss=None) -> dict:
    def net_dict(net):
        return {
            "layer_sizes": list(net.layer_sizes),
            "weights": [w.ravel().tolist() for w in net.weights],
            "biases": [b.tolist() for b in net.biases],
        }
    return {
        "format_version": CHECKPOINT_VERSION,
        "variant": model.variant,
        "encoder": net_dict(model.encoder),
        "decoder": net_dict(model.decoder),
        "seed": None if seed is None else int(seed),
        "final_loss": None if final_loss is None else float(final_loss),
    }


def save_checkpoint(model: AutoLLModel, path, seed=None, final_loss=None):
    """Write the model as JSON; floats round-trip bit-exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_model_to_dict(model, seed=seed, final_loss=final_loss), fh)
        fh.write("\n")


def load_checkpoint(path) -> AutoLLModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            blob = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: corrupt checkpoint: {exc}") from None
    version = blob.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint version {version!r}, this build reads "
            f"version {CHECKPOINT_VERSION}")
    try:
        def net_from(d):
            sizes = d["layer_sizes"]
            return MlpNetwork.from_arrays(sizes, d["weights"], d["biases"])
        return AutoLLModel(variant=blob["variant"],
                           encoder=net_from(blob["encoder"]),
                           decoder=net_from(blob["decoder"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"{path}: corrupt checkpoint: {exc}") from None


def render_heatmap(matrix, path, scale: int = 1):
    """Write a binary PGM (P5) grayscale image of a [0, 1] matrix.

    Pixel value is ``round(255 * (1 - value))`` with halves rounding
    up, so 1 maps to black and 0 to white; rows run top to bottom.
    ``scale`` replicates each entry into a scale x scale pixel block.
    The output bytes are a pure function of the inputs.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {matrix.shape}")
    if matrix.size and (matrix.min() < 0.0 or matrix.max() > 1.0):
        raise ValueError("heatmap entries must lie in [0, 1]")
    if scale < 1:
        raise ValueError("scale must be >= 1")
    gray = np.floor(255.0 * (1.0 - matrix) + 0.5).astype(np.uint8)
    if scale > 1:
        gray = np.repeat(np.repeat(gray, scale, axis=0), scale, axis=1)
    header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(gray.tobytes())


def write_ordering_csv(path, ordering, features):
    """Rows ``position,node_id,feature_z`` (both ids 1-based)."""
    features = np.asarray(features)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("position,node_id,feature_z\n")
        for pos, node in enumerate(np.asarray(ordering)):
            fh.write(f"{pos + 1},{int(node) + 1},{_fmt(features[node])}\n")


def write_features_csv(path, features):
    """Rows ``node_id,feature_z`` in original index order (ids 1-based)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_id,feature_z\n")
        for node, value in enumerate(np.asarray(features)):
            fh.write(f"{node + 1},{_fmt(value)}\n")


def write_labels_csv(path, labels):
    """Sidecar map from internal 1-based node ids to original labels."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_id,label\n")
        for node, label in enumerate(labels):
            fh.write(f"{node + 1},{label}\n")
