"""Synthetic adjacency-matrix generators and their evaluation ground truth.

Two mean structures are supported:

* block model: entry means depend only on the cluster pair, with nodes
  assigned to K contiguous equal-size clusters;
* diagonal gradation: means decay linearly with (column - row), so the
  correctly ordered matrix shows a diagonal gradient.

The observation pipeline is fixed: draw Gaussian entries around the
mean structure, optionally zero entries at random (outliers), mirror
the upper triangle for the undirected case, rescale to [0, 1] using the
realized min/max, and hide the layout behind a random node shuffle.
The ground truth keeps the mean matrix pushed through the same stages
(same symmetrization, same affine rescale) plus the permutation that
undoes the shuffle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, ShapeError
from .graph import AdjacencyMatrix, graph_reordering_error, invert_permutation, compose, permute_matrix

# Block means of the reference 3-cluster setup.
DEFAULT_BLOCK_MEANS = np.array([
    [0.9, 0.1, 0.3],
    [0.4, 0.8, 0.2],
    [0.1, 0.3, 0.7],
])


@dataclass
class SbmParams:
    """Block-model parameters: K x K block means and the noise scale."""

    block_means: np.ndarray = field(default_factory=lambda: DEFAULT_BLOCK_MEANS.copy())
    sigma: float = 0.05

    def __post_init__(self):
        self.block_means = np.asarray(self.block_means, dtype=np.float64)
        if self.block_means.ndim != 2 or self.block_means.shape[0] != self.block_means.shape[1]:
            raise ConfigurationError("block_means must be a square matrix")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be >= 0")

    @property
    def n_clusters(self) -> int:
        return self.block_means.shape[0]


@dataclass
class DgmParams:
    """Diagonal-gradation parameters.

    Mean of entry (i, j) is ``high - span * (n - 1 - i + j) / (2n - 2)``
    with 1-based indices, i.e. 0.5 on the diagonal, ``high`` in the
    lower-left corner and ``high - span`` in the upper-right corner for
    the defaults (0.9, 0.8).
    """

    sigma: float = 0.05
    high: float = 0.9
    span: float = 0.8

    def __post_init__(self):
        if self.sigma < 0:
            raise ConfigurationError("sigma must be >= 0")


@dataclass
class GroundTruth:
    """What a perfect reordering should recover.

    ``mean_matrix`` holds the noiseless means in the correct layout,
    after the same symmetrization/rescaling the observation went
    through.  ``true_order`` applied to the shuffled observation (via
    ``permute_matrix``) restores the structured layout.
    """

    mean_matrix: np.ndarray
    true_order: np.ndarray

    def score_ordering(self, order):
        """Flip-minimized reordering error of an ordering of the shuffled matrix."""
        shuffle = invert_permutation(self.true_order)
        return graph_reordering_error(self.mean_matrix, compose(shuffle, order))


def sbm_assignments(n: int, n_clusters: int) -> np.ndarray:
    """Contiguous equal-size cluster labels (0-based)."""
    if n % n_clusters != 0:
        raise ConfigurationError(
            f"node count {n} is not divisible by cluster count {n_clusters}")
    return np.repeat(np.arange(n_clusters), n // n_clusters)


def sbm_mean_matrix(n: int, params: SbmParams) -> np.ndarray:
    c = sbm_assignments(n, params.n_clusters)
    return params.block_means[np.ix_(c, c)]


def dgm_mean_matrix(n: int, params: DgmParams | None = None) -> np.ndarray:
    if n < 2:
        raise ConfigurationError("gradation model needs n >= 2")
    params = params or DgmParams()
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    return params.high - params.span * (n - 1 - i + j) / (2 * n - 2)


def gen_sbm(n: int, params: SbmParams, rng) -> np.ndarray:
    """Independent Gaussian entries around the block means."""
    mean = sbm_mean_matrix(n, params)
    if params.sigma == 0:
        return mean.copy()
    return rng.normal(mean, params.sigma)


def gen_dgm(n: int, params: DgmParams, rng) -> np.ndarray:
    """Independent Gaussian entries around the gradation means."""
    mean = dgm_mean_matrix(n, params)
    if params.sigma == 0:
        return mean
    return rng.normal(mean, params.sigma)


def symmetrize_upper(matrix) -> np.ndarray:
    """Mirror the upper triangle below the diagonal."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"expected a square matrix, got {matrix.shape}")
    upper = np.triu(matrix)
    return upper + np.triu(matrix, 1).T


def normalize_unit_interval(matrix) -> np.ndarray:
    """Affine rescale so the minimum entry maps to 0 and the maximum to 1."""
    matrix = np.asarray(matrix, dtype=np.float64)
    lo, hi = float(matrix.min()), float(matrix.max())
    if not np.isfinite(lo) or not np.isfinite(hi):
        raise DegenerateInputError("matrix contains non-finite entries")
    if hi == lo:
        raise DegenerateInputError("constant matrix cannot be rescaled to [0, 1]")
    return (matrix - lo) / (hi - lo)


def inject_outliers(matrix, p: float, rng) -> np.ndarray:
    """Independently replace each entry by 0 with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"outlier probability must lie in [0, 1], got {p}")
    matrix = np.asarray(matrix, dtype=np.float64)
    if p == 0.0:
        return matrix.copy()
    return np.where(rng.random(matrix.shape) < p, 0.0, matrix)


def shuffle_nodes(matrix, rng) -> tuple[np.ndarray, np.ndarray]:
    """Hide the layout behind a uniform random node permutation.

    Returns ``(shuffled, true_order)`` where ``true_order`` is the
    inverse permutation: reordering the shuffled matrix by it restores
    the input exactly.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"expected a square matrix, got {matrix.shape}")
    tau = rng.permutation(matrix.shape[0])
    return permute_matrix(matrix, tau), invert_permutation(tau)


def make_dataset(generator: str, n: int, sigma: float, directed: bool, rng,
                 outlier_p: float = 0.0, block_means=None):
    """Full observation pipeline; returns ``(AdjacencyMatrix, GroundTruth)``.

    Stage order: generate, zero outliers, symmetrize (undirected only),
    rescale to [0, 1], shuffle.  The ground-truth mean matrix follows
    the deterministic stages, with the rescale constants taken from the
    realized noisy matrix so observation and truth share one scale.
    """
    if generator == "sbm":
        params = SbmParams(sigma=sigma) if block_means is None \
            else SbmParams(block_means=block_means, sigma=sigma)
        raw = gen_sbm(n, params, rng)
        mean = sbm_mean_matrix(n, params)
    elif generator == "dgm":
        params = DgmParams(sigma=sigma)
        raw = gen_dgm(n, params, rng)
        mean = dgm_mean_matrix(n, params)
    else:
        raise ConfigurationError(f"unknown generator {generator!r} (want 'sbm' or 'dgm')")

    if outlier_p:
        raw = inject_outliers(raw, outlier_p, rng)
    if not directed:
        raw = symmetrize_upper(raw)
        mean = symmetrize_upper(mean)
    lo, hi = float(raw.min()), float(raw.max())
    if hi == lo:
        raise DegenerateInputError("realized matrix is constant; cannot rescale")
    observed = (raw - lo) / (hi - lo)
    mean_scaled = (mean - lo) / (hi - lo)
    shuffled, true_order = shuffle_nodes(observed, rng)
    adjacency = AdjacencyMatrix(entries=shuffled, directed=directed)
    return adjacency, GroundTruth(mean_matrix=mean_scaled, true_order=true_order)
