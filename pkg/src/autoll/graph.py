"""Adjacency matrices, node orderings and the reordering-error metric.

A node ordering is a permutation array ``perm`` of ``{0, ..., n-1}``
read position-to-node: position ``i`` of the reordered layout holds
node ``perm[i]``.  All public node ids are 0-based inside the library;
the CLI converts to 1-based ids at the file boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError

SYMMETRY_TOL = 1e-12


@dataclass
class AdjacencyMatrix:
    """Dense square weight matrix plus its directedness.

    Undirected matrices must be symmetric to within 1e-12.
    """

    entries: np.ndarray
    directed: bool

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ShapeError(f"adjacency matrix must be square, got {self.entries.shape}")
        if not self.directed:
            skew = np.max(np.abs(self.entries - self.entries.T), initial=0.0)
            if skew > SYMMETRY_TOL:
                raise ShapeError(
                    f"undirected matrix is asymmetric (max |A - A^T| = {skew:.3g})")

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass
class ErrorReport:
    """Flip-minimized reordering error; ``used_flip`` marks which side won."""

    error: float
    used_flip: bool


def is_permutation(perm, n=None) -> bool:
    perm = np.asarray(perm)
    if n is not None and perm.shape != (n,):
        return False
    return perm.ndim == 1 and np.array_equal(np.sort(perm), np.arange(perm.size))


def _check_permutation(perm, n):
    perm = np.asarray(perm, dtype=np.intp)
    if not is_permutation(perm, n):
        raise ShapeError(f"not a permutation of 0..{n - 1}: {perm!r}")
    return perm


def invert_permutation(perm):
    """Inverse ordering: node -> position becomes position -> node."""
    perm = np.asarray(perm, dtype=np.intp)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return inv


def compose(outer, inner):
    """Composite ordering ``i -> outer[inner[i]]``."""
    outer = np.asarray(outer, dtype=np.intp)
    inner = np.asarray(inner, dtype=np.intp)
    if outer.shape != inner.shape:
        raise ShapeError("permutations must have equal length")
    return outer[inner]


def flip_order(perm):
    """Reversed ordering; always an equally valid layout."""
    return np.asarray(perm, dtype=np.intp)[::-1].copy()


def permute_matrix(matrix, perm):
    """Reorder rows and columns: ``out[i, j] = matrix[perm[i], perm[j]]``."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"expected a square matrix, got {matrix.shape}")
    perm = _check_permutation(perm, matrix.shape[0])
    return matrix[np.ix_(perm, perm)]


def graph_reordering_error(mean_matrix, order) -> ErrorReport:
    """MSE between the correctly ordered mean matrix and its reordering.

    Evaluates ``mean((B - B[p, p])**2)`` for the estimated ordering and
    for its flip, and reports the smaller of the two; a reversed layout
    is as correct as the original.  ``used_flip`` is True only when the
    flipped candidate is strictly better.
    """
    B = np.asarray(mean_matrix, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ShapeError(f"mean matrix must be square, got {B.shape}")
    order = _check_permutation(order, B.shape[0])
    direct = float(np.mean((B - permute_matrix(B, order)) ** 2))
    flipped = float(np.mean((B - permute_matrix(B, flip_order(order))) ** 2))
    if flipped < direct:
        return ErrorReport(error=flipped, used_flip=True)
    return ErrorReport(error=direct, used_flip=False)


def spearman_rank_correlation(order_a, order_b) -> float:
    """Spearman correlation between the node ranks of two orderings.

    Both arguments are position-to-node permutations; with no ties the
    closed form ``1 - 6*sum(d^2) / (n*(n^2-1))`` applies, where ``d`` is
    the per-node rank difference.
    """
    ra = invert_permutation(_check_permutation(order_a, len(order_a)))
    rb = invert_permutation(_check_permutation(order_b, len(order_b)))
    if ra.size != rb.size:
        raise ShapeError("orderings must have equal length")
    n = ra.size
    if n < 2:
        return 1.0
    d = ra.astype(np.float64) - rb.astype(np.float64)
    return 1.0 - 6.0 * float(d @ d) / (n * (n * n - 1.0))
