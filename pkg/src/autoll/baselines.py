"""Spectral baseline orderings: rank-one SVD, SVD angles, classical MDS.

All three reduce the matrix to a one-dimensional score per node and
sort it.  The shared primitive is a truncated SVD computed by power
iteration with deflation; exact dense decompositions are deliberately
avoided so the whole package stays on plain matrix products.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateFeaturesWarning, ShapeError
from .rng import make_rng

POWER_TOL = 1e-10
POWER_MAX_ITER = 10000

# Fixed stream for power-iteration start vectors: the SVD must be a
# pure function of its input.
_START_SEED = 0x5EED


@dataclass
class SvdTriplets:
    """Leading singular triplets, values in non-increasing order.

    Sign convention: the largest-magnitude entry of each left vector is
    made positive (the corresponding right vector is flipped with it).
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray   # (k, m) rows
    right_vectors: np.ndarray  # (k, n) rows


def _fallback_basis_vector(size, taken):
    """Deterministic unit vector orthogonal to the rows of ``taken``."""
    for k in range(size):
        e = np.zeros(size)
        e[k] = 1.0
        for row in taken:
            e -= (e @ row) * row
        norm = np.linalg.norm(e)
        if norm > 1e-8:
            return e / norm
    return np.zeros(size)


def top_singular_triplets(matrix, k=1, tol=POWER_TOL, max_iter=POWER_MAX_ITER) -> SvdTriplets:
    """Top-k singular triplets via power iteration on ``M^T M`` with deflation.

    Raises ``ConvergenceError`` (carrying the last iterate change) if a
    component fails to settle within ``max_iter`` sweeps.  Exactly-zero
    residual matrices get zero singular values with deterministic
    orthonormal filler vectors.
    """
    M = np.asarray(matrix, dtype=np.float64)
    if M.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {M.shape}")
    if not 1 <= k <= min(M.shape):
        raise ShapeError(f"k={k} out of range for shape {M.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = make_rng(_START_SEED)
    work = M.copy()
    values = np.empty(k)
    us = np.zeros((k, M.shape[0]))
    vs = np.zeros((k, M.shape[1]))
    scale = np.linalg.norm(M)
    for comp in range(k):
        v = rng.standard_normal(M.shape[1])
        v /= np.linalg.norm(v)
        B = work.T @ work
        if np.linalg.norm(B) <= (tol * max(scale, 1.0)) ** 2:
            # Residual is numerically zero: emit zero triplets.
            values[comp] = 0.0
            us[comp] = _fallback_basis_vector(M.shape[0], us[:comp])
            vs[comp] = _fallback_basis_vector(M.shape[1], vs[:comp])
            continue
        change = np.inf
        for _ in range(max_iter):
            v_new = B @ v
            norm = np.linalg.norm(v_new)
            if norm == 0.0:
                v_new = _fallback_basis_vector(M.shape[1], vs[:comp])
                norm = 1.0
            v_new = v_new / norm
            change = np.linalg.norm(v_new - v)
            v = v_new
            if change < tol:
                break
        else:
            raise ConvergenceError(
                f"power iteration did not converge for component {comp} "
                f"(last change {change:.3e})", residual=float(change))
        Mv = work @ v
        sigma = np.linalg.norm(Mv)
        if sigma <= tol * max(scale, 1.0):
            values[comp] = 0.0
            us[comp] = _fallback_basis_vector(M.shape[0], us[:comp])
            vs[comp] = v
            continue
        u = Mv / sigma
        if u[np.argmax(np.abs(u))] < 0:
            u, v = -u, -v
        values[comp], us[comp], vs[comp] = sigma, u, v
        work = work - sigma * np.outer(u, v)
    return SvdTriplets(singular_values=values, left_vectors=us, right_vectors=vs)


def _require_square(matrix):
    M = np.asarray(matrix, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got {M.shape}")
    return M


def svd_rank_one_order(matrix) -> np.ndarray:
    """Order nodes by the entries of the best rank-one factor.

    Fits ``A ~ r c^T`` through the leading singular triplet and sorts
    ``r = sqrt(s1) * u1`` ascending (stable ties).
    """
    return np.argsort(svd_rank_one_scores(matrix), kind="stable")


def svd_rank_one_scores(matrix) -> np.ndarray:
    M = _require_square(matrix)
    top = top_singular_triplets(M, k=1)
    return np.sqrt(top.singular_values[0]) * top.left_vectors[0]


@dataclass
class SvdAngleWorkspace:
    """Intermediate quantities of the angle-based ordering."""

    centered: np.ndarray       # rows minus their means
    normalized: np.ndarray     # rows scaled to unit root-mean-square
    angles: np.ndarray         # per-node angle in [-pi/2, 3*pi/2)
    base_order: np.ndarray     # nodes sorted by angle
    gaps: np.ndarray           # circular gaps between adjacent sorted angles
    split_index: int           # 0-based position of the largest gap
    order: np.ndarray          # final ordering (position -> node)


def angle_of(x: float, y: float) -> float:
    """Angle atan(y/x) + pi*[x <= 0], mapped into [-pi/2, 3*pi/2).

    Singular cases are pinned: atan(y/0) counts as +pi/2 for y > 0 and
    -pi/2 for y < 0 (the x <= 0 shift still applies, and the result
    wraps by 2*pi to stay inside the documented range); the origin maps
    to pi (a fully degenerate row).
    """
    if x == 0.0:
        if y == 0.0:
            return float(np.pi)
        a = np.pi / 2 if y > 0 else -np.pi / 2
    else:
        a = np.arctan(y / x)
    if x <= 0.0:
        a += np.pi
    if a >= 1.5 * np.pi:
        a -= 2 * np.pi
    return float(a)


def order_from_angles(angles) -> tuple[np.ndarray, np.ndarray, int, np.ndarray]:
    """Sort angles, split the circle at the largest gap, renumber.

    Returns ``(base_order, gaps, split_index, order)``.  ``gaps[0]`` is
    the wrap-around gap from the largest angle back to the smallest;
    the final order starts right after the largest gap.
    """
    angles = np.asarray(angles, dtype=np.float64)
    n = angles.size
    base = np.argsort(angles, kind="stable")
    a_sorted = angles[base]
    gaps = np.empty(n)
    gaps[0] = 2 * np.pi + a_sorted[0] - a_sorted[-1]
    gaps[1:] = np.diff(a_sorted)
    split = int(np.argmax(gaps))
    order = np.concatenate([base[split:], base[:split]])
    return base, gaps, split, order


def svd_angle_workspace(matrix) -> SvdAngleWorkspace:
    M = _require_square(matrix)
    n = M.shape[0]
    centered = M - M.mean(axis=1, keepdims=True)
    rms = np.sqrt(np.mean(centered ** 2, axis=1))
    dead = rms == 0.0
    if np.any(dead):
        warnings.warn(
            f"{int(dead.sum())} constant row(s) left as zero in the angle ordering",
            DegenerateFeaturesWarning, stacklevel=3)
    normalized = np.where(dead[:, None], 0.0, centered / np.where(dead, 1.0, rms)[:, None])
    top = top_singular_triplets(normalized, k=2)
    u1, u2 = top.left_vectors
    angles = np.array([angle_of(u1[i], u2[i]) for i in range(n)])
    base, gaps, split, order = order_from_angles(angles)
    return SvdAngleWorkspace(centered=centered, normalized=normalized,
                             angles=angles, base_order=base, gaps=gaps,
                             split_index=split, order=order)


def svd_angle_order(matrix) -> np.ndarray:
    """Order nodes by the angle between the top two left singular vectors.

    Rows are centered and scaled to unit root-mean-square first; the
    sorted angles are cut at the largest circular gap so the layout
    starts just past it.
    """
    return svd_angle_workspace(matrix).order


@dataclass
class MdsWorkspace:
    """Intermediate quantities of the classical-MDS ordering."""

    dist_sq: np.ndarray        # squared Euclidean distances between rows
    centered: np.ndarray       # double-centered Gram matrix
    eigenvalues: np.ndarray    # computed leading eigenvalues
    eigenvectors: np.ndarray   # matching eigenvectors (rows)
    order: np.ndarray


def mds_workspace(matrix) -> MdsWorkspace:
    M = _require_square(matrix)
    n = M.shape[0]
    # Row loop keeps memory at O(n^2) and the differences exact (the
    # expanded dot-product form would not survive a constant shift
    # bit-for-bit).
    dist_sq = np.empty((n, n))
    for i in range(n):
        d = M - M[i]
        dist_sq[i] = np.einsum("ij,ij->i", d, d)
    row_mean = dist_sq.mean(axis=1)
    grand = dist_sq.mean()
    gram = -0.5 * (dist_sq - row_mean[:, None] - row_mean[None, :] + grand)
    if np.linalg.norm(gram) <= 1e-14 * max(1.0, np.linalg.norm(M) ** 2):
        warnings.warn("all rows are identical; MDS order is arbitrary",
                      DegenerateFeaturesWarning, stacklevel=3)
        zeros = np.zeros(n)
        return MdsWorkspace(dist_sq=dist_sq, centered=gram,
                            eigenvalues=np.zeros(1), eigenvectors=zeros[None, :],
                            order=np.argsort(zeros, kind="stable"))
    # gram is positive semi-definite, so its top eigenpair (the most
    # positive eigenvalue) is exactly what power iteration delivers.
    top = top_singular_triplets(gram, k=1)
    coord = top.left_vectors[0]
    order = np.argsort(coord, kind="stable")
    return MdsWorkspace(dist_sq=dist_sq, centered=gram,
                        eigenvalues=top.singular_values[:1],
                        eigenvectors=top.left_vectors[:1], order=order)


def mds_order(matrix) -> np.ndarray:
    """Order nodes by the leading classical-MDS coordinate of the rows.

    Squared row distances are double-centered into a Gram matrix whose
    top eigenvector gives each node a coordinate on a line.
    """
    return mds_workspace(matrix).order


ORDER_FUNCS = {
    "svd-rank-one": svd_rank_one_order,
    "svd-angle": svd_angle_order,
    "mds": mds_order,
}


def baseline_order_and_scores(method: str, matrix):
    """Dispatch helper: ordering plus the 1-D score behind it."""
    if method == "svd-rank-one":
        scores = svd_rank_one_scores(matrix)
        return np.argsort(scores, kind="stable"), scores
    if method == "svd-angle":
        ws = svd_angle_workspace(matrix)
        return ws.order, ws.angles
    if method == "mds":
        ws = mds_workspace(matrix)
        return ws.order, ws.eigenvectors[0]
    raise ValueError(f"unknown baseline method {method!r}")
