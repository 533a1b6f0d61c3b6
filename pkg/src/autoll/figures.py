"""Matplotlib rendering of matrix heatmaps for the CLI report path.

Companion to the raw PGM output: same grayscale convention (1 -> black),
but with axes and a title, saved as PNG.  Figure metadata is pinned so
repeated runs produce identical bytes.
"""

from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FIG_DPI = 150
_PNG_METADATA = {"Software": "autoll"}


def save_heatmap_figure(matrix, path, title=None):
    """Render a [0, 1] matrix as a grayscale heatmap PNG."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size and (matrix.min() < 0.0 or matrix.max() > 1.0):
        raise ValueError("heatmap entries must lie in [0, 1]")
    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    ax.imshow(matrix, cmap="gray_r", vmin=0.0, vmax=1.0, interpolation="nearest")
    ax.set_xlabel("node position")
    ax.set_ylabel("node position")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI, metadata=_PNG_METADATA)
    plt.close(fig)
