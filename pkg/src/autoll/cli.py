"""Command-line interface.

Subcommands:

* ``generate``  write a synthetic shuffled adjacency matrix as CSV
* ``reorder``   train the neural model on a matrix or edge list and
                emit ordering/feature CSVs, PGM heatmaps, PNG figures
                and a checkpoint
* ``baseline``  run one spectral method and emit ordering + heatmaps
* ``bench``     run a sweep described by a config file into a CSV

All randomness is controlled by ``--seed``; repeated runs with the same
arguments produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as aio
from .baselines import baseline_order_and_scores
from .bench import parse_sweep_config, run_benchmark, write_bench_csv
from .errors import AutollError
from .figures import save_heatmap_figure
from .graph import AdjacencyMatrix, permute_matrix
from .model import TrainConfig, fit_reorder, restart_score
from .rng import make_rng
from .synthetic import make_dataset, normalize_unit_interval


def _add_generate(sub):
    p = sub.add_parser("generate", help="write a synthetic adjacency matrix CSV")
    p.add_argument("--model", choices=["sbm", "dgm"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--outlier-p", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)


def cmd_generate(args):
    rng = make_rng(args.seed)
    adjacency, _ = make_dataset(args.model, args.n, args.sigma, args.directed,
                                rng, outlier_p=args.outlier_p)
    aio.save_matrix_csv(adjacency.entries, args.out)
    print(f"wrote {args.out} ({args.n}x{args.n}, "
          f"{'directed' if args.directed else 'undirected'})")


def _add_reorder(sub):
    p = sub.add_parser("reorder", help="train the neural model and reorder")
    p.add_argument("--input", required=True,
                   help="dense matrix .csv or whitespace edge list")
    p.add_argument("--variant", choices=["auto", "u", "d"], default="auto",
                   help="force undirected/directed treatment (default: infer)")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch", type=int, default=200)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--undersample-mult", type=int, default=None,
                   help="train on nonzero pairs plus MULT times as many zero pairs")
    p.add_argument("--scale", type=int, default=1, help="PGM pixel replication")
    p.add_argument("--no-figures", action="store_true",
                   help="skip the matplotlib PNG figures")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_reorder)


def _load_input(path, variant):
    """Returns (original AdjacencyMatrix, labels or None)."""
    directed = {"auto": None, "u": False, "d": True}[variant]
    if str(path).endswith(".csv"):
        return aio.load_matrix_csv(path, directed=directed), None
    # edge lists carry no symmetry to infer from; auto means undirected
    edges = aio.load_edge_list(path, directed=directed is True)
    return edges.to_adjacency(), edges.labels


def cmd_reorder(args):
    original, labels = _load_input(args.input, args.variant)
    normalized = AdjacencyMatrix(
        entries=normalize_unit_interval(original.entries),
        directed=original.directed)

    cfg = TrainConfig(epochs=args.epochs, batch_size=args.batch,
                      restarts=args.restarts, seed=args.seed)
    if args.undersample_mult is not None:
        # Zero-weight pairs are judged on the original weights, before
        # any rescaling.
        cfg.training_pairs = aio.undersample_training_pairs(
            original, make_rng(args.seed + 0x0FF5E7), multiplier=args.undersample_mult)

    result = fit_reorder(normalized, cfg)

    prefix = args.out_prefix
    aio.write_ordering_csv(f"{prefix}_ordering.csv", result.ordering, result.features)
    aio.write_features_csv(f"{prefix}_features.csv", result.features)
    aio.render_heatmap(result.reordered_observed, f"{prefix}_reordered.pgm",
                       scale=args.scale)
    aio.render_heatmap(result.reordered_reconstruction,
                       f"{prefix}_reconstruction.pgm", scale=args.scale)

    final_loss = restart_score(result.loss_history, cfg.last_window)
    aio.save_checkpoint(result.model, f"{prefix}_model.json", seed=args.seed,
                        final_loss=final_loss)
    if labels is not None:
        aio.write_labels_csv(f"{prefix}_labels.csv", labels)
    if not args.no_figures:
        save_heatmap_figure(result.reordered_observed, f"{prefix}_reordered.png",
                            title="reordered observed matrix")
        save_heatmap_figure(result.reordered_reconstruction,
                            f"{prefix}_reconstruction.png",
                            title="reordered reconstruction")
    print(f"wrote {prefix}_ordering.csv and companions "
          f"(final loss {final_loss:.5f})")


def _add_baseline(sub):
    p = sub.add_parser("baseline", help="run one spectral ordering method")
    p.add_argument("--method", choices=["svd-rank-one", "svd-angle", "mds"],
                   required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--variant", choices=["auto", "u", "d"], default="auto")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_baseline)


def cmd_baseline(args):
    original, labels = _load_input(args.input, args.variant)
    normalized = normalize_unit_interval(original.entries)
    order, scores = baseline_order_and_scores(args.method, normalized)
    prefix = args.out_prefix
    aio.write_ordering_csv(f"{prefix}_ordering.csv", order, scores)
    reordered = permute_matrix(normalized, order)
    aio.render_heatmap(reordered, f"{prefix}_reordered.pgm", scale=args.scale)
    if labels is not None:
        aio.write_labels_csv(f"{prefix}_labels.csv", labels)
    if not args.no_figures:
        save_heatmap_figure(reordered, f"{prefix}_reordered.png",
                            title=f"reordered observed matrix ({args.method})")
    print(f"wrote {prefix}_ordering.csv and companions")


def _add_bench(sub):
    p = sub.add_parser("bench", help="run a benchmark sweep from a config file")
    p.add_argument("--config", required=True, help="flat key = value sweep file")
    p.add_argument("--out", required=True, help="results CSV path")
    p.set_defaults(func=cmd_bench)


def cmd_bench(args):
    cfg = parse_sweep_config(args.config)
    rows = run_benchmark(cfg)
    write_bench_csv(rows, args.out)
    failed = sum(1 for r in rows if np.isnan(r.error))
    print(f"wrote {args.out} ({len(rows)} rows, {failed} failed)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="autoll",
        description="Seriation of one-mode adjacency matrices: neural "
                    "reordering plus spectral baselines.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_generate(sub)
    _add_reorder(sub)
    _add_baseline(sub)
    _add_bench(sub)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (AutollError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
