"""Benchmark driver: sweep noise or outlier levels, score every method.

A sweep is described by a flat ``key = value`` text file.  For each
noise index t the driver generates ``trials`` fresh matrices, runs
every requested method on the same matrix, and scores the orderings
with the flip-minimized reordering error against the generator truth.

Noise sweeps use sigma = 0.03 t; outlier sweeps fix sigma = 0.03 and
zero each entry with probability 0.01 t.  Per-trial randomness is
derived from (seed, t, trial), so results do not depend on which
methods run together; rows come out sorted by (method, t, trial).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .baselines import ORDER_FUNCS
from .errors import ConfigurationError
from .model import TrainConfig, extract_features, order_from_features, train_with_restarts
from .rng import derived_seed, make_rng
from .synthetic import make_dataset

METHODS = ("autoll", "svd-rank-one", "svd-angle", "mds")
SIGMA_STEP = 0.03
OUTLIER_STEP = 0.01
CSV_HEADER = "method,t,trial,error,seconds"


@dataclass
class SweepConfig:
    methods: tuple = METHODS
    generator: str = "dgm"
    directed: bool = False
    n: int = 60
    t_min: int = 1
    t_max: int = 10
    trials: int = 10
    seed: int = 0
    restarts: int = 10
    epochs: int = 200
    batch: int = 200
    sweep: str = "noise"

    def validate(self):
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigurationError(
                f"unknown method(s) {unknown}; choose from {list(METHODS)}")
        if not self.methods:
            raise ConfigurationError("no methods requested")
        if self.generator not in ("dgm", "sbm"):
            raise ConfigurationError(f"unknown generator {self.generator!r}")
        if self.sweep not in ("noise", "outlier"):
            raise ConfigurationError(f"unknown sweep kind {self.sweep!r}")
        if self.t_min < 1 or self.t_max < self.t_min:
            raise ConfigurationError("need 1 <= t_min <= t_max")
        if self.n < 2 or self.trials < 1:
            raise ConfigurationError("need n >= 2 and trials >= 1")

    def level(self, t: int) -> tuple[float, float]:
        """(sigma, outlier probability) at noise index t."""
        if self.sweep == "noise":
            return SIGMA_STEP * t, 0.0
        return SIGMA_STEP, OUTLIER_STEP * t


_BOOL_WORDS = {"true": True, "1": True, "yes": True,
               "false": False, "0": False, "no": False}

_INT_KEYS = ("n", "t_min", "t_max", "trials", "seed", "restarts", "epochs", "batch")


def parse_sweep_config(path) -> SweepConfig:
    """Read a flat ``key = value`` sweep file (# starts a comment)."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}: line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in values:
                raise ConfigurationError(f"{path}: line {lineno}: duplicate key {key!r}")
            values[key] = value

    cfg = SweepConfig()
    for key, value in values.items():
        if key == "methods":
            cfg.methods = tuple(m.strip() for m in value.split(",") if m.strip())
        elif key in ("generator", "sweep"):
            setattr(cfg, key, value.lower())
        elif key == "directed":
            if value.lower() not in _BOOL_WORDS:
                raise ConfigurationError(f"{path}: bad boolean {value!r} for 'directed'")
            cfg.directed = _BOOL_WORDS[value.lower()]
        elif key in _INT_KEYS:
            try:
                setattr(cfg, key, int(value))
            except ValueError:
                raise ConfigurationError(
                    f"{path}: key {key!r} needs an integer, got {value!r}") from None
        else:
            raise ConfigurationError(f"{path}: unknown key {key!r}")
    cfg.validate()
    return cfg


@dataclass
class BenchRow:
    method: str
    t: int
    trial: int
    error: float
    seconds: float


def _run_method(method: str, adjacency, cfg: SweepConfig, t: int, trial: int):
    if method == "autoll":
        train_cfg = TrainConfig(epochs=cfg.epochs, batch_size=cfg.batch,
                                restarts=cfg.restarts)
        base = derived_seed(cfg.seed, t, trial, 1 + METHODS.index(method))
        model, _ = train_with_restarts(adjacency, train_cfg, base_seed=base)
        return order_from_features(extract_features(model, adjacency))
    return ORDER_FUNCS[method](adjacency.entries)


def run_benchmark(cfg: SweepConfig) -> list[BenchRow]:
    """Execute the sweep; failed method runs score ``nan`` and the
    sweep continues."""
    cfg.validate()
    rows = []
    for t in range(cfg.t_min, cfg.t_max + 1):
        sigma, outlier_p = cfg.level(t)
        for trial in range(cfg.trials):
            rng = make_rng(derived_seed(cfg.seed, t, trial))
            adjacency, truth = make_dataset(
                cfg.generator, cfg.n, sigma, cfg.directed, rng, outlier_p=outlier_p)
            for method in cfg.methods:
                start = time.perf_counter()
                try:
                    order = _run_method(method, adjacency, cfg, t, trial)
                    error = truth.score_ordering(order).error
                except Exception:  # sweep must survive individual failures
                    error = float("nan")
                seconds = time.perf_counter() - start
                rows.append(BenchRow(method=method, t=t, trial=trial,
                                     error=error, seconds=seconds))
    rows.sort(key=lambda r: (r.method, r.t, r.trial))
    return rows


def write_bench_csv(rows, path):
    """CSV with header ``method,t,trial,error,seconds``.

    Wall time is reported at 0.1 s resolution; everything else in a row
    is seed-determined, which keeps repeated runs byte-identical.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(f"{r.method},{r.t},{r.trial},{repr(float(r.error))},"
                     f"{r.seconds:.1f}\n")


def mean_errors(rows) -> dict:
    """Mean error per (method, t), ignoring failed trials."""
    acc: dict = {}
    for r in rows:
        if not np.isnan(r.error):
            acc.setdefault((r.method, r.t), []).append(r.error)
    return {key: float(np.mean(vals)) for key, vals in acc.items()}
