"""Benchmark suites: block-model sweeps, the Laplacian-deviation table, and
point-cloud accuracy runs.

Each suite samples fresh inputs per trial from the trial RNG, runs a
pipeline, and writes a CSV (plus a PNG figure unless disabled).  Workers
are module-level functions so the trial runner can distribute them across
processes.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import plotting
from .datagen import SbmSpec, sample_sbm, symmetric_sbm, three_circles, three_lines, three_moons, knn_affinity
from .io import write_csv
from .metrics import delta_l_spectral_norm, jaccard, matched_accuracy, sbm_snr
from .pipelines import SslcConfig, sslc_multi, sslc_single
from .runner import run_trials

__all__ = [
    "snr_column",
    "bench_delta_l_table",
    "bench_sbm_sweep",
    "bench_geometric",
    "TABLE_SIZES",
    "SWEEP_SIZES",
    "GEOMETRIC_SHAPES",
]

TABLE_SIZES = (100, 200, 400, 800)
SWEEP_SIZES = (200, 400, 600, 800, 1000)
GEOMETRIC_SHAPES = ("three_lines", "three_circles", "three_moons")
# probe budget for the point-cloud suite; accuracy saturates by ~10 probes
# (measured flat against 15 and 30) while trial cost grows linearly with it
GEOMETRIC_ITERS = 10
_SHAPE_MAKERS = {
    "three_lines": three_lines,
    "three_circles": three_circles,
    "three_moons": three_moons,
}


def _table_spec(n: int) -> SbmSpec:
    """Three near-equal communities on n nodes, p = 6 ln n/n, q = ln n/n."""
    third = n // 3
    sizes = (n - 2 * third, third, third)
    p, q = 6.0 * math.log(n) / n, math.log(n) / n
    probs = np.full((3, 3), q)
    np.fill_diagonal(probs, p)
    return SbmSpec(sizes=sizes, probs=probs)


def snr_column(ns=TABLE_SIZES, k: int = 3) -> list:
    """The deterministic SNR column of the deviation table."""
    return [sbm_snr(6.0 * math.log(n), math.log(n), k) for n in ns]


def _delta_l_trial(idx, rng, n):
    g, labels = sample_sbm(_table_spec(n), rng)
    return delta_l_spectral_norm(g, labels)


def _table_jaccard_trial(idx, rng, n, iters):
    g, labels = sample_sbm(_table_spec(n), rng)
    target = np.flatnonzero(labels == 0)
    seed = int(rng.choice(target))
    res = sslc_single(g, target.size, [seed], SslcConfig(iterations=iters), rng)
    return jaccard(res.cluster, target)


def bench_delta_l_table(trials: int, seed: int, threads: int = 1, output_prefix: str = "delta-l-table",
                        no_meta: bool = False, plot: bool = True, iters: int = 60,
                        config: dict | None = None) -> list:
    """Per graph size: SNR, mean/std deviation norm, mean/std seeded Jaccard."""
    rows = []
    for pos, n in enumerate(TABLE_SIZES):
        snr = sbm_snr(6.0 * math.log(n), math.log(n), 3)
        # distinct trial blocks per size, stable under changes to the size list
        base = seed + 100_000 * (pos + 1)
        norms = run_trials(_delta_l_trial, trials, base, threads, args=(n,))
        jacc = run_trials(_table_jaccard_trial, trials, base + 50_000, threads, args=(n, iters))
        rows.append({
            "n": n,
            "jaccard_mean": float(np.mean(jacc)),
            "jaccard_std": float(np.std(jacc)),
            "delta_l_mean": float(np.mean(norms)),
            "delta_l_std": float(np.std(norms)),
            "snr": round(snr, 2),
            "trials": trials,
        })
    header = ["n", "jaccard_mean", "jaccard_std", "delta_l_mean", "delta_l_std", "snr", "trials"]
    write_csv(f"{output_prefix}.csv", header, [[r[h] for h in header] for r in rows],
              config=config, no_meta=no_meta)
    if plot:
        plotting.delta_l_figure(rows, f"{output_prefix}.png")
    return rows


def _sweep_single_trial(idx, rng, n1, iters):
    g, labels = symmetric_sbm(n1, 3, rng)
    target = np.flatnonzero(labels == 0)
    seed = int(rng.choice(target))
    t0 = time.perf_counter()
    res = sslc_single(g, n1, [seed], SslcConfig(iterations=iters), rng)
    dt = time.perf_counter() - t0
    return jaccard(res.cluster, target), dt


def _sweep_multi_trial(idx, rng, n1, iters):
    g, labels = symmetric_sbm(n1, 3, rng)
    seeds = [[int(rng.choice(np.flatnonzero(labels == s)))] for s in range(3)]
    t0 = time.perf_counter()
    res = sslc_multi(g, [n1] * 3, seeds, SslcConfig(iterations=iters), rng)
    dt = time.perf_counter() - t0
    jacc = float(np.mean([
        jaccard(res.assignment.clusters[s], np.flatnonzero(labels == s)) for s in range(3)
    ]))
    return jacc, dt


_SWEEP_MODES = {"single": _sweep_single_trial, "multi": _sweep_multi_trial}


def bench_sbm_sweep(trials: int, seed: int, threads: int = 1, output_prefix: str = "sbm-sweep",
                    no_meta: bool = False, plot: bool = True, quick: bool = False,
                    iters: int | None = None, config: dict | None = None) -> list:
    """Jaccard and runtime against community size for both seeded pipelines.

    ``quick`` cuts the probe budget from 60 to 5 iterations; pass ``iters``
    to override either default.
    """
    if iters is None:
        iters = 5 if quick else 60
    rows = []
    for pos, n1 in enumerate(SWEEP_SIZES):
        for mode, worker in _SWEEP_MODES.items():
            base = seed + 100_000 * (pos + 1) + (500_000 if mode == "multi" else 0)
            out = run_trials(worker, trials, base, threads, args=(n1, iters))
            jacc = [o[0] for o in out]
            secs = [o[1] for o in out]
            rows.append({
                "n1": n1,
                "mode": mode,
                "jaccard_mean": float(np.mean(jacc)),
                "jaccard_std": float(np.std(jacc)),
                "seconds_mean": float(np.mean(secs)),
                "seconds_std": float(np.std(secs)),
                "log10_seconds": float(np.log10(max(np.mean(secs), 1e-12))),
                "iters": iters,
                "trials": trials,
            })
    header = ["n1", "mode", "jaccard_mean", "jaccard_std", "seconds_mean", "seconds_std",
              "log10_seconds", "iters", "trials"]
    write_csv(f"{output_prefix}.csv", header, [[r[h] for h in header] for r in rows],
              config=config, no_meta=no_meta)
    if plot:
        plotting.sweep_figure(rows, f"{output_prefix}.png")
    return rows


def _geometric_trial(idx, rng, shape, iters):
    t0 = time.perf_counter()
    f = _SHAPE_MAKERS[shape](rng)
    g = knn_affinity(f)
    labels = f.labels
    classes = np.unique(labels)
    sizes = [int(np.sum(labels == c)) for c in classes]
    seeds = [[int(rng.choice(np.flatnonzero(labels == c)))] for c in classes]
    res = sslc_multi(g, sizes, seeds, SslcConfig(iterations=iters), rng)
    dt = time.perf_counter() - t0
    acc, _ = matched_accuracy(res.assignment.clusters, labels)
    return 100.0 * acc, dt


def bench_geometric(trials: int, seed: int, threads: int = 1, output_prefix: str = "geometric",
                    no_meta: bool = False, plot: bool = True, iters: int = GEOMETRIC_ITERS,
                    shapes=GEOMETRIC_SHAPES, config: dict | None = None) -> list:
    """Mean/std accuracy for the three point-cloud shapes, one seed per class.

    Every trial repeats the whole experiment: a fresh point cloud, its
    affinity graph, one uniformly drawn labeled node per class, and the
    seeded multi-cluster run.  ``seconds_mean`` covers the full trial
    including the graph build.
    """
    rows = []
    for pos, shape in enumerate(shapes):
        if shape not in _SHAPE_MAKERS:
            raise ValueError(f"unknown shape {shape!r}")
        base = seed + 100_000 * (pos + 1)
        out = run_trials(_geometric_trial, trials, base, threads, args=(shape, iters))
        accs = [o[0] for o in out]
        secs = [o[1] for o in out]
        rows.append({
            "shape": shape,
            "accuracy_mean": float(np.mean(accs)),
            "accuracy_std": float(np.std(accs)),
            "seconds_mean": float(np.mean(secs)),
            "seconds_std": float(np.std(secs)),
            "iters": iters,
            "trials": trials,
        })
    header = ["shape", "accuracy_mean", "accuracy_std", "seconds_mean", "seconds_std", "iters", "trials"]
    write_csv(f"{output_prefix}.csv", header, [[r[h] for h in header] for r in rows],
              config=config, no_meta=no_meta)
    if plot:
        plotting.geometric_figure(rows, f"{output_prefix}.png")
    return rows
