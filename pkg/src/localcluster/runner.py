"""Parallel trial execution with per-trial deterministic RNG.

A trial worker is a picklable callable ``worker(trial_index, rng, *args)``.
The RNG for trial i is ``default_rng(base_seed ^ i)``, so results are
independent of the worker-pool size and schedule; aggregation preserves
trial order.
"""

from __future__ import annotations

import multiprocessing
import os

import numpy as np

__all__ = ["resolve_threads", "run_trials", "trial_rng"]

_ENV_THREADS = "LOCALCLUSTER_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Thread count: explicit argument, else LOCALCLUSTER_THREADS, else
    available parallelism."""
    if requested is not None:
        if requested < 1:
            raise ValueError(f"threads must be >= 1, got {requested}")
        return int(requested)
    env = os.environ.get(_ENV_THREADS)
    if env is not None:
        val = int(env)
        if val < 1:
            raise ValueError(f"{_ENV_THREADS} must be >= 1, got {env}")
        return val
    return os.cpu_count() or 1


def trial_rng(base_seed: int, trial_index: int) -> np.random.Generator:
    """Deterministic per-trial generator, seed XOR trial index."""
    return np.random.default_rng(int(base_seed) ^ int(trial_index))


def _limit_worker_blas():
    # workers parallelize across trials; keep BLAS single-threaded inside
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = "1"


def _invoke(payload):
    worker, base_seed, idx, args = payload
    return worker(idx, trial_rng(base_seed, idx), *args)


def run_trials(worker, trials: int, base_seed: int, threads: int = 1, args: tuple = ()) -> list:
    """Run ``worker`` for trial indices 0..trials-1 and return results in order.

    With ``threads`` > 1 the worker must be picklable (module level); shared
    inputs travel through ``args`` and must be treated as immutable.
    """
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    payloads = [(worker, base_seed, i, args) for i in range(trials)]
    if threads <= 1 or trials <= 1:
        return [_invoke(p) for p in payloads]
    with multiprocessing.Pool(processes=min(threads, trials), initializer=_limit_worker_blas) as pool:
        return pool.map(_invoke, payloads)
