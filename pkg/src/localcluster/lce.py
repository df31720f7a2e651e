"""Seeded local cluster extraction.

Pipeline for one cluster: diffuse degree-weighted mass from the seeds with
the column-stochastic walk operator, keep the (1 + epsilon) * n_hat nodes
holding the most mass as the candidate set, peel off the fraction of
candidates least coupled to the candidate boundary, then recover the
cluster indicator as the sparsest approximate solution of a Laplacian
least-squares system and threshold it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, LaplacianView, as_node_array, transition_matrix_apply
from .recovery import SensingProblem, subspace_pursuit

__all__ = [
    "LceParams",
    "LceOutput",
    "diffuse",
    "candidate_set",
    "removal_set",
    "lce",
]

# guard against floor((1+eps)*k) landing one below an exact integer product
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class LceParams:
    """Tuning knobs for one extraction.

    walk_depth : diffusion steps t >= 0
    epsilon    : candidate inflation over the size estimate, in (0, 1)
    gamma      : fraction of candidates removed as near-certain members, in [0.1, 0.5]
    rejection  : threshold on the recovered indicator, in [0.1, 0.9]
    """

    walk_depth: int = 3
    epsilon: float = 0.8
    gamma: float = 0.2
    rejection: float = 0.1

    def __post_init__(self):
        if self.walk_depth < 0:
            raise ValueError(f"walk_depth must be >= 0, got {self.walk_depth}")
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not (0.1 <= self.gamma <= 0.5):
            raise ValueError(f"gamma must lie in [0.1, 0.5], got {self.gamma}")
        if not (0.1 <= self.rejection <= 0.9):
            raise ValueError(f"rejection must lie in [0.1, 0.9], got {self.rejection}")


@dataclass
class LceOutput:
    """Result of one extraction on a fixed graph."""

    cluster: np.ndarray
    removed: np.ndarray
    candidates: np.ndarray
    x: np.ndarray
    residual_norm: float
    iterations: int
    degenerate: bool = field(default=False)


def diffuse(g: Graph, seeds, t: int) -> np.ndarray:
    """t steps of the walk operator applied to degree mass on the seeds.

    Start vector is D @ 1_seeds, so total mass equals the seed degree sum
    and is conserved on components free of degree-zero nodes.
    """
    seeds = as_node_array(seeds, g.n)
    if seeds.size == 0:
        raise ValueError("need at least one seed")
    if not np.all(g.active[seeds]):
        raise ValueError("seed is not an active node")
    if t < 0:
        raise ValueError(f"diffusion depth must be >= 0, got {t}")
    v = np.zeros(g.n)
    v[seeds] = g.degrees[seeds]
    for _ in range(t):
        v = transition_matrix_apply(g, v)
    return v


def candidate_set(values: np.ndarray, n_hat: int, epsilon: float) -> np.ndarray:
    """Indices of the floor((1 + epsilon) * n_hat) largest |values|.

    Capped at len(values); ties broken by ascending index.  The returned
    array is sorted by index.  Entries equal to zero never qualify (apart
    from a floor of one index): a node the walk never reached carries no
    membership evidence, and padding the set with such nodes would hand
    the removal-set stage arbitrary deep nodes of foreign clusters.
    """
    values = np.asarray(values)
    if n_hat < 1:
        raise ValueError(f"n_hat must be >= 1, got {n_hat}")
    k = int(math.floor((1.0 + epsilon) * n_hat + _FLOOR_EPS))
    k = min(k, values.size)
    nz = int(np.count_nonzero(values))
    if nz < k:
        k = max(nz, 1)
    order = np.argsort(-np.abs(values), kind="stable")
    return np.sort(order[:k]).astype(np.int64)


def removal_set(lap: LaplacianView, omega: np.ndarray, gamma: float) -> np.ndarray:
    """The floor(gamma * |omega|) candidates least coupled to the boundary.

    Couples each candidate i to the candidate set through the score
    (|L|.T |L 1_omega|)_i; small score means the column of L at i is nearly
    orthogonal to the boundary residue of omega, i.e. i sits deep inside.
    Ties broken by ascending node index.
    """
    omega = np.asarray(omega, dtype=np.int64)
    k = int(math.floor(gamma * omega.size + _FLOOR_EPS))
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    z = np.abs(lap.apply_to_indicator(omega))
    scores = lap.abs_rmatvec(z)[omega]
    order = np.argsort(scores, kind="stable")
    return np.sort(omega[order[:k]])


class _LaplacianColumns:
    """Column submatrix L[:, cols] of the Laplacian as a sensing operator."""

    def __init__(self, lap: LaplacianView, cols: np.ndarray):
        self.lap = lap
        self.cols = cols
        self.shape = (lap.n, cols.size)

    def rmatvec(self, r):
        return self.lap.rmatvec(r)[self.cols]

    def columns(self, idx):
        return self.lap.columns(self.cols[np.asarray(idx, dtype=np.int64)])


def lce(
    g: Graph,
    n_hat: int,
    seeds,
    params: LceParams = LceParams(),
    max_iter: int | None = None,
) -> LceOutput:
    """Extract one cluster of roughly ``n_hat`` nodes around ``seeds``.

    The recovered vector approximates the indicator of the unknown cluster
    minus the removed set; nodes scoring above ``params.rejection`` join the
    removed set to form the cluster.  ``|cluster| <= n_hat`` always holds.
    """
    active = g.active_nodes()
    if not (1 <= n_hat <= active.size):
        raise ValueError(f"n_hat must lie in [1, {active.size}], got {n_hat}")
    seeds = as_node_array(seeds, g.n)
    lap = g.laplacian()

    v = diffuse(g, seeds, params.walk_depth)
    sel = candidate_set(v[active], n_hat, params.epsilon)
    omega = active[sel]
    removed = removal_set(lap, omega, params.gamma)

    # the solve universe is the nodes that can carry walk mass; a degree-0
    # row of L is an identity row, so including such a node in V\U forces a
    # phantom +1 into y that the pursuit then spends support on
    universe = active[g.degrees[active] > 0.0]
    solve_cols = np.setdiff1d(universe, removed, assume_unique=True)
    y = lap.apply_to_indicator(solve_cols)

    sparsity = min(n_hat - removed.size, solve_cols.size)
    degenerate = sparsity < 1
    if degenerate:
        sparsity = 1
    phi = _LaplacianColumns(lap, solve_cols)
    if max_iter is None:
        max_iter = int(math.ceil(math.log2(max(active.size, 2)))) + 1
    rec = subspace_pursuit(SensingProblem(phi, y, sparsity), max_iter=max_iter)

    x = np.zeros(g.n)
    x[solve_cols] = rec.x
    members = solve_cols[rec.x > params.rejection]
    cluster = np.union1d(members, removed)
    return LceOutput(
        cluster=cluster,
        removed=removed,
        candidates=omega,
        x=x,
        residual_norm=rec.residual_norm,
        iterations=rec.iterations,
        degenerate=degenerate,
    )
