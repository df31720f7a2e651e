"""Synthetic benchmark inputs: block-model graphs, geometric point clouds,
KNN affinity graphs, and outlier injection.

All sampling goes through a caller-supplied numpy Generator, so every
dataset is reproducible from its seed.  Block-model sampling draws one
row block at a time (never a full n x n dense matrix), which keeps memory
linear in the edge count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import Graph

__all__ = [
    "SbmSpec",
    "FeatureMatrix",
    "sample_sbm",
    "symmetric_sbm",
    "general_sbm",
    "three_lines",
    "three_circles",
    "three_moons",
    "inject_outliers",
    "knn_affinity",
]

# feature rows are padded to this many coordinates before noise is added
_AMBIENT_DIM = 100
_NOISE_SIGMA = 0.15
# row-block size for Bernoulli sampling; bounds peak memory at ~block * n floats
_BLOCK_ROWS = 256


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic block model: community sizes and connection probabilities."""

    sizes: tuple
    probs: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        k = len(sizes)
        if k == 0 or any(s < 1 for s in sizes):
            raise ValueError(f"community sizes must be positive, got {sizes}")
        if probs.shape != (k, k):
            raise ValueError(f"probability matrix must be {k}x{k}, got {probs.shape}")
        if not np.array_equal(probs, probs.T):
            raise ValueError("probability matrix must be symmetric")
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.sizes)), self.sizes).astype(np.int64)


def sample_sbm(spec: SbmSpec, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """Draw one graph from the block model; returns (graph, labels).

    Each unordered node pair (i < j) is an independent Bernoulli draw with
    the probability of its block pair; no self-loops.
    """
    n = spec.n
    labels = spec.labels()
    p_row = spec.probs[labels]  # (n, k)
    rows, cols = [], []
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        block_p = p_row[start:stop][:, labels]  # (b, n) pairwise probabilities
        draw = rng.random((stop - start, n)) < block_p
        # keep only the upper triangle i < j to sample each pair once
        r, c = np.nonzero(draw)
        r += start
        keep = r < c
        rows.append(r[keep])
        cols.append(c[keep])
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    data = np.ones(r.size)
    A = sp.coo_matrix((np.concatenate([data, data]), (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n)).tocsr()
    return Graph(A), labels


def symmetric_sbm(n1: int, k: int, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """k equal communities of size n1 with p = 5 ln(k n1)/(k n1) inside and
    q = ln(k n1)/(k n1) across.

    On tiny graphs (k n1 <= 12) the intra rate formula exceeds 1 and is
    clamped, making intra edges deterministic there.  q = ln(n)/n <= 1/e
    never needs the clamp.
    """
    if n1 < 1 or k < 1 or k * n1 < 2:
        raise ValueError(f"need positive communities with k*n1 >= 2, got n1={n1}, k={k}")
    n = k * n1
    q = math.log(n) / n
    p = min(5.0 * q, 1.0)
    probs = np.full((k, k), q)
    np.fill_diagonal(probs, p)
    return sample_sbm(SbmSpec(sizes=(n1,) * k, probs=probs), rng)


def general_sbm(n1: int, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """Three unequal communities of sizes (n1, 2 n1, 5 n1).

    Intra probabilities ln^2(8 n1)/(6 n1), ln^2(8 n1)/(12 n1),
    ln^2(8 n1)/(30 n1); all cross pairs ln(8 n1)/(6 n1).
    """
    if n1 < 1:
        raise ValueError(f"need n1 >= 1, got {n1}")
    n = 8 * n1
    ln = math.log(n)
    intra = (ln * ln / (6 * n1), ln * ln / (12 * n1), ln * ln / (30 * n1))
    cross = ln / (6 * n1)
    if max(intra) > 1.0 or cross > 1.0:
        raise ValueError("block probability exceeds 1; increase n1")
    probs = np.full((3, 3), cross)
    np.fill_diagonal(probs, intra)
    return sample_sbm(SbmSpec(sizes=(n1, 2 * n1, 5 * n1), probs=probs), rng)


@dataclass
class FeatureMatrix:
    """Point cloud with optional integer labels (-1 marks outliers)."""

    values: np.ndarray
    labels: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"features must be 2-d, got shape {self.values.shape}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.values.shape[0],):
                raise ValueError("labels length must match row count")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _embed(points: np.ndarray, labels: np.ndarray, rng: np.random.Generator,
           noise_sigma: float) -> FeatureMatrix:
    """Zero-pad 2-d points to the ambient dimension and add iid noise."""
    n = points.shape[0]
    vals = np.zeros((n, _AMBIENT_DIM))
    vals[:, :2] = points
    if noise_sigma > 0.0:
        vals += rng.normal(0.0, noise_sigma, size=vals.shape)
    return FeatureMatrix(values=vals, labels=labels.astype(np.int64))


def three_lines(rng: np.random.Generator, noise_sigma: float = _NOISE_SIGMA) -> FeatureMatrix:
    """Three horizontal segments at heights 0, 1, 2 with x uniform on [0, 6];
    1200 points per line, padded to 100 coordinates plus Gaussian noise."""
    per = 1200
    xs = rng.uniform(0.0, 6.0, size=3 * per)
    ys = np.repeat(np.arange(3, dtype=np.float64), per)
    pts = np.column_stack([xs, ys])
    return _embed(pts, np.repeat(np.arange(3), per), rng, noise_sigma)


def three_circles(rng: np.random.Generator, noise_sigma: float = _NOISE_SIGMA) -> FeatureMatrix:
    """Concentric circles of radii 1.0, 2.4, 3.8 with 500, 1200, 1900 points."""
    radii = (1.0, 2.4, 3.8)
    counts = (500, 1200, 1900)
    pts, labels = [], []
    for lab, (rad, cnt) in enumerate(zip(radii, counts)):
        theta = rng.uniform(0.0, 2.0 * math.pi, size=cnt)
        pts.append(np.column_stack([rad * np.cos(theta), rad * np.sin(theta)]))
        labels.append(np.full(cnt, lab))
    return _embed(np.vstack(pts), np.concatenate(labels), rng, noise_sigma)


def three_moons(rng: np.random.Generator, noise_sigma: float = _NOISE_SIGMA) -> FeatureMatrix:
    """Two upper semicircles of radius 1 at (0, 0) and (3, 0) interleaved
    with a lower semicircle of radius 1.5 at (1.5, 0.4); 1200 points each."""
    per = 1200
    arcs = (
        (0.0, 0.0, 1.0, False),
        (1.5, 0.4, 1.5, True),
        (3.0, 0.0, 1.0, False),
    )
    pts, labels = [], []
    for lab, (cx, cy, rad, lower) in enumerate(arcs):
        theta = rng.uniform(0.0, math.pi, size=per)
        y = rad * np.sin(theta)
        pts.append(np.column_stack([cx + rad * np.cos(theta), cy - y if lower else cy + y]))
        labels.append(np.full(per, lab))
    return _embed(np.vstack(pts), np.concatenate(labels), rng, noise_sigma)


def inject_outliers(f: FeatureMatrix, fraction: float, rng: np.random.Generator) -> FeatureMatrix:
    """Append floor(fraction * n) standard-normal rows labeled -1.

    fraction = 0 returns the input unchanged.  When the input carries no
    labels the appended rows stay unmarked and labels remain None.
    """
    if not (0.0 <= fraction <= 1.0):
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    extra = int(math.floor(fraction * f.n))
    if extra == 0:
        return f
    noise = rng.standard_normal((extra, f.values.shape[1]))
    values = np.vstack([f.values, noise])
    labels = None
    if f.labels is not None:
        labels = np.concatenate([f.labels, np.full(extra, -1, dtype=np.int64)])
    return FeatureMatrix(values=values, labels=labels)


def _knn_select(features: np.ndarray, k: int, scale_rank: int):
    """K nearest neighbor ids/distances per row plus the local scale sigma.

    Self is excluded; distance ties break by ascending index.  sigma_i is
    the distance to the scale_rank-th closest other point; a zero sigma
    (coincident points) falls back to the smallest positive neighbor
    distance, and 1.0 if every neighbor coincides.
    """
    n = features.shape[0]
    nbr_ids = np.empty((n, k), dtype=np.int64)
    nbr_d2 = np.empty((n, k))
    sigma = np.empty(n)
    sq = np.einsum("ij,ij->i", features, features)
    keep = max(k, scale_rank)
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        d2 = sq[start:stop, None] + sq[None, :] - 2.0 * features[start:stop] @ features.T
        np.maximum(d2, 0.0, out=d2)
        d2[np.arange(stop - start), np.arange(start, stop)] = np.inf
        order = np.argsort(d2, axis=1, kind="stable")[:, :keep]
        od2 = np.take_along_axis(d2, order, axis=1)
        nbr_ids[start:stop] = order[:, :k]
        nbr_d2[start:stop] = od2[:, :k]
        sigma[start:stop] = np.sqrt(od2[:, scale_rank - 1])
    if np.any(sigma == 0.0):
        for i in np.flatnonzero(sigma == 0.0):
            pos = nbr_d2[i][nbr_d2[i] > 0.0]
            sigma[i] = math.sqrt(pos.min()) if pos.size else 0.0
    return nbr_ids, nbr_d2, sigma


def _truncate_rows(S: sp.csr_matrix, cap: int) -> sp.csr_matrix:
    """Keep the ``cap`` heaviest entries per row (ties by ascending column),
    then OR the kept mask with its transpose so the result stays symmetric."""
    S = S.tocsr()
    S.sum_duplicates()
    S.sort_indices()
    keep = np.zeros(S.nnz, dtype=bool)
    for i in range(S.shape[0]):
        lo, hi = S.indptr[i], S.indptr[i + 1]
        if hi - lo <= cap:
            keep[lo:hi] = True
        else:
            order = np.argsort(-S.data[lo:hi], kind="stable")[:cap]
            keep[lo + order] = True
    mask = sp.csr_matrix((keep.astype(np.float64), S.indices, S.indptr), shape=S.shape)
    mask = mask.maximum(mask.T)
    out = S.multiply(mask > 0).tocsr()
    return out


def knn_affinity(
    f: FeatureMatrix,
    k: int = 15,
    scale_rank: int = 10,
    symmetrization: str = "product",
    truncate: bool = True,
) -> Graph:
    """Locally scaled Gaussian KNN affinity graph.

    Directed weights w_ij = exp(-|x_i - x_j|^2 / (sigma_i sigma_j)) over the
    k nearest neighbors of i are symmetrized by ``product`` (W.T W, the
    co-neighbor similarity), ``max``, or ``average``.  Product mode truncates
    each row to its 3k heaviest entries by default (set ``truncate=False``
    for the exact product).  The diagonal is dropped.
    """
    n = f.n
    if not (1 <= k <= n - 1):
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    if not (1 <= scale_rank <= n - 1):
        raise ValueError(f"scale_rank must lie in [1, {n - 1}], got {scale_rank}")
    if symmetrization not in ("product", "max", "average"):
        raise ValueError(f"unknown symmetrization {symmetrization!r}")
    ids, d2, sigma = _knn_select(f.values, k, scale_rank)
    denom = sigma[:, None] * sigma[ids]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.exp(-d2 / denom)
    w[~np.isfinite(w)] = 1.0  # all-coincident neighborhoods get weight 1
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    W = sp.csr_matrix((w.ravel(), (rows, ids.ravel())), shape=(n, n))
    if symmetrization == "product":
        S = (W.T @ W).tocsr()
        if truncate:
            S = _truncate_rows(S, 3 * k)
        S = (S + S.T) * 0.5  # scipy's product is symmetric only up to summation order
    elif symmetrization == "max":
        S = W.maximum(W.T)
    else:
        S = (W + W.T) * 0.5
    S = S.tolil()
    S.setdiag(0.0)
    return Graph(S.tocsr())
