"""Clustering pipelines built on seeded extraction.

``sslc_single`` grows one labeled seed set by probing random nodes and
keeping those whose extracted cluster mostly overlaps the current estimate.
``sslc_multi`` shares one probe stream across several labeled clusters.
``uslc`` needs no labels: it estimates pairwise co-membership frequencies
from repeated extractions at random seeds, peels off one high-confidence
cluster per round, and repeats on the remainder.

Probes run strictly sequentially in sample order, so every pipeline is a
pure function of (graph, config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import Graph, as_node_array, induced_subgraph
from .lce import LceParams, lce

__all__ = [
    "SslcConfig",
    "UslcConfig",
    "AcceptRecord",
    "SslcResult",
    "MultiResult",
    "ClusterAssignment",
    "CoMembershipMatrix",
    "comembership_accumulate",
    "sslc_single",
    "sslc_multi",
    "uslc",
]

# co-membership pair buffers are compressed once they reach this many entries
_COMPRESS_AT = 2_000_000


@dataclass(frozen=True)
class SslcConfig:
    """Probing budget and extraction knobs for the seeded pipelines.

    iterations = 0 is valid and reduces the pipeline to one plain
    extraction from the initial seeds.
    """

    iterations: int = 60
    params: LceParams = field(default_factory=LceParams)

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")


@dataclass(frozen=True)
class UslcConfig:
    """Round budget and stopping rule for the unsupervised pipeline.

    min_size   : smallest cluster worth extracting; also the size estimate
                 passed to every probe extraction
    iterations : probes per round
    delta      : co-membership acceptance threshold; None recomputes
                 0.5 * (min_size / remaining)^2 at each round
    max_clusters : stop after this many extracted clusters
    literal_guard : invert the round guard to "remaining < min_size"
                 (kept only for comparison runs; the default guard is the
                 corrected one and the only mode used by the benches)
    """

    min_size: int
    iterations: int = 1000
    delta: float | None = None
    max_clusters: int | None = None
    literal_guard: bool = False
    params: LceParams = field(default_factory=LceParams)

    def __post_init__(self):
        if self.min_size < 1:
            raise ValueError(f"min_size must be >= 1, got {self.min_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.delta is not None and not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.max_clusters is not None and self.max_clusters < 1:
            raise ValueError(f"max_clusters must be >= 1, got {self.max_clusters}")


@dataclass
class AcceptRecord:
    """One probe: which node was drawn and where it went."""

    iteration: int
    node: int
    overlap: int
    cluster_size: int
    accepted: bool
    cluster_index: int | None = field(default=None)


@dataclass
class SslcResult:
    cluster: np.ndarray
    seeds: np.ndarray
    accept_log: list
    lce_calls: int


@dataclass
class ClusterAssignment:
    """Disjoint clusters plus leftover nodes."""

    clusters: list
    outliers: np.ndarray

    def __post_init__(self):
        seen = set()
        for c in self.clusters:
            ids = set(int(i) for i in c)
            if seen & ids:
                raise ValueError("clusters overlap")
            seen |= ids
        if seen & set(int(i) for i in self.outliers):
            raise ValueError("outliers overlap a cluster")

    def labels(self, n: int, outlier_label: int = -1) -> np.ndarray:
        out = np.full(n, outlier_label, dtype=np.int64)
        for idx, c in enumerate(self.clusters):
            out[c] = idx
        return out


@dataclass
class MultiResult:
    assignment: ClusterAssignment
    seeds: list
    accept_log: list
    conflicts: list
    lce_calls: int


def _overlap(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.intersect1d(a, b, assume_unique=True).size)


def _sample_pool(g: Graph) -> np.ndarray:
    """Nodes eligible as probe seeds: active with at least one edge."""
    return np.flatnonzero(g.active & (g.degrees > 0.0)).astype(np.int64)


def sslc_single(g: Graph, n_hat: int, seeds, cfg: SslcConfig, rng: np.random.Generator) -> SslcResult:
    """Grow one cluster from labeled seeds by accept/reject probing.

    Each iteration draws a node uniformly from the active sampling pool,
    extracts a cluster of size ``n_hat`` around it, and accepts the node
    into the seed set when more than half of that cluster lies inside the
    current estimate.  The estimate is recomputed after every accept.
    """
    seeds = as_node_array(seeds, g.n)
    if seeds.size == 0:
        raise ValueError("need at least one labeled seed")
    current = lce(g, n_hat, seeds, cfg.params).cluster
    calls = 1
    log = []
    pool = _sample_pool(g)
    if pool.size == 0:
        raise ValueError("graph has no active nodes with edges")
    for it in range(cfg.iterations):
        v = int(rng.choice(pool))
        probe = lce(g, n_hat, [v], cfg.params).cluster
        calls += 1
        ov = _overlap(current, probe)
        accepted = ov > 0.5 * probe.size
        log.append(AcceptRecord(iteration=it, node=v, overlap=ov, cluster_size=int(probe.size), accepted=accepted))
        if accepted and v not in seeds:
            seeds = np.union1d(seeds, [v])
            current = lce(g, n_hat, seeds, cfg.params).cluster
            calls += 1
    return SslcResult(cluster=current, seeds=seeds, accept_log=log, lce_calls=calls)


def sslc_multi(g: Graph, sizes, seed_sets, cfg: SslcConfig, rng: np.random.Generator) -> MultiResult:
    """Grow several labeled clusters from one shared probe stream.

    Probe extractions use the smallest of ``sizes`` so a probe can be
    compared against every cluster estimate.  A probe node joins the unique
    cluster whose estimate covers more than half of the probe's cluster
    (largest overlap wins if several qualify; ties take the lower cluster
    index).  Final estimates may overlap; each contested node goes to the
    cluster giving it the larger recovered indicator value, nodes inside a
    removed set counting as certain members, ties to the lower index, and
    every contested node is flagged in ``conflicts``.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) != len(seed_sets) or not sizes:
        raise ValueError("need one seed set per cluster size")
    if min(sizes) < 1:
        raise ValueError("cluster sizes must be >= 1")
    seed_sets = [as_node_array(s, g.n) for s in seed_sets]
    if any(s.size == 0 for s in seed_sets):
        raise ValueError("every cluster needs at least one labeled seed")
    k = len(sizes)
    outs = [lce(g, sizes[s], seed_sets[s], cfg.params) for s in range(k)]
    calls = k
    probe_size = min(sizes)
    pool = _sample_pool(g)
    if pool.size == 0:
        raise ValueError("graph has no active nodes with edges")
    log = []
    for it in range(cfg.iterations):
        v = int(rng.choice(pool))
        probe = lce(g, probe_size, [v], cfg.params).cluster
        calls += 1
        threshold = 0.5 * probe.size
        best_s, best_ov = None, 0
        for s in range(k):
            ov = _overlap(outs[s].cluster, probe)
            if ov > threshold and (best_s is None or ov > best_ov):
                best_s, best_ov = s, ov
        log.append(AcceptRecord(iteration=it, node=v, overlap=best_ov, cluster_size=int(probe.size),
                                accepted=best_s is not None, cluster_index=best_s))
        if best_s is not None and v not in seed_sets[best_s]:
            seed_sets[best_s] = np.union1d(seed_sets[best_s], [v])
            outs[best_s] = lce(g, sizes[best_s], seed_sets[best_s], cfg.params)
            calls += 1

    # resolve nodes claimed by several clusters: larger indicator value wins
    claim = {}
    conflicts = []
    for s in range(k):
        removed = set(int(i) for i in outs[s].removed)
        for i in outs[s].cluster:
            i = int(i)
            val = np.inf if i in removed else outs[s].x[i]
            if i not in claim:
                claim[i] = (s, val)
            else:
                if len(conflicts) == 0 or conflicts[-1] != i:
                    conflicts.append(i)
                if val > claim[i][1]:
                    claim[i] = (s, val)
    clusters = [[] for _ in range(k)]
    for i, (s, _) in claim.items():
        clusters[s].append(i)
    clusters = [np.asarray(sorted(c), dtype=np.int64) for c in clusters]
    assigned = np.concatenate(clusters) if clusters else np.zeros(0, dtype=np.int64)
    outliers = np.setdiff1d(g.active_nodes(), assigned)
    assignment = ClusterAssignment(clusters=clusters, outliers=outliers)
    return MultiResult(assignment=assignment, seeds=seed_sets, accept_log=log,
                       conflicts=sorted(set(conflicts)), lce_calls=calls)


class CoMembershipMatrix:
    """Streaming average of pairwise co-membership indicators.

    ``accumulate(cluster, weight)`` adds ``weight`` to every ordered pair of
    cluster members including the diagonal.  Pairs are kept as int64 keys
    i * n + j in growable buffers and merged by np.unique once the buffers
    pass a size threshold, so memory tracks the number of distinct observed
    pairs instead of n^2.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = int(n)
        self._keys: list = []
        self._weights: list = []
        self._buffered = 0
        self._merged_keys = np.zeros(0, dtype=np.int64)
        self._merged_vals = np.zeros(0)

    def accumulate(self, cluster, weight: float) -> None:
        c = np.asarray(cluster, dtype=np.int64)
        if c.size == 0:
            return
        keys = (c[:, None] * self.n + c[None, :]).ravel()
        self._keys.append(keys)
        self._weights.append(float(weight))
        self._buffered += keys.size
        if self._buffered >= _COMPRESS_AT:
            self._compress()

    def _compress(self) -> None:
        if not self._keys:
            return
        keys = np.concatenate([self._merged_keys] + self._keys)
        vals = np.concatenate(
            [self._merged_vals] + [np.full(k.size, w) for k, w in zip(self._keys, self._weights)]
        )
        uniq, inv = np.unique(keys, return_inverse=True)
        summed = np.zeros(uniq.size)
        np.add.at(summed, inv, vals)
        self._merged_keys = uniq
        self._merged_vals = summed
        self._keys = []
        self._weights = []
        self._buffered = 0

    def to_csr(self) -> sp.csr_matrix:
        self._compress()
        rows = self._merged_keys // self.n
        cols = self._merged_keys % self.n
        return sp.csr_matrix((self._merged_vals, (rows, cols)), shape=(self.n, self.n))

    def value(self, i: int, j: int) -> float:
        self._compress()
        pos = np.searchsorted(self._merged_keys, i * self.n + j)
        if pos < self._merged_keys.size and self._merged_keys[pos] == i * self.n + j:
            return float(self._merged_vals[pos])
        return 0.0


def comembership_accumulate(m: CoMembershipMatrix, cluster, weight: float) -> None:
    """Add one extracted cluster to the running co-membership average."""
    m.accumulate(cluster, weight)


@dataclass
class RoundDiagnostics:
    """What one unsupervised round saw and decided."""

    round_index: int
    active_before: int
    delta: float
    anchor: int | None
    cluster: np.ndarray
    candidate_count: int
    m_nnz: int = field(default=0)


def uslc(g: Graph, cfg: UslcConfig, rng: np.random.Generator):
    """Unsupervised peeling: estimate co-membership, cut one cluster, repeat.

    Each round probes ``cfg.iterations`` random seeds on the remaining
    graph, averages the resulting cluster indicators into a co-membership
    matrix, picks a node uniformly among those sharing an above-threshold
    entry with some other node, and extracts everything tied to it above
    the threshold.  Rounds stop when the remaining graph drops below
    ``cfg.min_size``, when no pair clears the threshold, or at
    ``cfg.max_clusters``.  Returns (ClusterAssignment, [RoundDiagnostics]).
    """
    remaining = g
    clusters: list = []
    rounds: list = []
    while True:
        active = remaining.num_active
        small = active < cfg.min_size
        proceed = small if cfg.literal_guard else not small
        if not proceed:
            break
        if cfg.max_clusters is not None and len(clusters) >= cfg.max_clusters:
            break
        pool = _sample_pool(remaining)
        if pool.size == 0:
            break
        n_hat = min(cfg.min_size, pool.size)
        delta = cfg.delta if cfg.delta is not None else 0.5 * (cfg.min_size / active) ** 2
        m = CoMembershipMatrix(g.n)
        w = 1.0 / cfg.iterations
        for _ in range(cfg.iterations):
            v = int(rng.choice(pool))
            out = lce(remaining, n_hat, [v], cfg.params)
            comembership_accumulate(m, out.cluster, w)
        M = m.to_csr()
        coo = M.tocoo()
        off = coo.row != coo.col
        strong = off & (coo.data > delta)
        candidates = np.unique(coo.row[strong])
        if candidates.size == 0:
            rounds.append(RoundDiagnostics(round_index=len(rounds), active_before=active,
                                           delta=delta, anchor=None,
                                           cluster=np.zeros(0, dtype=np.int64),
                                           candidate_count=0, m_nnz=int(M.nnz)))
            break
        v = int(rng.choice(candidates))
        row = M.getrow(v).tocoo()
        members = row.col[row.data > delta]
        cluster = np.union1d(members, [v])
        rounds.append(RoundDiagnostics(round_index=len(rounds), active_before=active,
                                       delta=delta, anchor=v, cluster=cluster,
                                       candidate_count=int(candidates.size), m_nnz=int(M.nnz)))
        clusters.append(cluster)
        remaining = induced_subgraph(remaining, cluster)
    assigned = np.concatenate(clusters) if clusters else np.zeros(0, dtype=np.int64)
    outliers = np.setdiff1d(g.active_nodes(), assigned)
    return ClusterAssignment(clusters=clusters, outliers=outliers), rounds
