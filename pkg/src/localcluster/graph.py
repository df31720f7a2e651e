"""Sparse undirected graphs and the random-walk Laplacian.

Graphs live on a fixed index space [0, n).  Deleting nodes never relabels:
an ``active`` mask shrinks instead, so cluster indices found on a subgraph
refer directly to nodes of the original graph.

The random-walk Laplacian is L = I - D^{-1} A with the convention that a
degree-zero row of L is a row of the identity.  Applications of L divide by
the degree vector rather than multiplying by a precomputed reciprocal, and
degrees are computed as A @ 1 so that L applied to the indicator vector of
a union of connected components cancels to exactly 0.0 in floating point.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "LaplacianView",
    "as_node_array",
    "build_graph",
    "rw_laplacian",
    "induced_subgraph",
    "transition_matrix_apply",
]


def as_node_array(nodes, n: int) -> np.ndarray:
    """Return node indices as a sorted, duplicate-free int64 array.

    Raises ValueError if any index falls outside [0, n).
    """
    arr = np.unique(np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        raise ValueError(f"node index out of range [0, {n}): {arr[arr < 0] if arr[0] < 0 else arr[arr >= n]}")
    return arr


class Graph:
    """Immutable weighted undirected graph with an activity mask.

    Parameters
    ----------
    adjacency : scipy sparse matrix, shape (n, n)
        Symmetric, nonnegative weights, empty diagonal unless
        ``allow_self_loops``.
    active : bool array of shape (n,), optional
        Nodes still present.  Inactive nodes must be isolated.
    """

    def __init__(self, adjacency, active=None, allow_self_loops: bool = False, validate: bool = True):
        A = sp.csr_matrix(adjacency, dtype=np.float64, copy=True)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"adjacency must be square, got {A.shape}")
        A.sum_duplicates()
        A.eliminate_zeros()
        A.sort_indices()
        self.adjacency = A
        self.n = A.shape[0]
        if active is None:
            self.active = np.ones(self.n, dtype=bool)
        else:
            self.active = np.asarray(active, dtype=bool).copy()
            if self.active.shape != (self.n,):
                raise ValueError("active mask has wrong shape")
        # degrees as a plain matvec: keeps summation order identical to later
        # A @ x products, which is what makes indicator cancellation exact
        self.degrees = A @ np.ones(self.n)
        if validate:
            self._validate(allow_self_loops)
        self._lap = None

    def _validate(self, allow_self_loops: bool) -> None:
        A = self.adjacency
        if A.nnz and A.data.min() < 0.0:
            raise ValueError("negative edge weight")
        if not allow_self_loops and np.any(A.diagonal() != 0.0):
            raise ValueError("self-loops are not allowed")
        if (A != A.T).nnz != 0:
            raise ValueError("adjacency is not symmetric")
        if np.any(self.degrees[~self.active] != 0.0):
            raise ValueError("inactive node has incident edges")

    @property
    def num_active(self) -> int:
        return int(self.active.sum())

    def active_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.active).astype(np.int64)

    def laplacian(self) -> "LaplacianView":
        if self._lap is None:
            self._lap = LaplacianView(self)
        return self._lap


def build_graph(edges, n: int | None = None, allow_self_loops: bool = False) -> Graph:
    """Build a Graph from an iterable of (u, v) or (u, v, w) tuples.

    Parallel edge entries merge by summing weights.  Each undirected edge may
    be given once; the symmetric closure is applied here.
    """
    us, vs, ws = [], [], []
    for e in edges:
        if len(e) == 2:
            u, v = e
            w = 1.0
        elif len(e) == 3:
            u, v, w = e
        else:
            raise ValueError(f"edge must be (u, v) or (u, v, w), got {e!r}")
        u = int(u)
        v = int(v)
        w = float(w)
        if u < 0 or v < 0:
            raise ValueError(f"negative node index in edge ({u}, {v})")
        if w < 0.0:
            raise ValueError(f"negative weight on edge ({u}, {v}): {w}")
        if u == v and not allow_self_loops:
            raise ValueError(f"self-loop on node {u}")
        us.append(u)
        vs.append(v)
        ws.append(w)
    if n is None:
        if not us:
            raise ValueError("cannot infer node count from an empty edge list")
        n = max(max(us), max(vs)) + 1
    else:
        n = int(n)
        if us and (max(us) >= n or max(vs) >= n):
            raise ValueError("edge endpoint exceeds node count")
    row = np.asarray(us, dtype=np.int64)
    col = np.asarray(vs, dtype=np.int64)
    dat = np.asarray(ws, dtype=np.float64)
    # accumulate on the upper triangle so both mirror entries of an edge are
    # one identically ordered sum; parallel edges with distinct weights would
    # otherwise reassociate differently per side and break exact symmetry
    U = sp.coo_matrix((dat, (np.minimum(row, col), np.maximum(row, col))), shape=(n, n)).tocsr()
    A = (U + U.T).tocsr()
    diag = U.diagonal()
    if np.any(diag != 0.0):
        A = (A - sp.diags(diag)).tocsr()
    return Graph(A, allow_self_loops=allow_self_loops)


class LaplacianView:
    """Matrix-free random-walk Laplacian L = I - D^{-1} A of a Graph.

    Rows with zero degree act as identity rows.  ``apply_to_indicator`` is
    the exactness-critical path: it computes 1_S - (A @ 1_S) / d so that the
    numerator and the degree share the same summation order and cancel
    bitwise on full connected components.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self.n = graph.n
        self._deg = graph.degrees
        self._pos = self._deg > 0.0
        self._matrix_csr = None
        self._matrix_csc = None

    def _div_deg(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        np.divide(x, self._deg, out=out, where=self._pos)
        return out

    def apply_to_indicator(self, nodes) -> np.ndarray:
        """L @ 1_S for a node set S; exactly zero on whole components."""
        s = np.zeros(self.n)
        s[np.asarray(nodes, dtype=np.int64)] = 1.0
        return s - self._div_deg(self.graph.adjacency @ s)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """L @ x."""
        return x - self._div_deg(self.graph.adjacency @ x)

    def rmatvec(self, r: np.ndarray) -> np.ndarray:
        """L.T @ r (adjacency is symmetric, so L.T r = r - A (r / d))."""
        return r - self.graph.adjacency @ self._div_deg(r)

    def abs_rmatvec(self, z: np.ndarray) -> np.ndarray:
        """|L|.T @ z with entrywise absolute values of L."""
        # off-diagonal of L is -A_ij / d_i <= 0; diagonal is 1 - A_ii / d_i
        out = self.graph.adjacency @ self._div_deg(z)
        diag = self.graph.adjacency.diagonal()
        d_ii = np.zeros(self.n)
        np.divide(diag, self._deg, out=d_ii, where=self._pos)
        # diagonal of |L| is |1 - A_ii/d_i|; degree-zero rows hit the same
        # branch with d_ii = 0 and contribute z_i, the identity-row value
        out += (np.abs(1.0 - d_ii) - d_ii) * z
        return out

    def matrix(self) -> sp.csr_matrix:
        """Explicit sparse L (CSR)."""
        if self._matrix_csr is None:
            A = self.graph.adjacency.tocsr(copy=True)
            rows = np.repeat(np.arange(self.n), np.diff(A.indptr))
            with np.errstate(divide="ignore", invalid="ignore"):
                A.data = A.data / self._deg[rows]
            A.data[~np.isfinite(A.data)] = 0.0
            L = sp.eye(self.n, format="csr") - A
            L.sum_duplicates()
            L.eliminate_zeros()
            L.sort_indices()
            self._matrix_csr = L
        return self._matrix_csr

    def columns(self, cols: np.ndarray) -> sp.csc_matrix:
        """Sparse column submatrix L[:, cols]."""
        if self._matrix_csc is None:
            self._matrix_csc = self.matrix().tocsc()
        return self._matrix_csc[:, cols]


def rw_laplacian(g: Graph) -> LaplacianView:
    """Random-walk Laplacian view of ``g`` (cached on the graph)."""
    return g.laplacian()


def transition_matrix_apply(g: Graph, v: np.ndarray) -> np.ndarray:
    """One step of the column-stochastic walk operator: A D^{-1} v.

    Column-stochastic on positive-degree nodes, so total mass on components
    without degree-zero nodes is conserved.  Mass on degree-zero nodes is
    dropped.
    """
    v = np.asarray(v, dtype=np.float64)
    lap = g.laplacian()
    return g.adjacency @ lap._div_deg(v)


def induced_subgraph(g: Graph, remove) -> Graph:
    """New Graph with ``remove`` deactivated and their edges deleted.

    Node indices are preserved; the result keeps the original shape with a
    smaller active set.
    """
    rm = as_node_array(remove, g.n)
    if not np.all(g.active[rm]):
        raise ValueError("cannot remove a node that is already inactive")
    active = g.active.copy()
    active[rm] = False
    keep = active.astype(np.float64)
    A = g.adjacency.multiply(keep[:, None]).multiply(keep[None, :]).tocsr()
    out = Graph(A, active=active, validate=False)
    return out
