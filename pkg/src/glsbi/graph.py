"""Directed Erdős-Rényi neural graphs with a single shared synaptic weight.

Neurons are indexed 0..n-1 project-wide.  Only the presynaptic adjacency is
stored (the dynamics sums over presynaptic spikes); postsynaptic lists are
derived on demand.  Graphs are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError
from .rng import RngState, next_uniform, state_from_array, state_to_array


@dataclass(frozen=True)
class GraphParams:
    n: int
    p: float
    w: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError(f"n must be >= 2, got {self.n}")
        if not 0.0 < self.p < 1.0:
            raise ParameterError(f"p must be in (0, 1), got {self.p}")
        if not self.w > 0.0:
            raise ParameterError(f"w must be positive, got {self.w}")


class DirectedGraph:
    """Presynaptic adjacency in CSR form: presyn(i) = pre_indices[pre_indptr[i]:pre_indptr[i+1]].

    Row i lists the presynaptic neurons of i (sources of edges j -> i),
    sorted and duplicate-free, never containing i itself.
    """

    __slots__ = ("n", "w", "pre_indptr", "pre_indices", "_post")

    def __init__(self, n: int, w: float, pre_indptr: np.ndarray, pre_indices: np.ndarray):
        self.n = int(n)
        self.w = float(w)
        self.pre_indptr = np.asarray(pre_indptr, dtype=np.int64)
        self.pre_indices = np.asarray(pre_indices, dtype=np.int64)
        self._post: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, w: float) -> "DirectedGraph":
        """Build from a dense matrix where adj[i, j] != 0 means edge i -> j."""
        n = adj.shape[0]
        # Row-major nonzero scan of adj.T yields, for each target i, its
        # sources in ascending order: exactly the sorted presynaptic CSR.
        tgt, src = np.nonzero(adj.T)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(tgt, minlength=n), out=indptr[1:])
        return cls(n, w, indptr, src.astype(np.int64))

    def presyn(self, i: int) -> np.ndarray:
        self._check_index(i)
        return self.pre_indices[self.pre_indptr[i] : self.pre_indptr[i + 1]]

    def postsynaptic(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of postsynaptic lists (targets of each source), derived and cached."""
        if self._post is None:
            order = np.argsort(self.pre_indices, kind="stable")
            targets = np.repeat(
                np.arange(self.n, dtype=np.int64), np.diff(self.pre_indptr)
            )
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(self.pre_indices, minlength=self.n), out=indptr[1:])
            self._post = (indptr, targets[order])
        return self._post

    def to_adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        targets = np.repeat(np.arange(self.n), np.diff(self.pre_indptr))
        adj[self.pre_indices, targets] = 1
        return adj

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"neuron index {i} out of range [0, {self.n})")

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        assert self.pre_indptr.shape == (self.n + 1,)
        assert self.pre_indptr[0] == 0 and self.pre_indptr[-1] == len(self.pre_indices)
        for i in range(self.n):
            row = self.presyn(i)
            assert np.all((row >= 0) & (row < self.n))
            assert not np.any(row == i), f"self-loop at {i}"
            assert np.all(np.diff(row) > 0), f"row {i} not sorted/unique"


def generate_er(params: GraphParams, rng: RngState) -> tuple[DirectedGraph, RngState]:
    """Sample a directed ER graph: each ordered pair carries an edge w.p. p.

    Consumes exactly n(n-1) uniforms in (i-major, j-minor) pair order.
    """
    state = state_to_array(rng)
    adj = _kernels.er_adjacency(state, params.n, params.p)
    return DirectedGraph.from_adjacency(adj, params.w), state_from_array(state)


def remove_reciprocal(g: DirectedGraph, rng: RngState) -> tuple[DirectedGraph, RngState]:
    """Drop one edge, chosen uniformly, from every reciprocal pair.

    Unordered pairs {i, j} with both directions present are visited in
    ascending (i, j) order, one uniform each: u < 0.5 removes i -> j,
    otherwise j -> i.  Expected edge density drops from p to p - p^2/2.
    """
    adj = g.to_adjacency()
    recip = np.argwhere(np.triu(adj & adj.T, k=1).astype(bool))
    for i, j in recip:
        u, rng = next_uniform(rng)
        if u < 0.5:
            adj[i, j] = 0
        else:
            adj[j, i] = 0
    return DirectedGraph.from_adjacency(adj, g.w), rng


def edge_count(g: DirectedGraph) -> int:
    return int(len(g.pre_indices))


def in_degree(g: DirectedGraph, i: int) -> int:
    return int(len(g.presyn(i)))


def out_degree(g: DirectedGraph, i: int) -> int:
    g._check_index(i)
    indptr, _ = g.postsynaptic()
    return int(indptr[i + 1] - indptr[i])


def write_graph(g: DirectedGraph, path) -> None:
    """Debug dump: line 1 is `n w`, then `i: j1 j2 ...` per neuron (presynaptic)."""
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.w:.17g}\n")
        for i in range(g.n):
            row = " ".join(str(j) for j in g.presyn(i))
            fh.write(f"{i}: {row}\n")


def read_graph(path) -> DirectedGraph:
    with open(path) as fh:
        first = fh.readline().split()
        n, w = int(first[0]), float(first[1])
        rows = []
        for line in fh:
            _, _, rest = line.partition(":")
            rows.append(np.array([int(x) for x in rest.split()], dtype=np.int64))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([len(r) for r in rows], out=indptr[1:])
    indices = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    return DirectedGraph(n, w, indptr, indices)
