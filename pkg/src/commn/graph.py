"""Undirected simple graphs stored as CSR arrays with a node activity mask.

Node removal never renumbers: a removed node keeps its id and simply stops
contributing to degrees, traversal and component sizes.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "load_edge_list",
    "write_edge_list",
    "degree",
    "remove_nodes",
    "largest_connected_component_size",
]


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    indptr, indices : array_like
        CSR adjacency. Each row must be sorted, symmetric, loop-free and
        duplicate-free; use :meth:`from_edges` when that is not guaranteed.
    active : array_like of bool, optional
        Presence mask. Defaults to all nodes present.
    labels : sequence of str, optional
        External label of every node (from an input file).
    """

    def __init__(self, indptr, indices, active=None, labels=None):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        n = len(self.indptr) - 1
        if active is None:
            active = np.ones(n, dtype=bool)
        self.active = np.asarray(active, dtype=bool)
        for arr in (self.indptr, self.indices, self.active):
            arr.setflags(write=False)
        self.labels = list(labels) if labels is not None else None
        self._rows = None
        self._degrees = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        """Build a graph on ``n`` nodes, dropping self-loops and duplicate edges."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range")
        arr = arr[arr[:, 0] != arr[:, 1]]
        both = np.concatenate([arr, arr[:, ::-1]])
        if len(both):
            # unique on (row, col) also sorts rows and columns
            keys = np.unique(both[:, 0] * n + both[:, 1])
            rows, cols = keys // n, keys % n
        else:
            rows = cols = np.empty(0, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(indptr, cols, labels=labels)

    @property
    def n(self) -> int:
        """Total node count, removed nodes included."""
        return len(self.indptr) - 1

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    @property
    def m(self) -> int:
        """Number of edges between active nodes."""
        return int(self.degrees().sum()) // 2

    @property
    def rows(self) -> np.ndarray:
        """Source node of every CSR entry."""
        if self._rows is None:
            self._rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return self._rows

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def active_edge_mask(self) -> np.ndarray:
        """Mask over CSR entries whose two endpoints are both active."""
        return self.active[self.rows] & self.active[self.indices]

    def degrees(self) -> np.ndarray:
        """Active degree of every node (0 for removed nodes)."""
        if self._degrees is None:
            if self.active.all():
                deg = np.diff(self.indptr)
            else:
                deg = np.bincount(self.rows[self.active_edge_mask()], minlength=self.n)
            self._degrees = deg.astype(np.int64)
            self._degrees.setflags(write=False)
        return self._degrees

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted active neighbours of ``v``."""
        nbrs = self.indices[self.indptr[v]:self.indptr[v + 1]]
        return nbrs[self.active[nbrs]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.indices[self.indptr[u]:self.indptr[u + 1]]
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v and self.active[u] and self.active[v])

    def edges(self) -> np.ndarray:
        """Active edges as an ``(m, 2)`` array with ``u < v``."""
        keep = self.active_edge_mask() & (self.rows < self.indices)
        return np.column_stack([self.rows[keep], self.indices[keep]])

    def active_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.active)

    def adjacency_lists(self) -> list[list[int]]:
        """Plain Python adjacency over active nodes, for tight pure-Python loops."""
        mask = self.active_edge_mask()
        out = []
        for v in range(self.n):
            lo, hi = self.indptr[v], self.indptr[v + 1]
            out.append(self.indices[lo:hi][mask[lo:hi]].tolist())
        return out

    def with_active(self, active: np.ndarray) -> "Graph":
        g = Graph.__new__(Graph)
        g.indptr, g.indices, g.labels, g._rows = self.indptr, self.indices, self.labels, self._rows
        g.active = np.asarray(active, dtype=bool).copy()
        g.active.setflags(write=False)
        g._degrees = None
        return g

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, active={self.n_active}, m={self.m})"


def degree(graph: Graph, v: int) -> int:
    _check_active(graph, v)
    return int(graph.degrees()[v])


def remove_nodes(graph: Graph, nodes: Iterable[int]) -> Graph:
    """Return a copy of ``graph`` with ``nodes`` masked out."""
    nodes = np.asarray(list(nodes), dtype=np.int64)
    if len(nodes) == 0:
        return graph
    if len(np.unique(nodes)) != len(nodes):
        raise ValueError("duplicate node in removal set")
    for v in nodes:
        _check_active(graph, int(v))
    active = graph.active.copy()
    active[nodes] = False
    return graph.with_active(active)


def largest_connected_component_size(graph: Graph) -> int:
    nodes = graph.active_nodes()
    if len(nodes) == 0:
        return 0
    e = graph.edges()
    pos = np.full(graph.n, -1, dtype=np.int64)
    pos[nodes] = np.arange(len(nodes))
    k = len(nodes)
    adj = csr_matrix((np.ones(len(e)), (pos[e[:, 0]], pos[e[:, 1]])), shape=(k, k))
    _, comp = connected_components(adj, directed=False)
    return int(np.bincount(comp).max())


def _check_active(graph: Graph, v: int) -> None:
    if not 0 <= v < graph.n:
        raise IndexError(f"node {v} out of range [0, {graph.n})")
    if not graph.active[v]:
        raise ValueError(f"node {v} has been removed")


def load_edge_list(path, directed: bool = False) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped. Labels may be any
    token; they are numbered in order of first appearance and kept in
    ``graph.labels``. Direction, duplicates and self-loops are discarded, but a
    node that only appears in a self-loop is kept as an isolated node.
    ``directed`` is accepted for clarity and has no effect.
    """
    ids: dict[str, int] = {}
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected two node labels, got {line!r}")
            u = ids.setdefault(parts[0], len(ids))
            v = ids.setdefault(parts[1], len(ids))
            edges.append((u, v))
    labels = [None] * len(ids)
    for lab, i in ids.items():
        labels[i] = lab
    return Graph.from_edges(len(ids), edges, labels=labels)


def write_edge_list(graph: Graph, path, header: Sequence[str] = ()) -> None:
    with open(Path(path), "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for u, v in graph.edges():
            fh.write(f"{graph.label(u)} {graph.label(v)}\n")
        # a self-loop line keeps an isolated node in the file; the loader drops the loop
        for v in np.flatnonzero(graph.active & (graph.degrees() == 0)):
            fh.write(f"{graph.label(v)} {graph.label(v)}\n")
