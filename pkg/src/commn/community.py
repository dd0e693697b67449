"""Community partitions and the quantities derived from them.

All computations respect the graph's activity mask: removed nodes are not
members of any community's active membership and contribute no links.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .graph import Graph, _check_active

__all__ = [
    "Partition",
    "CommunityWeightedNetwork",
    "split_degrees",
    "intra_degree",
    "inter_degree",
    "community_mu",
    "community_mus",
    "global_mixing",
    "mu_limit",
    "build_community_weighted_network",
    "detect_communities_label_propagation",
    "load_partition",
    "write_partition",
]


class Partition:
    """Non-overlapping assignment of every node to a community.

    ``community_of[v]`` is the community index of node ``v``; community ids are
    dense, ``0 .. count-1``.
    """

    def __init__(self, community_of):
        labels = np.asarray(community_of, dtype=np.int64)
        if labels.ndim != 1 or (labels.size and labels.min() < 0):
            raise ValueError("community ids must be a 1-d array of non-negative integers")
        # renumber densely in first-seen order
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first))
        self.community_of = order[inverse].astype(np.int64)
        self.community_of.setflags(write=False)
        self.count = len(first)
        sort = np.argsort(self.community_of, kind="stable")
        bounds = np.searchsorted(self.community_of[sort], np.arange(self.count + 1))
        self.members = [sort[bounds[c]:bounds[c + 1]] for c in range(self.count)]

    @classmethod
    def from_groups(cls, groups, n: int) -> "Partition":
        labels = np.full(n, -1, dtype=np.int64)
        for c, group in enumerate(groups):
            group = np.asarray(list(group), dtype=np.int64)
            if (labels[group] >= 0).any():
                raise ValueError("node assigned to more than one community")
            labels[group] = c
        if (labels < 0).any():
            raise ValueError(f"node {int(np.flatnonzero(labels < 0)[0])} has no community")
        return cls(labels)

    @property
    def n(self) -> int:
        return len(self.community_of)

    def sizes(self, graph: Graph | None = None) -> np.ndarray:
        """Community sizes, counting only active nodes when ``graph`` is given."""
        if graph is None:
            return np.bincount(self.community_of, minlength=self.count)
        return np.bincount(self.community_of[graph.active], minlength=self.count)

    def active_members(self, graph: Graph, c: int) -> np.ndarray:
        mem = self.members[c]
        return mem[graph.active[mem]]

    def __len__(self) -> int:
        return self.count

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, communities={self.count})"


def _check(graph: Graph, partition: Partition) -> None:
    if partition.n != graph.n:
        raise ValueError(f"partition covers {partition.n} nodes, graph has {graph.n}")


def split_degrees(graph: Graph, partition: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Per-node intra- and inter-community degree over active links."""
    _check(graph, partition)
    mask = graph.active_edge_mask()
    rows, cols = graph.rows[mask], graph.indices[mask]
    same = partition.community_of[rows] == partition.community_of[cols]
    k_in = np.bincount(rows[same], minlength=graph.n)
    k_out = np.bincount(rows[~same], minlength=graph.n)
    return k_in, k_out


def intra_degree(graph: Graph, partition: Partition, v: int) -> int:
    _check_active(graph, v)
    nbrs = graph.neighbors(v)
    return int((partition.community_of[nbrs] == partition.community_of[v]).sum())


def inter_degree(graph: Graph, partition: Partition, v: int) -> int:
    _check_active(graph, v)
    nbrs = graph.neighbors(v)
    return int((partition.community_of[nbrs] != partition.community_of[v]).sum())


def community_mus(graph: Graph, partition: Partition, k_in=None, k_out=None) -> np.ndarray:
    """Cohesion of every community: mean over active members of k_out / k.

    Degree-0 members count in the size but add nothing to the sum. Communities
    with no active member get NaN.
    """
    if k_in is None or k_out is None:
        k_in, k_out = split_degrees(graph, partition)
    deg = k_in + k_out
    ratio = np.divide(k_out, deg, out=np.zeros(graph.n), where=deg > 0)
    ratio[~graph.active] = 0.0
    sums = np.bincount(partition.community_of, weights=ratio, minlength=partition.count)
    sizes = partition.sizes(graph)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(sizes > 0, sums / np.maximum(sizes, 1), np.nan)


def community_mu(graph: Graph, partition: Partition, c: int) -> float:
    if not 0 <= c < partition.count or len(partition.active_members(graph, c)) == 0:
        raise ValueError(f"community {c} is empty or does not exist")
    return float(community_mus(graph, partition)[c])


def global_mixing(graph: Graph, partition: Partition) -> float:
    """Fraction of link endpoints that leave their community."""
    k_in, k_out = split_degrees(graph, partition)
    total = k_in.sum() + k_out.sum()
    if total == 0:
        raise ValueError("mixing is undefined on an edgeless graph")
    return float(k_out.sum() / total)


def mu_limit(n: int, n_c_max: int) -> float:
    """Mixing level beyond which a network has no community structure."""
    if not 0 < n_c_max <= n:
        raise ValueError(f"need 0 < n_c_max <= n, got n={n}, n_c_max={n_c_max}")
    return (n - n_c_max) / n


@dataclass(frozen=True)
class CommunityWeightedNetwork:
    """Quotient network whose nodes are communities.

    ``weights[I, K]`` is the number of links between communities I and K (zero
    diagonal). ``links[k, I]`` is the number of links from node ``k`` into
    community ``I``; the column of k's own community holds its in-degree.
    """

    weights: np.ndarray
    links: csr_matrix

    def has_inter_links(self) -> bool:
        return bool(self.weights.any())


def build_community_weighted_network(graph: Graph, partition: Partition) -> CommunityWeightedNetwork:
    _check(graph, partition)
    mask = graph.active_edge_mask()
    rows, cols = graph.rows[mask], graph.indices[mask]
    crow, ccol = partition.community_of[rows], partition.community_of[cols]
    c = partition.count
    weights = np.zeros((c, c))
    inter = crow != ccol
    # each undirected link appears twice in CSR, once per direction
    np.add.at(weights, (crow[inter], ccol[inter]), 1.0)
    links = csr_matrix((np.ones(len(rows)), (rows, ccol)), shape=(graph.n, c))
    links.sum_duplicates()
    return CommunityWeightedNetwork(weights=weights, links=links)


def detect_communities_label_propagation(graph: Graph, seed: int = 0, max_sweeps: int = 100) -> Partition:
    """Asynchronous label propagation in a random node order per sweep.

    Each node adopts the most frequent label among its active neighbours, ties
    broken uniformly at random (keeping the current label when it is among
    the tied ones). Stops at a fixpoint or after ``max_sweeps`` sweeps. Removed
    nodes keep singleton labels.
    """
    rng = np.random.default_rng(seed)
    adj = graph.adjacency_lists()
    labels = list(range(graph.n))
    nodes = graph.active_nodes()
    for _ in range(max_sweeps):
        changed = False
        for v in rng.permutation(nodes).tolist():
            nbrs = adj[v]
            if not nbrs:
                continue
            counts: dict[int, int] = {}
            for u in nbrs:
                counts[labels[u]] = counts.get(labels[u], 0) + 1
            best = max(counts.values())
            tied = sorted(lab for lab, cnt in counts.items() if cnt == best)
            if labels[v] in tied:
                continue
            labels[v] = tied[int(rng.integers(len(tied)))]
            changed = True
        if not changed:
            break
    return Partition(labels)


def load_partition(path, graph: Graph) -> Partition:
    """Read ``node_label community_id`` lines; every graph node must appear once."""
    index = {graph.label(v): v for v in range(graph.n)}
    community = np.full(graph.n, -1, dtype=np.int64)
    ids: dict[str, int] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'node community', got {line!r}")
            if parts[0] not in index:
                raise ValueError(f"{path}:{lineno}: unknown node label {parts[0]!r}")
            v = index[parts[0]]
            if community[v] >= 0:
                raise ValueError(f"{path}:{lineno}: node {parts[0]!r} assigned twice")
            community[v] = ids.setdefault(parts[1], len(ids))
    missing = np.flatnonzero(community < 0)
    if len(missing):
        raise ValueError(f"node {graph.label(int(missing[0]))!r} has no community in {path}")
    return Partition(community)


def write_partition(graph: Graph, partition: Partition, path, header=()) -> None:
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for v in range(graph.n):
            fh.write(f"{graph.label(v)} {partition.community_of[v]}\n")
