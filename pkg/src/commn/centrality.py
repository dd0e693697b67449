"""Node centrality measures: degree, betweenness, Mod and Commn."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .community import Partition, build_community_weighted_network, community_mus, split_degrees
from .graph import Graph

log = logging.getLogger(__name__)

__all__ = [
    "CentralityScores",
    "degree_centrality",
    "betweenness_centrality",
    "leading_eigenvector",
    "mod_centrality",
    "commn_score",
    "commn_centrality",
    "rank",
    "MEASURES",
]


@dataclass(frozen=True)
class CentralityScores:
    """Scores of the active nodes of a graph.

    ``values[i]`` is the score of node ``nodes[i]``; ``nodes`` is ascending.
    """

    measure: str
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise ValueError("nodes and values differ in length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.measure}: non-finite score")

    @classmethod
    def from_array(cls, measure: str, graph: Graph, full: np.ndarray) -> "CentralityScores":
        nodes = graph.active_nodes()
        return cls(measure, nodes, np.asarray(full, dtype=float)[nodes])

    def __getitem__(self, node: int) -> float:
        i = np.searchsorted(self.nodes, node)
        if i == len(self.nodes) or self.nodes[i] != node:
            raise KeyError(node)
        return float(self.values[i])

    def __len__(self) -> int:
        return len(self.nodes)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.nodes.tolist(), self.values.tolist()))

    def ranking(self) -> np.ndarray:
        return rank(self)


def rank(scores) -> np.ndarray:
    """Nodes by descending score, ties by ascending node id.

    Accepts :class:`CentralityScores` or a plain ``{node: score}`` mapping.
    """
    if isinstance(scores, CentralityScores):
        nodes, values = scores.nodes, scores.values
    else:
        nodes = np.fromiter(scores.keys(), dtype=np.int64, count=len(scores))
        values = np.fromiter(scores.values(), dtype=float, count=len(scores))
    return nodes[np.lexsort((nodes, -values))]


def degree_centrality(graph: Graph) -> CentralityScores:
    return CentralityScores.from_array("degree", graph, graph.degrees())


def betweenness_centrality(graph: Graph) -> CentralityScores:
    """Unnormalised shortest-path betweenness over unordered pairs (Brandes).

    Endpoints are excluded; unreachable pairs contribute nothing.
    """
    n = graph.n
    adj = graph.adjacency_lists()
    bc = [0.0] * n
    for s in graph.active_nodes().tolist():
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    # every unordered pair was counted from both ends
    return CentralityScores.from_array("betweenness", graph, np.asarray(bc) / 2.0)


def leading_eigenvector(weights: np.ndarray, tol: float = 1e-10, max_iter: int = 200_000) -> np.ndarray:
    """Non-negative unit-norm leading eigenvector of a symmetric non-negative matrix.

    Power iteration on ``W + I`` from the uniform vector; the shift keeps the
    Perron root strictly dominant when ``W`` is bipartite. Stops when the
    residual ``||W u - (u.W u) u||`` drops below ``tol``.
    """
    w = np.asarray(weights, dtype=float)
    k = len(w)
    if k == 0:
        raise ValueError("empty matrix")
    scale = w.max() if w.size and w.max() > 0 else 1.0
    a = w / scale
    u = np.full(k, 1.0 / np.sqrt(k))
    for _ in range(max_iter):
        au = a @ u
        resid = np.linalg.norm(au - (u @ au) * u)
        if resid < tol:
            break
        u = au + u
        u /= np.linalg.norm(u)
    else:
        log.warning("power iteration stopped at residual %.3g after %d steps", resid, max_iter)
    return np.abs(u)


def mod_centrality(graph: Graph, partition: Partition) -> CentralityScores:
    """Importance through links into important communities.

    With ``u`` the leading eigenvector of the community-weighted network, node
    ``k`` in community ``K`` scores ``2 u_K * sum_{I != K} d_kI u_I`` where
    ``d_kI`` counts k's links into community I. If no inter-community link
    remains, nodes score their in-degree instead.
    """
    if partition.count == 0:
        raise ValueError("empty partition")
    net = build_community_weighted_network(graph, partition)
    comm = partition.community_of
    if not net.has_inter_links():
        k_in, _ = split_degrees(graph, partition)
        return CentralityScores.from_array("mod", graph, k_in)
    u = leading_eigenvector(net.weights)
    mask = graph.active_edge_mask()
    rows, cols = graph.rows[mask], graph.indices[mask]
    inter = comm[rows] != comm[cols]
    reach = np.bincount(rows[inter], weights=u[comm[cols[inter]]], minlength=graph.n)
    return CentralityScores.from_array("mod", graph, 2.0 * u[comm] * reach)


def commn_score(k_in, k_out, mu, max_in, max_out, r):
    """Commn value from in/out degree, community cohesion and normalisers.

    ``(1 + mu) * (k_in / max_in * r) + (1 - mu) * (k_out / max_out * r) ** 2``,
    where a term whose normaliser is zero is taken as zero. Works elementwise
    on arrays.
    """
    k_in, k_out = np.asarray(k_in, dtype=float), np.asarray(k_out, dtype=float)
    max_in, max_out = np.asarray(max_in, dtype=float), np.asarray(max_out, dtype=float)
    inner = np.divide(k_in, max_in, out=np.zeros(np.broadcast(k_in, max_in).shape), where=max_in > 0)
    outer = np.divide(k_out, max_out, out=np.zeros(np.broadcast(k_out, max_out).shape), where=max_out > 0)
    return (1.0 + mu) * inner * r + (1.0 - mu) * (outer * r) ** 2


def commn_centrality(graph: Graph, partition: Partition, r: float | None = None) -> CentralityScores:
    """Community hub/bridge centrality.

    In-degree and squared out-degree are each normalised by their community
    maximum, scaled by ``r`` and weighted by ``1 + mu_C`` and ``1 - mu_C``
    respectively, ``mu_C`` being the community's mean out-link fraction. ``r``
    defaults to each community's maximum in-degree, floored at 1.
    """
    if r is not None and r < 1:
        raise ValueError("r must be >= 1")
    k_in, k_out = split_degrees(graph, partition)
    comm = partition.community_of
    act = graph.active
    max_in = np.zeros(partition.count, dtype=np.int64)
    max_out = np.zeros(partition.count, dtype=np.int64)
    np.maximum.at(max_in, comm[act], k_in[act])
    np.maximum.at(max_out, comm[act], k_out[act])
    mus = np.nan_to_num(community_mus(graph, partition, k_in, k_out))
    scale = np.maximum(max_in, 1) if r is None else np.full(partition.count, float(r))
    cc = commn_score(k_in, k_out, mus[comm], max_in[comm], max_out[comm], scale[comm])
    return CentralityScores.from_array("commn", graph, cc)


MEASURES = {
    "degree": lambda graph, partition=None: degree_centrality(graph),
    "betweenness": lambda graph, partition=None: betweenness_centrality(graph),
    "mod": lambda graph, partition: mod_centrality(graph, partition),
    "commn": lambda graph, partition: commn_centrality(graph, partition),
}
