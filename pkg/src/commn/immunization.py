"""Node-removal plans built from centrality rankings or random walks."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .centrality import CentralityScores, commn_centrality, rank
from .community import Partition
from .graph import Graph, remove_nodes

log = logging.getLogger(__name__)

__all__ = [
    "ImmunizationPlan",
    "StochasticParams",
    "removal_count",
    "apportion",
    "immunize_static",
    "immunize_sequential",
    "immunize_commn",
    "immunize_acquaintance",
    "immunize_cbf",
]


@dataclass
class ImmunizationPlan:
    strategy: str
    removal_order: list[int]
    g: float
    truncated: bool = False

    def __post_init__(self):
        if len(set(self.removal_order)) != len(self.removal_order):
            raise ValueError("plan contains a node twice")

    def __len__(self) -> int:
        return len(self.removal_order)

    def apply(self, graph: Graph) -> Graph:
        return remove_nodes(graph, self.removal_order)

    def prefix(self, count: int, g: float | None = None) -> "ImmunizationPlan":
        return ImmunizationPlan(self.strategy, self.removal_order[:count],
                                count / max(1, len(self.removal_order)) if g is None else g)


@dataclass(frozen=True)
class StochasticParams:
    seed: int = 0
    acquaintance_threshold: int = 1
    cbf_max_walk: int | None = None  # defaults to 10 * n steps per walk
    max_draws: int | None = None  # total sampling budget; defaults to 1000 * n

    def __post_init__(self):
        if self.acquaintance_threshold < 1:
            raise ValueError("acquaintance threshold must be >= 1")


def removal_count(g: float, n: int) -> int:
    """round(g * n), halves rounded up."""
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"g must lie in [0, 1], got {g}")
    return int(np.floor(g * n + 0.5 + 1e-9))


def apportion(total: int, sizes) -> np.ndarray:
    """Largest-remainder split of ``total`` proportional to ``sizes``.

    Equal remainders go to the lower index first.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    whole = sizes.sum()
    if total > whole:
        raise ValueError(f"cannot remove {total} of {whole} nodes")
    if total == 0 or whole == 0:
        return np.zeros(len(sizes), dtype=np.int64)
    # exact integer arithmetic: quota_c = total * size_c / whole
    num = total * sizes
    base = num // whole
    rem = num - base * whole
    left = total - int(base.sum())
    order = np.lexsort((np.arange(len(sizes)), -rem))
    base[order[:left]] += 1
    return base


def immunize_static(graph: Graph, scores: CentralityScores, count: int, g: float | None = None) -> ImmunizationPlan:
    if count > graph.n_active:
        raise ValueError(f"cannot remove {count} of {graph.n_active} active nodes")
    order = rank(scores)[:count].tolist()
    return ImmunizationPlan(scores.measure, order, count / graph.n if g is None else g)


def immunize_sequential(graph: Graph, measure: Callable[[Graph], CentralityScores], count: int,
                        name: str | None = None, g: float | None = None) -> ImmunizationPlan:
    """Remove the top node, recompute ``measure`` on what is left, repeat."""
    if count > graph.n_active:
        raise ValueError(f"graph exhausted: cannot remove {count} of {graph.n_active} active nodes")
    current = graph
    order = []
    label = name
    for _ in range(count):
        scores = measure(current)
        label = label or scores.measure
        top = int(rank(scores)[0])
        order.append(top)
        current = remove_nodes(current, [top])
    return ImmunizationPlan(label or "sequential", order, count / graph.n if g is None else g)


def immunize_commn(graph: Graph, partition: Partition, g: float, r: float | None = None) -> ImmunizationPlan:
    """Commn removal with per-community budgets and recalculation.

    The budget ``round(g * n_active)`` is split over communities in proportion
    to their size. At each step Commn is recomputed on the current graph and
    the best-ranked node among communities with budget left is removed.
    """
    total = removal_count(g, graph.n_active)
    budgets = apportion(total, partition.sizes(graph))
    comm = partition.community_of
    current = graph
    order = []
    for _ in range(total):
        scores = commn_centrality(current, partition, r)
        open_ = budgets[comm[scores.nodes]] > 0
        cand = CentralityScores("commn", scores.nodes[open_], scores.values[open_])
        top = int(rank(cand)[0])
        order.append(top)
        budgets[comm[top]] -= 1
        current = remove_nodes(current, [top])
    return ImmunizationPlan("commn", order, g)


def immunize_acquaintance(graph: Graph, count: int, params: StochasticParams = StochasticParams(),
                          g: float | None = None) -> ImmunizationPlan:
    """Random acquaintance: a random neighbour of a random node gets a vote;
    nodes reaching ``acquaintance_threshold`` votes are immunized in that order."""
    rng = np.random.default_rng(params.seed)
    adj = graph.adjacency_lists()
    nodes = graph.active_nodes()
    if graph.m == 0 and count > 0:
        raise ValueError("acquaintance immunization needs a graph with edges")
    votes: dict[int, int] = {}
    planned: list[int] = []
    seen: set[int] = set()
    budget = params.max_draws or 1000 * graph.n
    draws = 0
    while len(planned) < count and draws < budget:
        draws += 1
        v0 = int(nodes[rng.integers(len(nodes))])
        if not adj[v0]:
            continue
        v1 = adj[v0][int(rng.integers(len(adj[v0])))]
        votes[v1] = votes.get(v1, 0) + 1
        if votes[v1] >= params.acquaintance_threshold and v1 not in seen:
            seen.add(v1)
            planned.append(v1)
    truncated = len(planned) < count
    if truncated:
        log.warning("acquaintance plan truncated at %d of %d nodes", len(planned), count)
    return ImmunizationPlan("acquaintance", planned, count / graph.n if g is None else g, truncated)


def immunize_cbf(graph: Graph, count: int, params: StochasticParams = StochasticParams(),
                 g: float | None = None) -> ImmunizationPlan:
    """Community bridge finder.

    A walk starts at a random node and moves to uniformly chosen neighbours,
    never straight back to the previous node unless it is the only
    neighbour. From the second step on, a node with at most one link into
    the walk's visited set is taken as a bridge: it is planned (unless it
    already is) and a new walk starts. Walks longer than ``cbf_max_walk``
    steps are abandoned.
    """
    rng = np.random.default_rng(params.seed)
    adj = graph.adjacency_lists()
    nodes = graph.active_nodes()
    if graph.m == 0 and count > 0:
        raise ValueError("CBF needs a graph with edges")
    max_walk = params.cbf_max_walk or 10 * graph.n
    budget = params.max_draws or 1000 * graph.n
    planned: list[int] = []
    seen: set[int] = set()
    steps = 0
    while len(planned) < count and steps < budget:
        start = int(nodes[rng.integers(len(nodes))])
        steps += 1
        if not adj[start]:
            continue
        visited = {start}
        prev, cur = -1, start
        for i in range(1, max_walk + 1):
            steps += 1
            nbrs = adj[cur]
            if len(nbrs) > 1 and prev >= 0:
                nxt = nbrs[int(rng.integers(len(nbrs) - 1))]
                if nxt == prev:
                    nxt = nbrs[-1]
            else:
                nxt = nbrs[int(rng.integers(len(nbrs)))]
            prev, cur = cur, nxt
            if i >= 2 and cur not in seen:
                back = sum(1 for u in adj[cur] if u in visited)
                if back <= 1:
                    seen.add(cur)
                    planned.append(cur)
                    break
            visited.add(cur)
    truncated = len(planned) < count
    if truncated:
        log.warning("CBF plan truncated at %d of %d nodes", len(planned), count)
    return ImmunizationPlan("cbf", planned, count / graph.n if g is None else g, truncated)
