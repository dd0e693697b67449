"""LFR-style benchmark graphs: power-law degrees, power-law community sizes,
and degree-preserving rewiring toward a target mixing level."""
from __future__ import annotations

import logging
from dataclasses import dataclass, asdict

import numpy as np

from .community import Partition, mu_limit
from .graph import Graph

log = logging.getLogger(__name__)

__all__ = [
    "LfrParams",
    "LfrError",
    "RewireReport",
    "sample_power_law_degrees",
    "configuration_model",
    "sample_community_sizes",
    "assign_nodes_to_communities",
    "rewire_to_mixing",
    "generate_lfr",
    "generate_lfr_with_report",
]


class LfrError(RuntimeError):
    """Raised when a generation step cannot satisfy its constraints."""


@dataclass(frozen=True)
class LfrParams:
    n: int = 7500
    k_avg: float = 10.0
    k_max: int = 180
    gamma: float = 3.0
    beta: float = 2.0
    mu: float = 0.2
    c_min: int = 5
    c_max: int = 180
    seed: int = 0
    mix_tolerance: float = 0.005

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.c_min <= self.c_max <= self.n:
            raise ValueError(f"need 1 <= c_min <= c_max <= n, got {self.c_min}, {self.c_max}, {self.n}")
        if not 1 <= self.k_max < self.n:
            raise ValueError("need 1 <= k_max < n")
        if self.gamma <= 1 or self.beta <= 1:
            raise ValueError("power-law exponents must exceed 1")
        if self.c_max < self.n and not 0 <= self.mu < mu_limit(self.n, self.c_max):
            raise ValueError(f"mu={self.mu} outside [0, {mu_limit(self.n, self.c_max):.4f})")
        if self.mix_tolerance < 0:
            raise ValueError("mix_tolerance must be non-negative")

    def replace(self, **kw) -> "LfrParams":
        return LfrParams(**{**asdict(self), **kw})


def _truncated_power_law(u: np.ndarray, lo: float, hi: float, exponent: float) -> np.ndarray:
    """Inverse-CDF transform of uniforms onto density ~ x^-exponent on [lo, hi)."""
    a = 1.0 - exponent
    if abs(a) < 1e-12:
        return lo * (hi / lo) ** u
    return (lo ** a + u * (hi ** a - lo ** a)) ** (1.0 / a)


def sample_power_law_degrees(params: LfrParams, rng=None) -> np.ndarray:
    """Integer degrees in [1, k_max] with P(k) ~ k^-gamma and mean near k_avg.

    The lower cutoff of the continuous law is found by bisection with the
    uniform draws held fixed, so the sample mean moves monotonically with it.
    The result is within 5% of ``k_avg`` and has an even sum.
    """
    rng = np.random.default_rng(params.seed) if rng is None else rng
    n, k_max = params.n, params.k_max
    u = rng.random(n)
    if k_max == 1:
        deg = np.ones(n, dtype=np.int64)
    else:
        def draw(x_min):
            return np.minimum(np.floor(_truncated_power_law(u, x_min, k_max + 1, params.gamma)), k_max).astype(np.int64)

        lo, hi = 1.0, float(k_max)
        if not draw(lo).mean() <= params.k_avg <= draw(hi).mean():
            raise LfrError(f"mean degree {params.k_avg} unreachable within [1, {k_max}]")
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if draw(mid).mean() < params.k_avg:
                lo = mid
            else:
                hi = mid
        deg = min((draw(lo), draw(hi)), key=lambda d: abs(d.mean() - params.k_avg))
        if abs(deg.mean() - params.k_avg) > 0.05 * params.k_avg:
            raise LfrError(f"could not match mean degree {params.k_avg} (got {deg.mean():.3f})")
    if deg.sum() % 2:
        # bump a node that still has room; fall back to lowering one
        room = np.flatnonzero(deg < k_max)
        if len(room):
            deg[room[rng.integers(len(room))]] += 1
        else:
            deg[rng.integers(n)] -= 1
    return deg


def configuration_model(degrees, seed=0, max_rounds: int = 100) -> Graph:
    """Simple graph by random stub matching.

    Stubs that would form a self-loop or a repeated edge are returned to a
    residual pool and reshuffled, up to ``max_rounds`` times; whatever is left
    after that is dropped (logged, not fatal).
    """
    rng = np.random.default_rng(seed)
    deg = np.asarray(degrees, dtype=np.int64)
    n = len(deg)
    if deg.sum() % 2:
        raise ValueError("degree sum must be even")
    stubs = np.repeat(np.arange(n), deg)
    seen: set[int] = set()
    edges = []
    for _ in range(max_rounds):
        if len(stubs) == 0:
            break
        stubs = rng.permutation(stubs)
        residual = []
        for a, b in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
            key = a * n + b if a < b else b * n + a
            if a == b or key in seen:
                residual += (a, b)
            else:
                seen.add(key)
                edges.append((a, b))
        stubs = np.asarray(residual, dtype=np.int64)
    if len(stubs):
        log.info("configuration model dropped %d unmatched stubs", len(stubs))
    return Graph.from_edges(n, edges)


def sample_community_sizes(params: LfrParams, rng=None, max_attempts: int = 1000) -> np.ndarray:
    """Community sizes in [c_min, c_max] with P(s) ~ s^-beta summing to n."""
    rng = np.random.default_rng(params.seed) if rng is None else rng
    n, lo, hi = params.n, params.c_min, params.c_max
    if n < lo:
        raise LfrError(f"n={n} smaller than c_min={lo}")
    for _ in range(max_attempts):
        sizes = []
        total = 0
        while total < n:
            s = int(np.floor(_truncated_power_law(rng.random(), lo, hi + 1, params.beta)))
            s = min(s, hi)
            sizes.append(s)
            total += s
        # shrink the last community so the total is exactly n
        sizes[-1] -= total - n
        if lo <= sizes[-1] <= hi:
            return np.asarray(sizes, dtype=np.int64)
    raise LfrError(f"could not split n={n} into sizes within [{lo}, {hi}] after {max_attempts} attempts")


def assign_nodes_to_communities(degrees, sizes, mu: float, seed=0, rng=None) -> Partition:
    """Place each node in a random community large enough for its internal degree.

    A node of degree k needs a community of size at least ceil((1 - mu) * k).
    Eligible communities with room are preferred; when all are full, a random
    member of a random eligible community is evicted and requeued.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    deg = np.asarray(degrees, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.int64)
    n = len(deg)
    if sizes.sum() != n:
        raise ValueError(f"community sizes sum to {sizes.sum()}, expected {n}")
    need = np.ceil((1.0 - mu) * deg - 1e-9).astype(np.int64)
    order = np.argsort(sizes, kind="stable")
    sorted_sizes = sizes[order]
    too_big = np.flatnonzero(need > sorted_sizes[-1])
    if len(too_big):
        v = int(too_big[0])
        raise LfrError(f"node {v} needs a community of size {need[v]}, largest is {sorted_sizes[-1]}")
    members: list[list[int]] = [[] for _ in sizes]
    community = np.full(n, -1, dtype=np.int64)
    queue = rng.permutation(n).tolist()
    steps = 0
    while queue:
        steps += 1
        if steps > 50 * n:
            raise LfrError(f"assignment did not settle; node {queue[-1]} still homeless")
        v = queue.pop()
        eligible = order[np.searchsorted(sorted_sizes, need[v]):]
        free = [c for c in eligible.tolist() if len(members[c]) < sizes[c]]
        if free:
            c = free[int(rng.integers(len(free)))]
        else:
            c = int(eligible[rng.integers(len(eligible))])
            i = int(rng.integers(len(members[c])))
            evicted = members[c][i]
            members[c][i] = members[c][-1]
            members[c].pop()
            community[evicted] = -1
            queue.append(evicted)
        members[c].append(v)
        community[v] = c
    return Partition(community)


@dataclass
class RewireReport:
    target: float
    initial: float
    achieved: float
    accepted: int
    attempts: int
    converged: bool


def rewire_to_mixing(graph: Graph, partition: Partition, mu: float, tolerance: float = 0.005,
                     seed=0, max_attempts: int | None = None, rng=None) -> tuple[Graph, RewireReport]:
    """Degree-preserving double-edge swaps toward a target global mixing.

    A swap (a, b), (c, d) -> (a, c), (b, d) is accepted only if the result is
    still simple and it strictly reduces |mixing - mu|. Candidates are drawn
    so that the new edge (a, c) moves mixing in the needed direction: when
    mixing is too high, a is an endpoint of a random inter-community edge and
    c a random member of a's community; when too low, (a, b) is intra and c
    is drawn from outside a's community. Stops once within ``tolerance`` or
    after ``max_attempts`` (default 200 * m) proposals.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    comm = partition.community_of.tolist()
    n = graph.n
    edges = [tuple(e) for e in graph.edges().tolist()]
    m = len(edges)
    if m == 0:
        return graph, RewireReport(mu, 0.0, 0.0, 0, 0, False)
    adj = [set(nb) for nb in graph.adjacency_lists()]
    index = {(min(u, v), max(u, v)): i for i, (u, v) in enumerate(edges)}
    is_inter = [comm[u] != comm[v] for u, v in edges]
    pools = ([i for i in range(m) if not is_inter[i]], [i for i in range(m) if is_inter[i]])
    slot = [0] * m
    for pool in pools:
        for p, i in enumerate(pool):
            slot[i] = p
    members = [mem.tolist() for mem in partition.members]
    inter = len(pools[1])
    initial = inter / m
    budget = 200 * m if max_attempts is None else max_attempts
    accepted = attempts = 0

    def relabel(i, u, v):
        # swap-remove i from its pool, then file it under its new kind
        pool = pools[is_inter[i]]
        last = pool[-1]
        pool[slot[i]] = last
        slot[last] = slot[i]
        pool.pop()
        edges[i] = (u, v)
        index[(min(u, v), max(u, v))] = i
        is_inter[i] = comm[u] != comm[v]
        slot[i] = len(pools[is_inter[i]])
        pools[is_inter[i]].append(i)

    while abs(inter / m - mu) > tolerance and attempts < budget:
        attempts += 1
        too_high = inter / m > mu
        pool = pools[too_high]
        if not pool:
            break
        i = pool[int(rng.integers(len(pool)))]
        a, b = edges[i]
        if rng.random() < 0.5:
            a, b = b, a
        if too_high:
            group = members[comm[a]]
            c = group[int(rng.integers(len(group)))]
        else:
            c = int(rng.integers(n))
            if comm[c] == comm[a]:
                continue
        nbrs = adj[c]
        if c == a or c == b or not nbrs:
            continue
        d = list(nbrs)[int(rng.integers(len(nbrs)))]
        if d == a or d == b or c in adj[a] or d in adj[b]:
            continue
        j = index[(min(c, d), max(c, d))]
        old = (comm[a] != comm[b]) + (comm[c] != comm[d])
        new = (comm[a] != comm[c]) + (comm[b] != comm[d])
        trial = inter - old + new
        if abs(trial / m - mu) >= abs(inter / m - mu):
            continue
        adj[a].discard(b); adj[b].discard(a); adj[c].discard(d); adj[d].discard(c)
        adj[a].add(c); adj[c].add(a); adj[b].add(d); adj[d].add(b)
        del index[(min(a, b), max(a, b))], index[(min(c, d), max(c, d))]
        relabel(i, a, c)
        relabel(j, b, d)
        inter = trial
        accepted += 1
    out = Graph.from_edges(n, edges, labels=graph.labels) if accepted else graph
    achieved = inter / m
    report = RewireReport(mu, initial, achieved, accepted, attempts, abs(achieved - mu) <= tolerance)
    if not report.converged:
        log.warning("rewiring stopped at mixing %.4f (target %.4f) after %d attempts", achieved, mu, attempts)
    return out, report


def generate_lfr(params: LfrParams) -> tuple[Graph, Partition]:
    """Degrees, configuration model, community sizes, assignment, rewiring.

    Every step draws from one generator seeded with ``params.seed``. Size
    lists are redrawn until the largest community can host the largest
    internal degree.
    """
    graph, partition, _ = generate_lfr_with_report(params)
    return graph, partition


def generate_lfr_with_report(params: LfrParams) -> tuple[Graph, Partition, RewireReport]:
    rng = np.random.default_rng(params.seed)
    deg = sample_power_law_degrees(params, rng=rng)
    graph = configuration_model(deg, seed=rng)
    deg = graph.degrees()
    need = int(np.ceil((1.0 - params.mu) * deg.max() - 1e-9)) if len(deg) else 0
    for _ in range(1000):
        sizes = sample_community_sizes(params, rng=rng)
        if sizes.max() >= need:
            break
    else:
        raise LfrError(f"no size draw offers a community of {need} nodes for the largest hub")
    partition = assign_nodes_to_communities(deg, sizes, params.mu, rng=rng)
    graph, report = rewire_to_mixing(graph, partition, params.mu, params.mix_tolerance, rng=rng)
    return graph, partition, report
