"""Discrete-time SIR on graphs and the degree-class mean-field equations."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import Graph

log = logging.getLogger(__name__)

__all__ = [
    "SirParams",
    "SirTrajectory",
    "EnsembleResult",
    "DegreeDistribution",
    "MeanFieldResult",
    "run_sir",
    "run_sir_ensemble",
    "r_infinity",
    "degree_distribution",
    "epidemic_threshold",
    "integrate_mean_field",
]


@dataclass(frozen=True)
class SirParams:
    """Per-step transmission probability ``lam`` along each S-I link and
    per-step recovery probability ``sigma``.

    ``initial_infected`` is a node count when it is an int and a fraction of
    the active nodes when it is a float (at least one node either way).
    ``initial_nodes`` pins the seed nodes instead of drawing them.
    """

    lam: float = 0.1
    sigma: float = 0.1
    initial_infected: int | float = 0.01
    seed: int = 0
    max_steps: int = 1_000_000
    initial_nodes: tuple | None = None

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0 and 0.0 <= self.sigma <= 1.0):
            raise ValueError("lam and sigma must be probabilities")
        if isinstance(self.initial_infected, float):
            if not 0.0 < self.initial_infected <= 1.0:
                raise ValueError("initial infected fraction must be in (0, 1]")
        elif self.initial_infected < 1:
            raise ValueError("need at least one initially infected node")

    def seed_count(self, n_active: int) -> int:
        if self.initial_nodes is not None:
            return len(self.initial_nodes)
        if isinstance(self.initial_infected, float):
            return max(1, int(round(self.initial_infected * n_active)))
        return int(self.initial_infected)


@dataclass
class SirTrajectory:
    S: np.ndarray
    I: np.ndarray
    R: np.ndarray
    total_infected: int
    halted: bool

    @property
    def steady_state_time(self) -> int:
        return len(self.S) - 1


@dataclass
class EnsembleResult:
    trials: int
    mean_total_infected: float
    std_total_infected: float
    mean_r_infinity: float
    std_r_infinity: float
    mean_steady_time: float
    total_infected: np.ndarray
    trajectories: list[SirTrajectory] = field(repr=False, default_factory=list)


def run_sir(graph: Graph, params: SirParams) -> SirTrajectory:
    """Synchronous SIR over the active nodes.

    Each step every infected node infects each susceptible neighbour with
    probability ``lam`` (independently per link), then every node that was
    infected before the step recovers with probability ``sigma``. Nodes
    infected during a step neither transmit nor recover until the next one.
    Runs until no node is infected or ``max_steps`` is hit.
    """
    rng = np.random.default_rng(params.seed)
    nodes = graph.active_nodes()
    k = params.seed_count(len(nodes))
    if k > len(nodes):
        raise ValueError(f"cannot seed {k} infections among {len(nodes)} active nodes")
    indptr, indices, active = graph.indptr, graph.indices, graph.active
    # 0 susceptible, 1 infected, 2 recovered
    state = np.zeros(graph.n, dtype=np.int8)
    if params.initial_nodes is not None:
        infected = np.unique(np.asarray(params.initial_nodes, dtype=np.int64))
        if len(infected) != k or not graph.active[infected].all():
            raise ValueError("initial nodes must be distinct active nodes")
    else:
        infected = np.sort(rng.choice(nodes, size=k, replace=False))
    state[infected] = 1
    n_act = len(nodes)
    s_hist, i_hist, r_hist = [n_act - k], [k], [0]
    s_count, r_count = n_act - k, 0
    total = k
    steps = 0
    while len(infected) and steps < params.max_steps:
        steps += 1
        starts, ends = indptr[infected], indptr[infected + 1]
        lens = ends - starts
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(lens.sum())
        targets = indices[offs]
        targets = targets[(state[targets] == 0) & active[targets]]
        if params.lam < 1.0:
            targets = targets[rng.random(len(targets)) < params.lam]
        new = np.unique(targets)
        recover = rng.random(len(infected)) < params.sigma
        state[new] = 1
        state[infected[recover]] = 2
        infected = np.sort(np.concatenate([infected[~recover], new]))
        total += len(new)
        s_count -= len(new)
        r_count += int(recover.sum())
        s_hist.append(s_count)
        i_hist.append(len(infected))
        r_hist.append(r_count)
    halted = len(infected) == 0
    if not halted:
        log.warning("SIR run stopped at max_steps=%d with %d nodes still infected", params.max_steps, len(infected))
    return SirTrajectory(np.asarray(s_hist), np.asarray(i_hist), np.asarray(r_hist), total, halted)


def r_infinity(trajectory: SirTrajectory) -> int:
    """Final number of recovered nodes of a halted run."""
    if not trajectory.halted:
        raise ValueError("trajectory has not reached its steady state")
    return int(trajectory.R[-1])


def _one_trial(args):
    graph, params = args
    return run_sir(graph, params)


def run_sir_ensemble(graph: Graph, params: SirParams, trials: int, workers: int = 1,
                     keep_trajectories: bool = True) -> EnsembleResult:
    """Repeat :func:`run_sir` with seeds ``params.seed + trial``.

    Aggregates are computed in trial order, so they do not depend on how the
    trials were scheduled across ``workers`` processes.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(graph, _with_seed(params, params.seed + t)) for t in range(trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            runs = list(pool.map(_one_trial, jobs))
    else:
        runs = [_one_trial(job) for job in jobs]
    ti = np.array([r.total_infected for r in runs], dtype=float)
    rinf = np.array([r.R[-1] for r in runs], dtype=float)
    steady = np.array([r.steady_state_time for r in runs], dtype=float)
    return EnsembleResult(
        trials=trials,
        mean_total_infected=float(ti.mean()),
        std_total_infected=float(ti.std()),
        mean_r_infinity=float(rinf.mean()),
        std_r_infinity=float(rinf.std()),
        mean_steady_time=float(steady.mean()),
        total_infected=ti,
        trajectories=runs if keep_trajectories else [],
    )


def _with_seed(params: SirParams, seed: int) -> SirParams:
    return replace(params, seed=seed)


@dataclass(frozen=True)
class DegreeDistribution:
    degrees: np.ndarray  # distinct degree classes, ascending
    probs: np.ndarray  # P(k) for each class

    def __post_init__(self):
        if len(self.degrees) != len(self.probs) or not np.isclose(self.probs.sum(), 1.0):
            raise ValueError("probabilities must match degree classes and sum to 1")

    @classmethod
    def from_degrees(cls, degrees) -> "DegreeDistribution":
        ks, counts = np.unique(np.asarray(degrees, dtype=np.int64), return_counts=True)
        return cls(ks, counts / counts.sum())

    @property
    def mean(self) -> float:
        return float((self.degrees * self.probs).sum())

    @property
    def second_moment(self) -> float:
        return float((self.degrees.astype(float) ** 2 * self.probs).sum())


def degree_distribution(graph: Graph) -> DegreeDistribution:
    return DegreeDistribution.from_degrees(graph.degrees()[graph.active])


def epidemic_threshold(dist: DegreeDistribution) -> float:
    """<k> / <k^2> for an uncorrelated network."""
    if dist.second_moment <= 0:
        raise ValueError("threshold undefined on an edgeless network")
    return dist.mean / dist.second_moment


@dataclass
class MeanFieldResult:
    t: np.ndarray
    degrees: np.ndarray
    S: np.ndarray  # shape (len(t), len(degrees))
    I: np.ndarray
    R: np.ndarray

    def totals(self, dist: DegreeDistribution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Population fractions, weighting each class by P(k)."""
        return self.S @ dist.probs, self.I @ dist.probs, self.R @ dist.probs


def integrate_mean_field(dist: DegreeDistribution, lam: float, sigma: float, dt: float = 0.01,
                         horizon: float = 100.0, initial_infected=0.01, tol: float = 1e-6) -> MeanFieldResult:
    """Forward-Euler integration of the degree-class SIR equations.

    dS_k/dt = -k lam S_k Theta, dI_k/dt = k lam S_k Theta - sigma I_k,
    dR_k/dt = sigma I_k, with Theta = sum_l l P(l) I_l / <k> for an
    uncorrelated network. ``initial_infected`` is a scalar or one value per
    degree class. Raises if a class leaves [0, 1] or S+I+R drifts from 1 by
    more than ``tol`` per unit time.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    k = dist.degrees.astype(float)
    p = dist.probs
    mean_k = dist.mean
    steps = int(round(horizon / dt))
    i0 = np.broadcast_to(np.asarray(initial_infected, dtype=float), k.shape).copy()
    s, i, r = 1.0 - i0, i0, np.zeros_like(k)
    S = np.empty((steps + 1, len(k)))
    I = np.empty_like(S)
    R = np.empty_like(S)
    S[0], I[0], R[0] = s, i, r
    for step in range(1, steps + 1):
        theta = (k * p * i).sum() / mean_k if mean_k > 0 else 0.0
        infect = k * lam * s * theta
        recover = sigma * i
        s = s - dt * infect
        i = i + dt * (infect - recover)
        r = r + dt * recover
        S[step], I[step], R[step] = s, i, r
        drift = np.abs(s + i + r - 1.0).max()
        if drift > tol * max(1.0, step * dt) or min(s.min(), i.min()) < -1e-12:
            raise FloatingPointError(f"integration unstable at t={step * dt:.4g} (dt={dt} too large?)")
    return MeanFieldResult(np.arange(steps + 1) * dt, dist.degrees, S, I, R)
