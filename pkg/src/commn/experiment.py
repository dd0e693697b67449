"""Immunization sweeps: infected size and largest component against the
removed fraction g, for every strategy on a set of networks."""
from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .centrality import betweenness_centrality, degree_centrality, mod_centrality
from .community import Partition, detect_communities_label_propagation, load_partition
from .epidemic import SirParams, run_sir_ensemble
from .graph import Graph, largest_connected_component_size, load_edge_list
from .immunization import (
    ImmunizationPlan,
    StochasticParams,
    immunize_acquaintance,
    immunize_cbf,
    immunize_commn,
    immunize_sequential,
    immunize_static,
    removal_count,
)
from .lfr import LfrParams, generate_lfr

log = logging.getLogger(__name__)

# position in this tuple is the strategy's seed key; append only
STRATEGIES = ("degree", "betweenness", "mod", "commn", "acquaintance", "cbf")
STOCHASTIC = frozenset({"acquaintance", "cbf"})
NEEDS_PARTITION = frozenset({"mod", "commn"})
CSV_HEADER = ("network_id", "strategy", "g", "metric", "mean", "std", "trials")


def default_g_grid(start=0.0, stop=0.5, step=0.05) -> tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def derive_seed(*keys: int) -> int:
    """Child seed for a path of integer keys, e.g. (master, network, strategy)."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint32)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    lfr: LfrParams | None = None
    edge_list: str | None = None
    partition: str | None = None
    strategies: tuple[str, ...] = STRATEGIES
    g_grid: tuple[float, ...] = field(default_factory=default_g_grid)
    sir: SirParams = SirParams()
    networks: int = 10
    trials: int = 20
    seed: int = 0
    output: str = "results"
    workers: int = 1
    mod_mode: str = "sequential"
    global_mode: str = "static"
    commn_r: float | None = None
    acquaintance_threshold: int = 1
    cbf_max_walk: int | None = None

    def __post_init__(self):
        if (self.lfr is None) == (self.edge_list is None):
            raise ValueError("give exactly one network source: LFR parameters or an edge list")
        if not self.strategies:
            raise ValueError("strategy list is empty")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies: {sorted(unknown)}")
        if any(not 0.0 <= g <= 1.0 for g in self.g_grid):
            raise ValueError("g values must lie in [0, 1]")
        if self.mod_mode not in ("static", "sequential") or self.global_mode not in ("static", "sequential"):
            raise ValueError("modes are 'static' or 'sequential'")
        if self.networks < 1 or self.trials < 1:
            raise ValueError("networks and trials must be >= 1")

    @property
    def network_count(self) -> int:
        return self.networks if self.lfr is not None else 1


@dataclass(frozen=True, order=True)
class ResultRow:
    network_id: int
    strategy: str
    g: float
    metric: str
    mean: float
    std: float
    trials: int

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("negative std")


# --- networks -------------------------------------------------------------

@lru_cache(maxsize=4)
def _network(source: tuple, index: int, seed: int) -> tuple[Graph, Partition | None]:
    kind = source[0]
    if kind == "lfr":
        params = LfrParams(**dict(source[1])).replace(seed=seed + index)
        return generate_lfr(params)
    _, edge_path, part_path, detect = source
    graph = load_edge_list(edge_path)
    if part_path:
        return graph, load_partition(part_path, graph)
    if detect:
        return graph, detect_communities_label_propagation(graph, seed=derive_seed(seed, index, 99))
    return graph, None


def _source_key(config: ExperimentConfig) -> tuple:
    if config.lfr is not None:
        return ("lfr", tuple(sorted((f.name, getattr(config.lfr, f.name)) for f in fields(config.lfr))))
    needs = bool(NEEDS_PARTITION & set(config.strategies))
    return ("file", config.edge_list, config.partition, needs and config.partition is None)


def load_network(config: ExperimentConfig, index: int) -> tuple[Graph, Partition | None]:
    return _network(_source_key(config), index, config.seed)


# --- plans ----------------------------------------------------------------

def build_plans(graph: Graph, partition: Partition | None, strategy: str, g_grid, config: ExperimentConfig,
                seed: int) -> dict[float, ImmunizationPlan]:
    """One plan per g value.

    Every strategy except Commn produces nested plans (the plan for a smaller
    count is a prefix of the plan for a larger one), so it is built once at
    the largest count and sliced.
    """
    if strategy in NEEDS_PARTITION and partition is None:
        raise ValueError(f"strategy {strategy!r} needs a community partition")
    n = graph.n_active
    counts = {g: removal_count(g, n) for g in g_grid}
    top = max(counts.values(), default=0)
    if strategy == "commn":
        return {g: immunize_commn(graph, partition, g, config.commn_r) for g in g_grid}
    if strategy in ("degree", "betweenness"):
        measure = degree_centrality if strategy == "degree" else betweenness_centrality
        if config.global_mode == "sequential":
            full = immunize_sequential(graph, measure, top, name=strategy)
        else:
            full = immunize_static(graph, measure(graph), top)
    elif strategy == "mod":
        if config.mod_mode == "sequential":
            full = immunize_sequential(graph, lambda h: mod_centrality(h, partition), top, name="mod")
        else:
            full = immunize_static(graph, mod_centrality(graph, partition), top)
    else:
        params = StochasticParams(seed=seed, acquaintance_threshold=config.acquaintance_threshold,
                                  cbf_max_walk=config.cbf_max_walk)
        make = immunize_acquaintance if strategy == "acquaintance" else immunize_cbf
        full = _pad(graph, make(graph, top, params), top, seed)
    return {g: full.prefix(c, g) for g, c in counts.items()}


def _pad(graph: Graph, plan: ImmunizationPlan, count: int, seed: int) -> ImmunizationPlan:
    """Fill a truncated stochastic plan with uniformly random remaining nodes,
    so every g removes exactly round(g * n) nodes."""
    if len(plan) >= count:
        return plan
    rng = np.random.default_rng(derive_seed(seed, 7))
    taken = set(plan.removal_order)
    rest = np.array([v for v in graph.active_nodes().tolist() if v not in taken], dtype=np.int64)
    extra = rng.permutation(rest)[:count - len(plan)].tolist()
    return ImmunizationPlan(plan.strategy, plan.removal_order + extra, plan.g, truncated=True)


# --- sweeps ---------------------------------------------------------------

def _infection_job(args) -> list[ResultRow]:
    config, net, strategy = args
    graph, partition = load_network(config, net)
    code = STRATEGIES.index(strategy)
    plans = build_plans(graph, partition, strategy, config.g_grid, config, derive_seed(config.seed, net, code, 1))
    sir_seed = derive_seed(config.seed, net, code, 2)
    rows = []
    for g in config.g_grid:
        remaining = plans[g].apply(graph)
        left = remaining.n_active
        if left == 0:
            totals = np.zeros(config.trials)
        else:
            res = run_sir_ensemble(remaining, replace(config.sir, seed=sir_seed), config.trials,
                                   keep_trajectories=False)
            totals = res.total_infected
        frac = totals / left if left else np.zeros_like(totals)
        rows.append(ResultRow(net, strategy, g, "total_infected", float(totals.mean()), float(totals.std()), config.trials))
        rows.append(ResultRow(net, strategy, g, "infected_fraction", float(frac.mean()), float(frac.std()), config.trials))
    return rows


def _lcc_job(args) -> list[ResultRow]:
    config, net, strategy = args
    graph, partition = load_network(config, net)
    code = STRATEGIES.index(strategy)
    base = derive_seed(config.seed, net, code, 1)
    reps = config.trials if strategy in STOCHASTIC else 1
    sizes = np.zeros((reps, len(config.g_grid)))
    for t in range(reps):
        plans = build_plans(graph, partition, strategy, config.g_grid, config, base + t)
        for j, g in enumerate(config.g_grid):
            sizes[t, j] = largest_connected_component_size(plans[g].apply(graph))
    rows = []
    for j, g in enumerate(config.g_grid):
        col = sizes[:, j]
        rows.append(ResultRow(net, strategy, g, "lcc_size", float(col.mean()), float(col.std()), reps))
        rows.append(ResultRow(net, strategy, g, "lcc_fraction", float(col.mean() / graph.n),
                              float(col.std() / graph.n), reps))
    return rows


def _run(job, config: ExperimentConfig) -> list[ResultRow]:
    tasks = [(config, net, s) for net in range(config.network_count) for s in config.strategies]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(job, tasks))
    else:
        chunks = [job(t) for t in tasks]
    order = {s: i for i, s in enumerate(config.strategies)}
    rows = [r for chunk in chunks for r in chunk]
    return sorted(rows, key=lambda r: (r.network_id, order[r.strategy], r.g, r.metric))


def sweep_infection(config: ExperimentConfig) -> list[ResultRow]:
    """SIR outbreak size after immunization, per network, strategy and g."""
    return _run(_infection_job, config)


def sweep_lcc(config: ExperimentConfig) -> list[ResultRow]:
    """Largest connected component after immunization, per network, strategy and g."""
    return _run(_lcc_job, config)


def aggregate(rows, metric: str) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Average a metric over networks: strategy -> (g, mean, pooled std)."""
    out = {}
    strategies = list(dict.fromkeys(r.strategy for r in rows if r.metric == metric))
    for s in strategies:
        sel = [r for r in rows if r.metric == metric and r.strategy == s]
        gs = sorted({r.g for r in sel})
        means, stds = [], []
        for g in gs:
            cell = [r for r in sel if r.g == g]
            mu = np.array([r.mean for r in cell])
            var = np.array([r.std for r in cell]) ** 2
            means.append(mu.mean())
            stds.append(np.sqrt(var.mean() + mu.var()))
        out[s] = (np.array(gs), np.array(means), np.array(stds))
    return out


# --- output ---------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.network_id, r.strategy, _fmt(r.g), r.metric, _fmt(r.mean), _fmt(r.std), r.trials])
    return buf.getvalue()


def emit_csv(rows, path) -> None:
    Path(path).write_text(rows_to_csv(rows))


def read_csv(path) -> list[ResultRow]:
    with open(path) as fh:
        reader = csv.DictReader(fh)
        return [ResultRow(int(d["network_id"]), d["strategy"], float(d["g"]), d["metric"],
                          float(d["mean"]), float(d["std"]), int(d["trials"])) for d in reader]


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def emit_svg_curves(rows, path, metric: str | None = None, width: int = 640, height: int = 420) -> None:
    """Line chart of a metric against g, one polyline per strategy (averaged over networks)."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    metric = metric or rows[0].metric
    curves = aggregate(rows, metric)
    if not curves:
        raise ValueError(f"no rows for metric {metric!r}")
    left, right, top, bottom = 60, 130, 20, 50
    pw, ph = width - left - right, height - top - bottom
    gmax = max(c[0].max() for c in curves.values()) or 1.0
    ymax = max(c[1].max() for c in curves.values()) or 1.0

    def xy(g, y):
        return left + pw * g / gmax, top + ph * (1 - y / ymax)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for i in range(6):
        gx, _ = xy(gmax * i / 5, 0)
        _, yy = xy(0, ymax * i / 5)
        out.append(f'<text x="{gx:.1f}" y="{top + ph + 16}" text-anchor="middle">{gmax * i / 5:.2f}</text>')
        out.append(f'<text x="{left - 6}" y="{yy + 4:.1f}" text-anchor="end">{ymax * i / 5:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">g (fraction removed)</text>')
    out.append(f'<text x="15" y="{top + ph / 2}" text-anchor="middle" transform="rotate(-90 15 {top + ph / 2})">{metric}</text>')
    for i, (name, (gs, means, _)) in enumerate(curves.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join("{:.2f},{:.2f}".format(*xy(g, y)) for g, y in zip(gs, means))
        out.append(f'<polyline class="curve" data-strategy="{name}" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


# --- configuration --------------------------------------------------------

_LFR_KEYS = {f.name for f in fields(LfrParams)} - {"seed"}
_SIR_KEYS = {"lam", "sigma", "initial_infected", "max_steps"}


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _number(value: str):
    value = str(value).strip()
    try:
        return int(value)
    except ValueError:
        return float(value)


def config_from_mapping(values: dict) -> ExperimentConfig:
    """Build a config from flat string (or already typed) values."""
    values = {k.replace("-", "_"): v for k, v in values.items() if v is not None}
    known = _LFR_KEYS | _SIR_KEYS | {f.name for f in fields(ExperimentConfig)} | {"g_min", "g_max", "g_step"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
    kw = {}
    lfr = {k: _number(values[k]) for k in _LFR_KEYS if k in values}
    if "edge_list" in values:
        kw["edge_list"] = str(values["edge_list"])
        if lfr:
            raise ValueError("LFR parameters given together with an edge list")
    else:
        for key in ("k_max", "c_min", "c_max", "n"):
            if key in lfr:
                lfr[key] = int(lfr[key])
        kw["lfr"] = LfrParams(**lfr)
    sir = {}
    if "lam" in values:
        sir["lam"] = float(values["lam"])
    if "sigma" in values:
        sir["sigma"] = float(values["sigma"])
    if "initial_infected" in values:
        sir["initial_infected"] = _number(values["initial_infected"])
    if "max_steps" in values:
        sir["max_steps"] = int(values["max_steps"])
    kw["sir"] = SirParams(**sir)
    if "g_grid" in values:
        grid = values["g_grid"]
        kw["g_grid"] = tuple(float(x) for x in (grid.split(",") if isinstance(grid, str) else grid))
    elif {"g_min", "g_max", "g_step"} & set(values):
        kw["g_grid"] = default_g_grid(float(values.get("g_min", 0.0)), float(values.get("g_max", 0.5)),
                                      float(values.get("g_step", 0.05)))
    if "strategies" in values:
        s = values["strategies"]
        kw["strategies"] = tuple(x.strip() for x in (s.split(",") if isinstance(s, str) else s) if x.strip())
    for key in ("networks", "trials", "seed", "workers", "acquaintance_threshold", "cbf_max_walk"):
        if key in values:
            kw[key] = int(values[key])
    for key in ("partition", "output", "mod_mode", "global_mode"):
        if key in values:
            kw[key] = str(values[key])
    if "commn_r" in values:
        kw["commn_r"] = float(values["commn_r"])
    return ExperimentConfig(**kw)
