"""Command-line entry point: ``commn <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from . import experiment as ex
from .centrality import MEASURES, rank
from .community import (
    community_mus,
    detect_communities_label_propagation,
    global_mixing,
    load_partition,
    write_partition,
)
from .epidemic import SirParams, run_sir_ensemble
from .graph import load_edge_list, remove_nodes, write_edge_list
from .immunization import (
    StochasticParams,
    immunize_acquaintance,
    immunize_cbf,
    immunize_commn,
    immunize_sequential,
    immunize_static,
    removal_count,
)
from .lfr import LfrParams, generate_lfr_with_report


def _csv_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_rows(path, header, rows):
    fh, close = _csv_out(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


def _partition(graph, path, required=True):
    if path:
        return load_partition(path, graph)
    if required:
        raise SystemExit("error: this measure needs --partition")
    return None


def cmd_generate(args):
    kw = {f.name: getattr(args, f.name) for f in fields(LfrParams) if getattr(args, f.name, None) is not None}
    params = LfrParams(**kw)
    graph, partition, report = generate_lfr_with_report(params)
    header = [f"{k}={v}" for k, v in asdict(params).items()]
    header.append(f"realized_mixing={report.achieved!r}")
    header.append(f"rewire_converged={report.converged}")
    write_edge_list(graph, f"{args.output}.edges", header)
    write_partition(graph, partition, f"{args.output}.communities", header)
    print(f"wrote {args.output}.edges ({graph.n} nodes, {graph.m} edges, mixing {report.achieved:.4f})", file=sys.stderr)


def cmd_detect(args):
    graph = load_edge_list(args.graph)
    part = detect_communities_label_propagation(graph, seed=args.seed)
    if args.output:
        write_partition(graph, part, args.output)
    else:
        for v in range(graph.n):
            print(f"{graph.label(v)} {part.community_of[v]}")


def cmd_partition_stats(args):
    graph = load_edge_list(args.graph)
    part = load_partition(args.partition, graph)
    mus = community_mus(graph, part)
    sizes = part.sizes(graph)
    rows = [(c, int(sizes[c]), repr(float(mus[c]))) for c in range(part.count)]
    _write_rows(args.output, ("community", "size", "mu"), rows)
    print(f"global mixing {global_mixing(graph, part):.4f}", file=sys.stderr)


def cmd_centrality(args):
    graph = load_edge_list(args.graph)
    part = _partition(graph, args.partition, required=args.measure in ex.NEEDS_PARTITION)
    if args.measure == "commn" and args.r is not None:
        from .centrality import commn_centrality
        scores = commn_centrality(graph, part, args.r)
    else:
        scores = MEASURES[args.measure](graph, part)
    position = {int(v): i + 1 for i, v in enumerate(rank(scores))}
    rows = [(graph.label(v), repr(float(s)), position[v]) for v, s in zip(scores.nodes.tolist(), scores.values)]
    _write_rows(args.output, ("node", "score", "rank"), rows)


def cmd_immunize(args):
    graph = load_edge_list(args.graph)
    if args.count is None and args.g is None:
        raise SystemExit("error: give --g or --count")
    count = args.count if args.count is not None else removal_count(args.g, graph.n_active)
    g = args.g if args.g is not None else count / graph.n_active
    s = args.strategy
    part = _partition(graph, args.partition, required=s in ex.NEEDS_PARTITION)
    stoch = StochasticParams(seed=args.seed, acquaintance_threshold=args.threshold, cbf_max_walk=args.max_walk)
    if s == "commn":
        plan = immunize_commn(graph, part, g)
    elif s == "acquaintance":
        plan = immunize_acquaintance(graph, count, stoch)
    elif s == "cbf":
        plan = immunize_cbf(graph, count, stoch)
    elif args.sequential or (s == "mod" and not args.static):
        plan = immunize_sequential(graph, lambda h: MEASURES[s](h, part), count, name=s)
    else:
        plan = immunize_static(graph, MEASURES[s](graph, part), count)
    _write_rows(args.output, ("order", "node"), [(i, graph.label(v)) for i, v in enumerate(plan.removal_order)])


def _read_plan(graph, path):
    index = {graph.label(v): v for v in range(graph.n)}
    with open(path) as fh:
        reader = csv.DictReader(fh)
        return [index[row["node"]] for row in reader]


def cmd_simulate(args):
    graph = load_edge_list(args.graph)
    if args.plan:
        graph = remove_nodes(graph, _read_plan(graph, args.plan))
    init = float(args.initial_infected) if "." in args.initial_infected else int(args.initial_infected)
    params = SirParams(args.lam, args.sigma, init, args.seed, args.max_steps)
    res = run_sir_ensemble(graph, params, args.trials, workers=args.workers)
    length = max(len(t.S) for t in res.trajectories)

    def padded(key):
        return np.array([np.pad(getattr(t, key), (0, length - len(t.S)), mode="edge") for t in res.trajectories]).mean(axis=0)

    S, I, R = padded("S"), padded("I"), padded("R")
    _write_rows(args.output, ("t", "S", "I", "R"),
                [(t, repr(float(S[t])), repr(float(I[t])), repr(float(R[t]))) for t in range(length)])
    summary = [(res.trials, repr(res.mean_total_infected), repr(res.std_total_infected),
                repr(res.mean_r_infinity), repr(res.std_r_infinity), repr(res.mean_steady_time))]
    _write_rows(args.summary, ("trials", "mean_TI", "std_TI", "mean_Rinf", "std_Rinf", "mean_steady_time"), summary)


_SWEEP_FLAGS = {
    "n": int, "k_avg": float, "k_max": int, "gamma": float, "beta": float, "mu": float,
    "c_min": int, "c_max": int, "mix_tolerance": float,
    "edge_list": str, "partition": str, "strategies": str, "g_grid": str,
    "g_min": float, "g_max": float, "g_step": float,
    "lam": float, "sigma": float, "initial_infected": str, "max_steps": int,
    "networks": int, "trials": int, "seed": int, "output": str, "workers": int,
    "mod_mode": str, "global_mode": str, "commn_r": float,
    "acquaintance_threshold": int, "cbf_max_walk": int,
}


def _sweep_config(args) -> ex.ExperimentConfig:
    values = ex.read_config_file(args.config) if args.config else {}
    for key in _SWEEP_FLAGS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return ex.config_from_mapping(values)


def _cmd_sweep(args, kind):
    config = _sweep_config(args)
    rows = ex.sweep_infection(config) if kind == "infection" else ex.sweep_lcc(config)
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    ex.emit_csv(rows, out / f"{kind}.csv")
    metric = "infected_fraction" if kind == "infection" else "lcc_size"
    ex.emit_svg_curves(rows, out / f"{kind}.svg", metric=metric)
    print(f"wrote {out / f'{kind}.csv'} ({len(rows)} rows)", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="commn", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate an LFR benchmark network")
    for f in fields(LfrParams):
        gen.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name,
                         type=type(f.default) if f.default is not None else float, default=None)
    gen.add_argument("-o", "--output", required=True, help="output prefix for .edges and .communities")
    gen.set_defaults(func=cmd_generate)

    det = sub.add_parser("detect", help="label-propagation communities")
    det.add_argument("graph")
    det.add_argument("--seed", type=int, default=0)
    det.add_argument("-o", "--output")
    det.set_defaults(func=cmd_detect)

    ps = sub.add_parser("partition-stats", help="per-community size and mu as CSV")
    ps.add_argument("graph")
    ps.add_argument("partition")
    ps.add_argument("-o", "--output")
    ps.set_defaults(func=cmd_partition_stats)

    cen = sub.add_parser("centrality", help="node scores as CSV node,score,rank")
    cen.add_argument("graph")
    cen.add_argument("--measure", choices=sorted(MEASURES), required=True)
    cen.add_argument("--partition")
    cen.add_argument("--r", type=float, help="global Commn scale (default: per-community max in-degree)")
    cen.add_argument("-o", "--output")
    cen.set_defaults(func=cmd_centrality)

    imm = sub.add_parser("immunize", help="removal plan as CSV order,node")
    imm.add_argument("graph")
    imm.add_argument("--strategy", choices=ex.STRATEGIES, required=True)
    imm.add_argument("--g", type=float)
    imm.add_argument("--count", type=int)
    imm.add_argument("--partition")
    imm.add_argument("--seed", type=int, default=0)
    imm.add_argument("--threshold", type=int, default=1, help="acquaintance pick threshold")
    imm.add_argument("--max-walk", type=int, default=None, help="CBF walk length cap")
    imm.add_argument("--sequential", action="store_true", help="recompute scores after every removal")
    imm.add_argument("--static", action="store_true", help="rank once (Mod defaults to sequential)")
    imm.add_argument("-o", "--output")
    imm.set_defaults(func=cmd_immunize)

    sim = sub.add_parser("simulate", help="SIR ensemble on a (possibly immunized) graph")
    sim.add_argument("graph")
    sim.add_argument("--plan", help="CSV order,node of nodes removed before t=0")
    sim.add_argument("--lam", type=float, default=0.1)
    sim.add_argument("--sigma", type=float, default=0.1)
    sim.add_argument("--initial-infected", default="0.01", help="count (int) or fraction (float)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--max-steps", type=int, default=1_000_000)
    sim.add_argument("--trials", type=int, default=1)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("-o", "--output", help="per-step mean trajectory CSV (default stdout)")
    sim.add_argument("--summary", help="summary CSV (default stdout)")
    sim.set_defaults(func=cmd_simulate)

    for kind in ("infection", "lcc"):
        sw = sub.add_parser(f"sweep-{kind}", help=f"{kind} curves against the removed fraction g")
        sw.add_argument("--config", help="flat key = value file; flags override it")
        for key, typ in _SWEEP_FLAGS.items():
            sw.add_argument(f"--{key.replace('_', '-')}", dest=key, type=typ, default=None)
        sw.set_defaults(func=lambda a, k=kind: _cmd_sweep(a, k))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
