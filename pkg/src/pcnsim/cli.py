"""Command-line entry point.

Amounts and capacities are given in satoshi on the command line and
converted to millisatoshi internally; fractional satoshi are printed with
three decimals. Exit codes: 0 success, 2 usage or parameter error, 3 input
data (snapshot) error.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

from . import metrics as metrics_mod
from . import simulate, snapshot
from .graph import MSAT_PER_SAT, build_fee_graph, peer_degrees
from . import centrality
from .routing import find_route
from .simulate import ExperimentSpec
from .strategies import STRATEGIES, AttachmentRequest, run_strategy

BENCH_ORDER = ["degree", "k-center", "k-median", "betweenness", "mbi"]


def _sat(msat: int) -> str:
    return f"{msat / MSAT_PER_SAT:.3f}"


def _parse_k_values(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x]


def _load_graph(args):
    if getattr(args, "synth", None):
        return simulate.synth_graph(args.synth, seed=args.seed,
                                    capacity_msat=args.synth_cap * MSAT_PER_SAT)
    if not args.snapshot:
        raise ValueError("either --snapshot or --synth is required")
    with open(args.snapshot, "rb") as fh:
        doc = snapshot.parse_snapshot(fh.read())
    g = snapshot.to_network(doc, balance_mode=args.balance_mode)
    return snapshot.largest_component(g)


def _write_or_print(records, out_path):
    text = metrics_mod.records_to_csv(records)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_ingest_check(args) -> int:
    with open(args.snapshot, "rb") as fh:
        doc = snapshot.parse_snapshot(fh.read())
    g = snapshot.to_network(doc, balance_mode=args.balance_mode)
    lcc = snapshot.largest_component(g)
    print(f"nodes={g.node_count()} channels={g.channel_count()} "
          f"lcc_nodes={lcc.node_count()} lcc_channels={lcc.channel_count()}")
    return 0


def cmd_suggest(args) -> int:
    g = _load_graph(args)
    req = AttachmentRequest(
        graph=g, joining=simulate.JOINER_ID, k=args.k,
        cap_msat=args.cap * MSAT_PER_SAT,
        amount_hint_msat=args.amount * MSAT_PER_SAT,
        rng_seed=args.seed,
    )
    result = run_strategy(args.strategy, req)
    for i, peer in enumerate(result.peers):
        if result.per_step_objective is not None:
            print(f"{i + 1} {peer} {result.per_step_objective[i]}")
        else:
            print(f"{i + 1} {peer}")
    return 0


def cmd_route(args) -> int:
    g = _load_graph(args)
    if not g.has_node(args.source) or not g.has_node(args.dest):
        raise ValueError("unknown source or destination node")
    route = find_route(g, args.source, args.dest, args.amount * MSAT_PER_SAT,
                       cltv_penalty_factor=args.cltv_penalty)
    if route is None:
        print("NoPath")
        return 0
    for i, hop in enumerate(route.hops):
        nxt = g.channels[hop.channel_id].peer(hop.from_node)
        fee_msat = (hop.amount_msat - route.hops[i + 1].amount_msat
                    if i + 1 < len(route.hops) else 0)
        print(f"hop {i + 1}: {hop.from_node} -> {nxt} via {hop.channel_id} "
              f"forward {_sat(hop.amount_msat)} sat fee {_sat(fee_msat)} sat")
    pct = 100.0 * route.total_fee_msat / route.amount_msat
    print(f"total sent {_sat(route.total_sent_msat)} sat "
          f"fee {_sat(route.total_fee_msat)} sat ({pct:.3f}%)")
    return 0


def cmd_baseline(args) -> int:
    g = _load_graph(args)
    spec = ExperimentSpec(kind="baseline", base_seed=args.seed,
                          baseline_tx=args.tx, retries=args.retries,
                          amounts_msat=[args.amount * MSAT_PER_SAT])
    record = simulate.run_baseline(spec, g)
    _write_or_print([record], args.out)
    return 0


def cmd_join_eval(args) -> int:
    g = _load_graph(args)
    spec = ExperimentSpec(
        kind="join_eval", strategy=args.strategy,
        k_values=_parse_k_values(args.k),
        amounts_msat=[a * MSAT_PER_SAT for a in args.amounts],
        tx_per_batch=args.tx, repetitions=args.reps, base_seed=args.seed,
        cap_msat=args.cap * MSAT_PER_SAT, retries=args.retries,
    )
    _write_or_print(simulate.run_join_eval(spec, g), args.out)
    return 0


def cmd_growth(args) -> int:
    g = _load_graph(args)
    spec = ExperimentSpec(
        kind="growth", strategy=args.strategy,
        amounts_msat=[args.amount * MSAT_PER_SAT],
        tx_per_batch=args.tx, repetitions=args.reps, base_seed=args.seed,
        cap_msat=args.cap * MSAT_PER_SAT, retries=args.retries,
        growth_nodes=args.nodes, growth_interval=args.interval,
        growth_k=args.k, allow_mbi_growth=args.allow_mbi,
    )
    _write_or_print(simulate.run_growth(spec, g), args.out)
    return 0


def cmd_metrics(args) -> int:
    g = _load_graph(args)
    amount = args.amount * MSAT_PER_SAT
    fg = build_fee_graph(g, amount)
    bc = centrality.betweenness(fg)
    n = g.node_count()
    record = metrics_mod.MetricRecord(
        label=f"metrics;amount_msat={amount}",
        degree_gini=metrics_mod.gini(peer_degrees(g).values()),
        betweenness_gini=metrics_mod.gini(bc.values()),
        diameter_hops=metrics_mod.diameter(g),
        central_point_dominance=metrics_mod.central_point_dominance(
            metrics_mod.normalize_betweenness(bc, n), n),
        seed=args.seed,
    )
    _write_or_print([record], args.out)
    return 0


def bench_cells(graph, strategies: list[str], k_values: list[int],
                cap_msat: int, amount_msat: int, seed: int, runs: int = 3):
    """Median wall-clock seconds per (strategy, k) plus the ordering verdict."""
    cells = []
    totals: dict[str, list[float]] = {}
    for name in strategies:
        if name not in STRATEGIES:
            raise ValueError(f"unknown strategy {name!r}")
        for k in k_values:
            req = AttachmentRequest(graph=graph, joining=simulate.JOINER_ID,
                                    k=k, cap_msat=cap_msat,
                                    amount_hint_msat=amount_msat, rng_seed=seed)
            samples = []
            for _ in range(runs):
                t0 = time.perf_counter()
                run_strategy(name, req)
                samples.append(time.perf_counter() - t0)
            sec = statistics.median(samples)
            cells.append((name, k, sec))
            totals.setdefault(name, []).append(sec)
    chain = [s for s in BENCH_ORDER if s in totals]
    means = [sum(totals[s]) / len(totals[s]) for s in chain]
    ordering_ok = all(means[i] < means[i + 1] for i in range(len(means) - 1))
    return cells, ordering_ok


def cmd_bench(args) -> int:
    strategies = [s for s in args.strategies.split(",") if s]
    if not strategies:
        raise ValueError("empty strategy list")
    g = _load_graph(args)
    cells, ordering_ok = bench_cells(
        g, strategies, _parse_k_values(args.k),
        cap_msat=args.cap * MSAT_PER_SAT,
        amount_msat=args.amount * MSAT_PER_SAT, seed=args.seed,
    )
    lines = ["strategy,k,seconds,ordering_ok"]
    for name, k, sec in cells:
        lines.append(f"{name},{k},{sec:.6f},")
    lines.append(f"ordering,,,{str(ordering_ok).lower()}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_input_args(p, snapshot_required=False):
    p.add_argument("--snapshot", required=snapshot_required, help="describegraph JSON path")
    if not snapshot_required:
        p.add_argument("--synth", help="synthetic graph spec, e.g. scale_free:200,3")
        p.add_argument("--synth-cap", type=int, default=1_000_000,
                       help="capacity in sat for synthetic channels")
    p.add_argument("--balance-mode", default="equal",
                   help="equal or random:<seed> (snapshot balance assignment)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcnsim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="parse a snapshot and report sizes")
    _add_input_args(p, snapshot_required=True)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("suggest", help="print a strategy's candidate set")
    _add_input_args(p)
    p.add_argument("--strategy", required=True, choices=sorted(STRATEGIES))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cap", type=int, default=1_000_000, help="channel capacity in sat")
    p.add_argument("--amount", type=int, default=100, help="fee-graph amount in sat")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("route", help="find and print one route")
    _add_input_args(p)
    p.add_argument("--source", required=True)
    p.add_argument("--dest", required=True)
    p.add_argument("--amount", type=int, required=True, help="payment amount in sat")
    p.add_argument("--cltv-penalty", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("baseline", help="network-wide success/fee baseline")
    _add_input_args(p)
    p.add_argument("--amount", type=int, default=100)
    p.add_argument("--tx", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("join-eval", help="single joining node evaluation")
    _add_input_args(p)
    p.add_argument("--strategy", required=True, choices=sorted(STRATEGIES))
    p.add_argument("--k", default="1..15", help="int, range lo..hi, or comma list")
    p.add_argument("--amounts", type=lambda s: [int(x) for x in s.split(",")],
                   default=[100, 10_000, 1_000_000], help="amounts in sat")
    p.add_argument("--tx", type=int, default=1000)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--retries", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_join_eval)

    p = sub.add_parser("growth", help="sequential network growth run")
    _add_input_args(p)
    p.add_argument("--strategy", required=True, choices=sorted(STRATEGIES))
    p.add_argument("--nodes", type=int, default=5000)
    p.add_argument("--interval", type=int, default=500)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--amount", type=int, default=100)
    p.add_argument("--tx", type=int, default=1000)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--retries", type=int, default=0)
    p.add_argument("--allow-mbi", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("metrics", help="topology metrics of a graph")
    _add_input_args(p)
    p.add_argument("--amount", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="strategy wall-clock benchmark")
    _add_input_args(p)
    p.add_argument("--strategies", required=True, help="comma-separated names")
    p.add_argument("--k", default="1..10")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--amount", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except snapshot.SnapshotError as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
