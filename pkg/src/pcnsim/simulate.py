"""Experiment engine: join evaluation, network-wide baseline, and growth runs.

Every experiment is a pure function of (spec, input graph, base_seed): the
input graph is cloned per repetition and never mutated, repetition r uses
seed = base_seed + r, and all intra-run randomness comes from labeled
streams derived from that seed (``random.Random`` seeded with a string,
which hashes deterministically across runs and platforms).

CSV labels are key=value strings so downstream tooling can recover the
experiment coordinates:

    join-eval;strategy=<name>;k=<k>;amount_msat=<a>[;mean]
    baseline;amount_msat=<a>
    growth;strategy=<name>[;mean]

Aggregate (";mean") rows carry seed=-1 and hold the arithmetic mean of their
detail rows.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import centrality, metrics
from .graph import MSAT_PER_SAT, NetworkGraph, build_fee_graph, peer_degrees
from .metrics import BatchStats, MetricRecord, batch_stats
from .routing import execute_payment
from .strategies import AttachmentRequest, run_strategy

DEFAULT_AMOUNTS_MSAT = (100 * MSAT_PER_SAT, 10_000 * MSAT_PER_SAT, 1_000_000 * MSAT_PER_SAT)
DEFAULT_CAP_MSAT = 1_000_000 * MSAT_PER_SAT
JOINER_ID = "joiner"


@dataclass
class ExperimentSpec:
    kind: str = "join_eval"                  # join_eval | growth | baseline
    strategy: str = "random"
    k_values: list[int] = field(default_factory=lambda: list(range(1, 16)))
    amounts_msat: list[int] = field(default_factory=lambda: list(DEFAULT_AMOUNTS_MSAT))
    tx_per_batch: int = 1000
    repetitions: int = 30
    base_seed: int = 0
    cap_msat: int = DEFAULT_CAP_MSAT
    baseline_tx: int = 10_000
    growth_nodes: int = 5000
    growth_interval: int = 500
    growth_k: int = 10
    retries: int = 0
    allow_mbi_growth: bool = False
    max_graph_nodes: int = 50_000            # growth size guard

    def validate(self) -> None:
        if not self.k_values or min(self.k_values) < 1:
            raise ValueError("k_values must be non-empty positive integers")
        if not self.amounts_msat or min(self.amounts_msat) <= 0:
            raise ValueError("amounts_msat must be non-empty positive integers")
        if self.tx_per_batch < 1 or self.repetitions < 1 or self.baseline_tx < 1:
            raise ValueError("counts must be >= 1")
        if self.growth_interval < 1 or self.growth_k < 1 or self.growth_nodes < 0:
            raise ValueError("invalid growth parameters")


def derive_rng(seed: int, label: str) -> random.Random:
    """Independent deterministic stream for one purpose within one repetition."""
    return random.Random(f"{seed}:{label}")


def derive_strategy_seed(seed: int, label: str) -> int:
    return derive_rng(seed, label).getrandbits(63)


def attach_node(g: NetworkGraph, joiner: str, peers: list[str], cap_msat: int) -> None:
    """Open equal-split default-policy channels from ``joiner`` to ``peers``."""
    for peer in peers:
        g.add_channel(joiner, peer, cap_msat)


def _random_pair_batch(g: NetworkGraph, rng: random.Random, count: int,
                       amount_msat: int, retries: int = 0):
    nodes = list(g.adjacency)
    if len(nodes) < 2:
        raise ValueError("payment batches need at least 2 nodes")
    outcomes = []
    for _ in range(count):
        src = nodes[rng.randrange(len(nodes))]
        dst = nodes[rng.randrange(len(nodes))]
        while dst == src:
            dst = nodes[rng.randrange(len(nodes))]
        outcomes.append(execute_payment(g, src, dst, amount_msat, retries=retries))
    return outcomes


def _fixed_source_batch(g: NetworkGraph, rng: random.Random, count: int,
                        amount_msat: int, source: str, retries: int = 0):
    dests = [n for n in g.adjacency if n != source]
    if not dests:
        raise ValueError("payment batches need at least 2 nodes")
    outcomes = []
    for _ in range(count):
        dst = dests[rng.randrange(len(dests))]
        outcomes.append(execute_payment(g, source, dst, amount_msat, retries=retries))
    return outcomes


def _mean(values: list[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return sum(present) / len(present)


def run_join_eval(spec: ExperimentSpec, graph: NetworkGraph) -> list[MetricRecord]:
    """Local evaluation of a single joining node.

    Per (k, amount, repetition): clone the graph, attach a fresh joiner via
    the strategy (the fee graphs inside the strategy use the batch amount),
    then measure one fixed-source batch (success/fees from the joiner's
    view) and one random-pair batch (the joiner's routed share) on separate
    clones. Emits one detail row per repetition plus a mean row.
    """
    spec.validate()
    records: list[MetricRecord] = []
    for k in spec.k_values:
        for amount in spec.amounts_msat:
            details: list[MetricRecord] = []
            label = f"join-eval;strategy={spec.strategy};k={k};amount_msat={amount}"
            for r in range(spec.repetitions):
                seed = spec.base_seed + r
                g = graph.clone()
                g.add_node(JOINER_ID)
                req = AttachmentRequest(
                    graph=g, joining=JOINER_ID, k=k, cap_msat=spec.cap_msat,
                    amount_hint_msat=amount,
                    rng_seed=derive_strategy_seed(seed, f"attach:k={k}:amt={amount}"),
                )
                try:
                    peers = run_strategy(spec.strategy, req).peers
                except ValueError as exc:
                    raise ValueError(f"strategy {spec.strategy!r} failed at k={k}, "
                                     f"seed={seed}: {exc}") from exc
                attach_node(g, JOINER_ID, peers, spec.cap_msat)

                ga = g.clone()
                rng_a = derive_rng(seed, f"batchA:k={k}:amt={amount}")
                stats_a = batch_stats(
                    _fixed_source_batch(ga, rng_a, spec.tx_per_batch, amount,
                                        JOINER_ID, spec.retries),
                    amount,
                )
                gb = g.clone()
                rng_b = derive_rng(seed, f"batchB:k={k}:amt={amount}")
                stats_b = batch_stats(
                    _random_pair_batch(gb, rng_b, spec.tx_per_batch, amount, spec.retries),
                    amount, watched=JOINER_ID,
                )
                details.append(MetricRecord(
                    label=label,
                    success_rate_pct=stats_a.success_rate_pct,
                    mean_fee_pct=stats_a.mean_fee_pct,
                    routed_share_pct=stats_b.routed_share_pct,
                    seed=seed,
                ))
            records.extend(details)
            records.append(MetricRecord(
                label=label + ";mean",
                success_rate_pct=_mean([d.success_rate_pct for d in details]),
                mean_fee_pct=_mean([d.mean_fee_pct for d in details]),
                routed_share_pct=_mean([d.routed_share_pct for d in details]),
                seed=-1,
            ))
    return records


def run_baseline(spec: ExperimentSpec, graph: NetworkGraph,
                 amount_msat: int | None = None) -> MetricRecord:
    """Network-wide success/fee level from random-pair payments on a clone."""
    spec.validate()
    amount = amount_msat if amount_msat is not None else spec.amounts_msat[0]
    g = graph.clone()
    rng = derive_rng(spec.base_seed, f"baseline:amt={amount}")
    stats = batch_stats(
        _random_pair_batch(g, rng, spec.baseline_tx, amount, spec.retries),
        amount,
    )
    return MetricRecord(
        label=f"baseline;amount_msat={amount}",
        success_rate_pct=stats.success_rate_pct,
        mean_fee_pct=stats.mean_fee_pct,
        seed=spec.base_seed,
    )


def _measure_growth(g: NetworkGraph, spec: ExperimentSpec, nodes_added: int,
                    seed: int, label: str, amount_msat: int) -> MetricRecord:
    fg = build_fee_graph(g, amount_msat)
    bc = centrality.betweenness(fg)
    n = g.node_count()
    norm = metrics.normalize_betweenness(bc, n)
    # Measurement payments run on a throwaway clone: the growth trajectory
    # stays a function of topology alone, not of earlier measurement traffic.
    gm = g.clone()
    rng = derive_rng(seed, f"growth-batch:{nodes_added}")
    stats = batch_stats(
        _random_pair_batch(gm, rng, spec.tx_per_batch, amount_msat, spec.retries),
        amount_msat,
    )
    return MetricRecord(
        label=label,
        nodes_added=nodes_added,
        degree_gini=metrics.gini(peer_degrees(g).values()),
        betweenness_gini=metrics.gini(bc.values()),
        diameter_hops=metrics.diameter(g),
        central_point_dominance=metrics.central_point_dominance(norm, n),
        success_rate_pct=stats.success_rate_pct,
        mean_fee_pct=stats.mean_fee_pct,
        seed=seed,
    )


def run_growth(spec: ExperimentSpec, graph: NetworkGraph) -> list[MetricRecord]:
    """Long-term impact run: grow the network node by node via one strategy.

    Joining nodes get ids ``synth-<index>`` and attach with ``growth_k``
    equal-split default-policy channels of ``cap_msat``. Metrics (plus one
    micro-payment batch) are recorded initially and after every
    ``growth_interval`` additions; per-interval mean rows are added when
    running more than one repetition.
    """
    spec.validate()
    if spec.strategy == "mbi" and not spec.allow_mbi_growth:
        raise ValueError("mbi is excluded from growth runs (enable explicitly for small scale)")
    if graph.node_count() + spec.growth_nodes > spec.max_graph_nodes:
        raise ValueError(f"growth run would exceed the size guard "
                         f"({spec.max_graph_nodes} nodes); raise max_graph_nodes to override")
    amount = spec.amounts_msat[0]
    label = f"growth;strategy={spec.strategy}"
    by_interval: dict[int, list[MetricRecord]] = {}
    for r in range(spec.repetitions):
        seed = spec.base_seed + r
        g = graph.clone()
        by_interval.setdefault(0, []).append(
            _measure_growth(g, spec, 0, seed, label, amount))
        for i in range(1, spec.growth_nodes + 1):
            joiner = f"synth-{i:05d}"
            g.add_node(joiner)
            req = AttachmentRequest(
                graph=g, joining=joiner, k=spec.growth_k, cap_msat=spec.cap_msat,
                amount_hint_msat=amount,
                rng_seed=derive_strategy_seed(seed, f"join:{i}"),
            )
            peers = run_strategy(spec.strategy, req).peers
            attach_node(g, joiner, peers, spec.cap_msat)
            if i % spec.growth_interval == 0:
                by_interval.setdefault(i, []).append(
                    _measure_growth(g, spec, i, seed, label, amount))
    records: list[MetricRecord] = []
    for interval in sorted(by_interval):
        rows = by_interval[interval]
        records.extend(rows)
        if spec.repetitions > 1:
            records.append(MetricRecord(
                label=label + ";mean",
                nodes_added=interval,
                degree_gini=_mean([x.degree_gini for x in rows]),
                betweenness_gini=_mean([x.betweenness_gini for x in rows]),
                diameter_hops=None,
                central_point_dominance=_mean([x.central_point_dominance for x in rows]),
                success_rate_pct=_mean([x.success_rate_pct for x in rows]),
                mean_fee_pct=_mean([x.mean_fee_pct for x in rows]),
                seed=-1,
            ))
    return records


# ---------------------------------------------------------------------------
# Synthetic fixtures


def scale_free_graph(n: int, m0: int, seed: int = 0,
                     capacity_msat: int = DEFAULT_CAP_MSAT) -> NetworkGraph:
    """Preferential-attachment graph: each new node opens m0 channels."""
    if n < 2 or m0 < 1 or m0 >= n:
        raise ValueError("need n >= 2 and 1 <= m0 < n")
    rng = random.Random(seed)
    g = NetworkGraph()
    ids = [f"n{i:05d}" for i in range(n)]
    for node in ids:
        g.add_node(node)
    repeated: list[int] = []
    for leaf in range(1, m0 + 1):
        g.add_channel(ids[0], ids[leaf], capacity_msat)
        repeated += [0, leaf]
    for new in range(m0 + 1, n):
        targets: set[int] = set()
        while len(targets) < m0:
            targets.add(repeated[rng.randrange(len(repeated))])
        for t in sorted(targets):
            g.add_channel(ids[new], ids[t], capacity_msat)
            repeated += [new, t]
    return g


def path_graph(n: int, capacity_msat: int = DEFAULT_CAP_MSAT) -> NetworkGraph:
    if n < 2:
        raise ValueError("need n >= 2")
    g = NetworkGraph()
    ids = [f"n{i:05d}" for i in range(n)]
    for node in ids:
        g.add_node(node)
    for i in range(n - 1):
        g.add_channel(ids[i], ids[i + 1], capacity_msat)
    return g


def star_graph(n: int, capacity_msat: int = DEFAULT_CAP_MSAT) -> NetworkGraph:
    if n < 2:
        raise ValueError("need n >= 2")
    g = NetworkGraph()
    ids = [f"n{i:05d}" for i in range(n)]
    for node in ids:
        g.add_node(node)
    for i in range(1, n):
        g.add_channel(ids[0], ids[i], capacity_msat)
    return g


def clique_pair_graph(a: int, b: int, capacity_msat: int = DEFAULT_CAP_MSAT) -> NetworkGraph:
    """Two disjoint complete components (bridged only by later attachments)."""
    if a < 2 or b < 2:
        raise ValueError("each clique needs >= 2 nodes")
    g = NetworkGraph()
    left = [f"a{i:03d}" for i in range(a)]
    right = [f"b{i:03d}" for i in range(b)]
    for node in left + right:
        g.add_node(node)
    for ids in (left, right):
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                g.add_channel(ids[i], ids[j], capacity_msat)
    return g


def synth_graph(kind: str, seed: int = 0,
                capacity_msat: int = DEFAULT_CAP_MSAT) -> NetworkGraph:
    """Build a fixture from a spec string such as ``scale_free:200,3``."""
    name, _, arg_str = kind.partition(":")
    args = [int(x) for x in arg_str.split(",") if x] if arg_str else []
    if name == "scale_free":
        if len(args) != 2:
            raise ValueError("scale_free needs n,m0")
        return scale_free_graph(args[0], args[1], seed=seed, capacity_msat=capacity_msat)
    if name == "path":
        if len(args) != 1:
            raise ValueError("path needs n")
        return path_graph(args[0], capacity_msat=capacity_msat)
    if name == "star":
        if len(args) != 1:
            raise ValueError("star needs n")
        return star_graph(args[0], capacity_msat=capacity_msat)
    if name == "cliques":
        if len(args) != 2:
            raise ValueError("cliques needs a,b")
        return clique_pair_graph(args[0], args[1], capacity_msat=capacity_msat)
    raise ValueError(f"unknown synthetic graph kind {name!r}")
