"""Topology and performance metrics: Gini, diameter, central point dominance,
and per-batch payment statistics, plus the CSV record schema shared by all
experiments.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .graph import NetworkGraph
from .routing import PaymentOutcome, record_intermediaries


def gini(values) -> float:
    """Mean absolute difference Gini: sum |x_i - x_j| / (2 n^2 mean).

    0 for perfect equality; all-zero inputs return 0 by convention.
    """
    xs = np.asarray(list(values), dtype=float)
    if xs.size == 0:
        raise ValueError("gini of an empty list is undefined")
    if np.any(xs < 0):
        raise ValueError("gini requires non-negative values")
    total = xs.sum()
    if total == 0:
        return 0.0
    xs = np.sort(xs)
    n = xs.size
    # Equivalent to the double sum, via the sorted-index identity.
    idx = np.arange(1, n + 1)
    return float((2 * (idx * xs).sum() - (n + 1) * total) / (n * total))


def _undirected_csr(g: NetworkGraph):
    nodes = list(g.adjacency)
    index = {n: i for i, n in enumerate(nodes)}
    pairs = set()
    for chan in g.channels.values():
        a, b = index[chan.node_a], index[chan.node_b]
        pairs.add((a, b))
        pairs.add((b, a))
    if pairs:
        rows, cols = zip(*pairs)
    else:
        rows, cols = (), ()
    ones = np.ones(len(rows), dtype=np.int8)
    return csr_matrix((ones, (rows, cols)), shape=(len(nodes), len(nodes))), nodes


def diameter(g: NetworkGraph) -> int:
    """Longest shortest path in hops on the undirected channel projection."""
    mat, nodes = _undirected_csr(g)
    n = len(nodes)
    if n == 0:
        raise ValueError("diameter of an empty graph is undefined")
    if n == 1:
        return 0
    worst = 0
    # Batched BFS keeps the distance matrix footprint bounded on big graphs.
    for start in range(0, n, 512):
        idx = np.arange(start, min(start + 512, n))
        dist = csgraph_dijkstra(mat, directed=False, unweighted=True, indices=idx)
        if np.isinf(dist).any():
            raise ValueError("graph is disconnected; run largest_component first")
        worst = max(worst, int(dist.max()))
    return worst


def normalize_betweenness(bc: dict[str, float], n: int) -> dict[str, float]:
    """Scale raw directed betweenness into [0, 1] by (n-1)(n-2)."""
    if n < 3:
        raise ValueError("normalization needs at least 3 nodes")
    scale = (n - 1) * (n - 2)
    return {v: x / scale for v, x in bc.items()}


def central_point_dominance(bc: dict[str, float], n: int) -> float:
    """Freeman's central point dominance over normalized betweenness values.

    ``bc`` must already be normalized to [0, 1]; the result is the average
    excess of the most central point: sum(bc_max - bc_v) / (n - 1).
    """
    if n < 3:
        raise ValueError("central point dominance needs at least 3 nodes")
    values = list(bc.values())
    top = max(values)
    return sum(top - v for v in values) / (n - 1)


@dataclass
class BatchStats:
    success_rate_pct: float
    mean_fee_pct: float
    fee_defined: bool                  # False when no payment succeeded
    routed_share_pct: float | None = None


def batch_stats(outcomes: list[PaymentOutcome], amount_msat: int,
                watched: str | None = None) -> BatchStats:
    """Success rate, mean fee percentage, and optional routed share of a batch."""
    if not outcomes:
        raise ValueError("batch_stats needs at least one outcome")
    total = len(outcomes)
    successes = [o for o in outcomes if o.success]
    success_rate = 100.0 * len(successes) / total
    if successes:
        # Integer fee sum first: bit-exact and permutation-invariant.
        mean_fee = 100.0 * sum(o.fee_paid_msat for o in successes) / (amount_msat * len(successes))
        fee_defined = True
    else:
        mean_fee = 0.0
        fee_defined = False
    routed = None
    if watched is not None:
        routed = 100.0 * sum(record_intermediaries(o, watched) for o in outcomes) / total
    return BatchStats(success_rate, mean_fee, fee_defined, routed)


@dataclass
class MetricRecord:
    """One CSV row; the field order below is the emitted column order."""

    label: str
    nodes_added: int = 0
    degree_gini: float | None = None
    betweenness_gini: float | None = None
    diameter_hops: int | None = None
    central_point_dominance: float | None = None
    success_rate_pct: float | None = None
    mean_fee_pct: float | None = None
    routed_share_pct: float | None = None
    seed: int = 0


CSV_FIELDS = [f.name for f in fields(MetricRecord)]


def records_to_csv(records: list[MetricRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow([
            "" if getattr(rec, name) is None else getattr(rec, name)
            for name in CSV_FIELDS
        ])
    return buf.getvalue()


def write_records(records: list[MetricRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))
