"""Attachment strategies: pick k peers for a node joining the network.

Every strategy maps (graph, k, cap) to an ordered candidate set and is fully
deterministic for a fixed graph, seed, and the documented tie-break rules
(lexicographic on node id after any strategy-specific key). The joining node
is excluded from all candidate pools; fee graphs used internally are built
without it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from . import centrality
from .graph import (ChannelPolicy, FeeGraph, NetworkGraph, build_fee_graph,
                    degree, fee)

INF = float("inf")

DEFAULT_AMOUNT_HINT_MSAT = 100_000        # micro payment: 100 sat


@dataclass
class AttachmentRequest:
    graph: NetworkGraph
    joining: str
    k: int
    cap_msat: int = 1_000_000_000
    amount_hint_msat: int = DEFAULT_AMOUNT_HINT_MSAT
    rng_seed: int = 0


@dataclass
class CandidateSet:
    peers: list[str]
    per_step_objective: list[float] | None = None


def _eligible(req: AttachmentRequest) -> list[str]:
    nodes = [n for n in req.graph.adjacency if n != req.joining]
    if req.k < 1:
        raise ValueError("k must be >= 1")
    limit = req.graph.node_count() - 1 if req.graph.has_node(req.joining) else len(nodes) - 1
    if req.k > len(nodes) or req.k > max(limit, 0):
        raise ValueError(f"k={req.k} exceeds the n-1 candidate limit ({len(nodes)} eligible peers)")
    if req.cap_msat <= 0 or req.cap_msat % 2:
        raise ValueError("cap_msat must be positive and even (equal split must be exact)")
    if req.amount_hint_msat <= 0:
        raise ValueError("amount_hint_msat must be positive")
    return sorted(nodes)


def _strategy_fee_graph(req: AttachmentRequest) -> FeeGraph:
    exclude = frozenset({req.joining}) if req.graph.has_node(req.joining) else None
    return build_fee_graph(req.graph, req.amount_hint_msat, exclude=exclude)


def _top_degree_node(fg: FeeGraph, eligible: list[str]) -> str:
    return min(eligible, key=lambda n: (-degree(fg, n), n))


def random_strategy(req: AttachmentRequest) -> CandidateSet:
    """Uniform sample of k distinct peers, deterministic per seed."""
    eligible = _eligible(req)
    rng = random.Random(req.rng_seed)
    return CandidateSet(peers=rng.sample(eligible, req.k))


def highest_degree_strategy(req: AttachmentRequest) -> CandidateSet:
    """The k nodes with the most distinct fee-graph neighbors."""
    eligible = _eligible(req)
    fg = _strategy_fee_graph(req)
    ranked = sorted(eligible, key=lambda n: (-degree(fg, n), n))[: req.k]
    return CandidateSet(peers=ranked,
                        per_step_objective=[float(degree(fg, n)) for n in ranked])


def betweenness_strategy(req: AttachmentRequest) -> CandidateSet:
    """The k nodes with the highest weighted betweenness on the fee graph."""
    eligible = _eligible(req)
    fg = _strategy_fee_graph(req)
    bc = centrality.betweenness(fg)
    ranked = sorted(eligible, key=lambda n: (-bc[n], n))[: req.k]
    return CandidateSet(peers=ranked, per_step_objective=[bc[n] for n in ranked])


def _undirected_adjacency(g: NetworkGraph, skip: str) -> dict[str, list[str]]:
    # Hop-distance projection: any channel with at least one enabled direction.
    adj: dict[str, set[str]] = {n: set() for n in g.adjacency if n != skip}
    for chan in g.channels.values():
        if skip in (chan.node_a, chan.node_b):
            continue
        if chan.policy_a.enabled or chan.policy_b.enabled:
            adj[chan.node_a].add(chan.node_b)
            adj[chan.node_b].add(chan.node_a)
    return {n: sorted(peers) for n, peers in adj.items()}


def _bfs_from_joiner(adj: dict[str, list[str]], chosen: list[str]) -> dict[str, float]:
    """Hop distances from a virtual joiner connected to every chosen node."""
    dist = {n: INF for n in adj}
    frontier = []
    for c in chosen:
        if dist[c] == INF:
            dist[c] = 1
            frontier.append(c)
    d = 1
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] == INF:
                    dist[v] = d + 1
                    nxt.append(v)
        frontier = nxt
        d += 1
    return dist


def k_center_strategy(req: AttachmentRequest) -> CandidateSet:
    """Greedy farthest-point attachment minimizing the longest hop distance.

    Starts at the highest-degree node, then repeatedly picks the node at
    maximum hop distance from the (virtually attached) joiner; unreachable
    nodes are preferred. Fees and capacities are disregarded.
    """
    eligible = _eligible(req)
    fg = _strategy_fee_graph(req)
    adj = _undirected_adjacency(req.graph, skip=req.joining)
    chosen = [_top_degree_node(fg, eligible)]
    objective: list[float] = []
    remaining = set(eligible) - set(chosen)
    for _ in range(req.k):
        dist = _bfs_from_joiner(adj, chosen)
        objective.append(max(dist.values()) if dist else 0.0)
        if len(chosen) == req.k:
            break
        best = None
        best_key = None
        for n in sorted(remaining):
            key = (dist[n], degree(fg, n))
            if best_key is None or key > best_key:
                best, best_key = n, key
        chosen.append(best)
        remaining.discard(best)
    return CandidateSet(peers=chosen, per_step_objective=objective)


def _fee_graph_matrix(fg: FeeGraph):
    index = {n: i for i, n in enumerate(fg.nodes)}
    n = len(fg.nodes)
    rows, cols, data = [], [], []
    for (u, v), w in fg.edges.items():
        rows.append(index[u])
        cols.append(index[v])
        data.append(w)
    mat = csr_matrix((data, (rows, cols)), shape=(n, n))
    return mat, index


def k_median_strategy(req: AttachmentRequest) -> CandidateSet:
    """Forward-greedy attachment minimizing the summed fee distance to all nodes.

    The joiner's own outgoing edges carry weight 0 (a sender pays no fee on
    its first hop), so the distance from the joiner to v through candidate c
    is the fee-graph distance from c to v. Unreachable nodes dominate the
    comparison: candidates are ranked by (unreachable count, finite sum).
    """
    eligible = _eligible(req)
    fg = _strategy_fee_graph(req)
    mat, index = _fee_graph_matrix(fg)
    dist_from = csgraph_dijkstra(mat, directed=True)     # dist_from[c, v]

    first = _top_degree_node(fg, eligible)
    chosen = [first]
    cur = dist_from[index[first]].copy()

    def objective(vec) -> float:
        return float(vec.sum())          # inf if anything is unreachable

    objective_trace = [objective(cur)]
    eligible_idx = {n: index[n] for n in eligible}
    for _ in range(req.k - 1):
        best = None
        best_key = None
        best_vec = None
        for n in sorted(set(eligible) - set(chosen)):
            cand = np.minimum(cur, dist_from[eligible_idx[n]])
            unreachable = int(np.isinf(cand).sum())
            key = (unreachable, float(np.where(np.isinf(cand), 0.0, cand).sum()))
            if best_key is None or key < best_key:
                best, best_key, best_vec = n, key, cand
        chosen.append(best)
        cur = best_vec
        objective_trace.append(objective(cur))
    return CandidateSet(peers=chosen, per_step_objective=objective_trace)


def mbi_strategy(req: AttachmentRequest) -> CandidateSet:
    """Greedy maximum-betweenness-improvement attachment.

    Each round evaluates, for every non-neighbor, the betweenness the joiner
    would gain from one more default-policy channel of capacity ``cap_msat``
    (split equally), and keeps the best. The per-candidate value equals a
    full Brandes run on the graph with the trial channel inserted; it is
    computed from all-pairs distances and path counts of the base graph,
    which is exact and avoids re-running Brandes per candidate.
    """
    eligible = _eligible(req)
    fg = _strategy_fee_graph(req)
    default_policy = ChannelPolicy()
    # A trial channel only shows up in the fee graph if it can carry the amount.
    channels_qualify = req.cap_msat >= req.amount_hint_msat
    edge_w = fee(default_policy, req.amount_hint_msat)

    D, S, index, _nodes = centrality.all_pairs_distance_sigma(fg)
    chosen: list[str] = []
    objective: list[float] = []
    for _ in range(req.k):
        best = None
        best_bc = -1.0
        for n in sorted(set(eligible) - set(chosen)):
            if channels_qualify:
                attach = [index[c] for c in chosen + [n]]
                bc = centrality.added_node_betweenness(
                    D, S, attach,
                    w_to_joiner=[edge_w] * len(attach),
                    w_from_joiner=[edge_w] * len(attach),
                )
            else:
                bc = 0.0
            if bc > best_bc:
                best, best_bc = n, bc
        chosen.append(best)
        objective.append(best_bc)
    return CandidateSet(peers=chosen, per_step_objective=objective)


STRATEGIES = {
    "random": random_strategy,
    "degree": highest_degree_strategy,
    "betweenness": betweenness_strategy,
    "k-center": k_center_strategy,
    "k-median": k_median_strategy,
    "mbi": mbi_strategy,
}


def run_strategy(name: str, req: AttachmentRequest) -> CandidateSet:
    try:
        strategy = STRATEGIES[name]
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}") from None
    return strategy(req)
