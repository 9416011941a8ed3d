"""Route selection and payment settlement over the channel multigraph.

Pathfinding mirrors weight-based clients: it filters channels by public
capacity and chooses the path with the lowest aggregated fee weight, where
the fee of every hop is estimated on the full payment amount and the sender
charges itself nothing on its first hop. Settlement is exact: per-hop
forwarded amounts are accumulated backward from the destination, and the
balance of every forwarding side is checked and shifted.

Pathfinding deliberately operates on capacities, not balances, so a found
route can still fail at settlement time.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .graph import NetworkGraph, fee

NO_PATH = "no_path"
INSUFFICIENT_BALANCE = "insufficient_balance"


@dataclass(frozen=True)
class Failure:
    kind: str
    hop_index: int | None = None


@dataclass(frozen=True)
class Hop:
    """One channel crossing: ``from_node`` sends ``amount_msat`` over ``channel_id``."""

    channel_id: str
    from_node: str
    amount_msat: int


@dataclass(frozen=True)
class Route:
    hops: tuple[Hop, ...]
    total_fee_msat: int
    total_sent_msat: int
    weight_msat: int                # pathfinding objective (fees at full amount)

    @property
    def amount_msat(self) -> int:
        return self.hops[-1].amount_msat


@dataclass(frozen=True)
class PaymentOutcome:
    success: bool
    route: Route | None
    fee_paid_msat: int
    failure: Failure | None
    intermediaries: tuple[str, ...]


def _edge_index(g: NetworkGraph, amount_msat: int, cltv_penalty_factor: float):
    """Per-amount adjacency of qualifying directed edges, cached on the graph.

    The index depends only on capacities and policies, which payments never
    change; channel additions/removals bump the graph version and invalidate.
    """
    cache = g._route_index
    if cache.get("version") != g._version:
        cache.clear()
        cache["version"] = g._version
    key = (amount_msat, cltv_penalty_factor)
    adj = cache.get(key)
    if adj is not None:
        return adj
    adj = {}
    for u, cids in g.adjacency.items():
        entries = []
        for cid in cids:
            chan = g.channels[cid]
            if chan.capacity_msat < amount_msat:
                continue
            pol = chan.policy_from(u)
            if not pol.enabled:
                continue
            w = fee(pol, amount_msat)
            if cltv_penalty_factor:
                w = w + pol.cltv_delta * cltv_penalty_factor
            entries.append((w, chan.peer(u), cid))
        entries.sort()
        adj[u] = entries
    cache[key] = adj
    return adj


def _stored_path(pred: dict, source: str, v: str) -> tuple[str, ...]:
    path = [v]
    while v != source:
        v = pred[v][0]
        path.append(v)
    path.reverse()
    return tuple(path)


def find_route(
    g: NetworkGraph,
    source: str,
    dest: str,
    amount_msat: int,
    *,
    cltv_penalty_factor: float = 0.0,
    exclude_channels: frozenset[str] | None = None,
) -> Route | None:
    """Cheapest capacity-qualified route, or None when no path exists.

    Ties are broken by fewer hops, then by the lexicographically smallest
    node sequence, so route selection is fully deterministic.
    """
    if source == dest:
        raise ValueError("source and destination must differ")
    if amount_msat <= 0:
        raise ValueError("amount_msat must be positive")
    if source not in g.adjacency or dest not in g.adjacency:
        raise ValueError("unknown source or destination node")
    excluded = exclude_channels or frozenset()

    adj = _edge_index(g, amount_msat, cltv_penalty_factor)
    best: dict[str, tuple] = {source: (0, 0)}
    pred: dict[str, tuple[str, str]] = {}
    settled: set[str] = set()
    heap = [(0, 0, source)]
    while heap:
        cost, hops, u = heapq.heappop(heap)
        if u in settled or (cost, hops) != best[u]:
            continue
        settled.add(u)
        if u == dest:
            break
        for w, v, cid in adj[u]:
            if cid in excluded:
                continue
            cand = (cost + (0 if u == source else w), hops + 1)
            cur = best.get(v)
            if cur is None or cand < cur:
                best[v] = cand
                pred[v] = (u, cid)
                heapq.heappush(heap, (cand[0], cand[1], v))
            elif cand == cur and v not in settled:
                if _stored_path(pred, source, u) + (v,) < _stored_path(pred, source, v):
                    pred[v] = (u, cid)
    if dest not in settled:
        return None

    # Reconstruct the node/channel sequence source -> dest.
    seq: list[tuple[str, str]] = []          # (forwarding node, channel id)
    node = dest
    while node != source:
        prev, cid = pred[node]
        seq.append((prev, cid))
        node = prev
    seq.reverse()

    # Exact settlement amounts, accumulated backward from the destination.
    receive = amount_msat
    hops_rev: list[Hop] = []
    for i in range(len(seq) - 1, -1, -1):
        from_node, cid = seq[i]
        hops_rev.append(Hop(channel_id=cid, from_node=from_node, amount_msat=receive))
        if i > 0:
            pol = g.channels[cid].policy_from(from_node)
            receive += fee(pol, receive)
    hops = tuple(reversed(hops_rev))
    total_sent = hops[0].amount_msat
    return Route(
        hops=hops,
        total_fee_msat=total_sent - amount_msat,
        total_sent_msat=total_sent,
        weight_msat=best[dest][0],
    )


def execute_payment(
    g: NetworkGraph,
    source: str,
    dest: str,
    amount_msat: int,
    *,
    retries: int = 0,
    cltv_penalty_factor: float = 0.0,
) -> PaymentOutcome:
    """Find a route and settle it, shifting balances along the path.

    A payment is atomic: on any balance violation the graph is left
    untouched. With ``retries`` > 0, each balance failure excludes the
    offending channel and re-runs pathfinding.
    """
    excluded: set[str] = set()
    last_failure = Failure(NO_PATH)
    for _ in range(retries + 1):
        route = find_route(
            g, source, dest, amount_msat,
            cltv_penalty_factor=cltv_penalty_factor,
            exclude_channels=frozenset(excluded) if excluded else None,
        )
        if route is None:
            return PaymentOutcome(False, None, 0, last_failure, ())
        bad = _first_balance_violation(g, route)
        if bad is None:
            for hop in route.hops:
                g.channels[hop.channel_id].push(hop.from_node, hop.amount_msat)
            return PaymentOutcome(
                success=True,
                route=route,
                fee_paid_msat=route.total_fee_msat,
                failure=None,
                intermediaries=tuple(h.from_node for h in route.hops[1:]),
            )
        last_failure = Failure(INSUFFICIENT_BALANCE, bad)
        excluded.add(route.hops[bad].channel_id)
    return PaymentOutcome(False, None, 0, last_failure, ())


def _first_balance_violation(g: NetworkGraph, route: Route) -> int | None:
    for i, hop in enumerate(route.hops):
        if g.channels[hop.channel_id].balance_from(hop.from_node) < hop.amount_msat:
            return i
    return None


def record_intermediaries(outcome: PaymentOutcome, watched: str) -> bool:
    """True iff ``watched`` forwarded (not sent or received) a successful payment."""
    return outcome.success and watched in outcome.intermediaries
