"""Load LND describegraph-style JSON snapshots into a NetworkGraph.

Snapshots carry public capacities and per-direction policies but not private
balances, so balance initialization is an explicit, configurable assumption
(equal split by default).
"""

from __future__ import annotations

import json
import logging
import random
from collections import deque
from dataclasses import dataclass

from .graph import DISABLED_POLICY, MSAT_PER_SAT, ChannelPolicy, NetworkGraph

logger = logging.getLogger(__name__)


class SnapshotError(ValueError):
    """Base class for snapshot ingestion failures."""


class SnapshotParseError(SnapshotError):
    """Input is not well-formed JSON; carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SnapshotFormatError(SnapshotError):
    """Well-formed JSON missing a required field; names the field."""

    def __init__(self, field_path: str):
        super().__init__(f"missing or invalid required field: {field_path}")
        self.field_path = field_path


@dataclass(frozen=True)
class PolicyRecord:
    fee_base_msat: int = 0
    fee_rate_milli_msat: int = 0
    time_lock_delta: int = 0
    disabled: bool = False


@dataclass(frozen=True)
class EdgeRecord:
    channel_id: str
    node1_pub: str
    node2_pub: str
    capacity_sat: int
    node1_policy: PolicyRecord | None
    node2_policy: PolicyRecord | None


@dataclass
class SnapshotDocument:
    nodes: list[str]
    edges: list[EdgeRecord]


def _as_int(value, path: str) -> int:
    # LND emits numeric fields as decimal strings; accept both.
    if isinstance(value, bool):
        raise SnapshotFormatError(path)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise SnapshotFormatError(path) from None
    raise SnapshotFormatError(path)


def _parse_policy(obj, path: str) -> PolicyRecord | None:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise SnapshotFormatError(path)
    return PolicyRecord(
        fee_base_msat=_as_int(obj.get("fee_base_msat", 0), f"{path}.fee_base_msat"),
        fee_rate_milli_msat=_as_int(obj.get("fee_rate_milli_msat", 0), f"{path}.fee_rate_milli_msat"),
        time_lock_delta=_as_int(obj.get("time_lock_delta", 0), f"{path}.time_lock_delta"),
        disabled=bool(obj.get("disabled", False)),
    )


def parse_snapshot(data: bytes | str) -> SnapshotDocument:
    """Parse describegraph JSON into a SnapshotDocument."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SnapshotParseError(exc.msg, exc.pos) from exc
    if not isinstance(raw, dict):
        raise SnapshotFormatError("<root>")

    nodes: list[str] = []
    for i, node in enumerate(raw.get("nodes", [])):
        pub = node.get("pub_key") if isinstance(node, dict) else None
        if not pub:
            raise SnapshotFormatError(f"nodes[{i}].pub_key")
        nodes.append(pub)

    edges: list[EdgeRecord] = []
    for i, edge in enumerate(raw.get("edges", [])):
        if not isinstance(edge, dict):
            raise SnapshotFormatError(f"edges[{i}]")
        for req in ("channel_id", "node1_pub", "node2_pub", "capacity"):
            if req not in edge:
                raise SnapshotFormatError(f"edges[{i}].{req}")
        edges.append(EdgeRecord(
            channel_id=str(edge["channel_id"]),
            node1_pub=str(edge["node1_pub"]),
            node2_pub=str(edge["node2_pub"]),
            capacity_sat=_as_int(edge["capacity"], f"edges[{i}].capacity"),
            node1_policy=_parse_policy(edge.get("node1_policy"), f"edges[{i}].node1_policy"),
            node2_policy=_parse_policy(edge.get("node2_policy"), f"edges[{i}].node2_policy"),
        ))
    return SnapshotDocument(nodes=nodes, edges=edges)


def _to_channel_policy(rec: PolicyRecord | None) -> ChannelPolicy:
    if rec is None:
        # Absent policy: that direction cannot forward.
        return DISABLED_POLICY
    return ChannelPolicy(
        base_fee_msat=rec.fee_base_msat,
        prop_fee_millionths=rec.fee_rate_milli_msat,
        cltv_delta=rec.time_lock_delta,
        enabled=not rec.disabled,
    )


def to_network(doc: SnapshotDocument, balance_mode: str = "equal") -> NetworkGraph:
    """Build a NetworkGraph from a parsed snapshot.

    ``balance_mode`` is ``"equal"`` or ``"random:<seed>"``. Channels whose
    endpoints are not listed, or that are disabled in both directions, are
    skipped with a warning count.
    """
    rng = None
    if balance_mode != "equal":
        if not balance_mode.startswith("random:"):
            raise ValueError(f"unknown balance mode {balance_mode!r}")
        rng = random.Random(int(balance_mode.split(":", 1)[1]))

    g = NetworkGraph()
    dup_nodes = 0
    for pub in doc.nodes:
        if g.has_node(pub):
            dup_nodes += 1
            continue
        g.add_node(pub)
    skipped = 0
    for edge in doc.edges:
        if edge.capacity_sat <= 0:
            skipped += 1
            continue
        if not g.has_node(edge.node1_pub) or not g.has_node(edge.node2_pub):
            skipped += 1
            continue
        if edge.channel_id in g.channels:
            skipped += 1
            continue
        policy_a = _to_channel_policy(edge.node1_policy)
        policy_b = _to_channel_policy(edge.node2_policy)
        if not policy_a.enabled and not policy_b.enabled:
            skipped += 1
            continue
        cap_msat = edge.capacity_sat * MSAT_PER_SAT
        if rng is None:
            balance_a = cap_msat // 2
        else:
            balance_a = rng.randint(0, cap_msat)
        g.add_channel(
            edge.node1_pub, edge.node2_pub, cap_msat,
            balance_a_msat=balance_a,
            policy_a=policy_a, policy_b=policy_b,
            channel_id=edge.channel_id,
        )
    if skipped or dup_nodes:
        logger.warning("snapshot ingest skipped %d channels and %d duplicate nodes",
                       skipped, dup_nodes)
    return g


def largest_component(g: NetworkGraph) -> NetworkGraph:
    """Induced subgraph on the largest weakly-connected component.

    Ties between equally-sized components go to the one containing the
    lexicographically smallest node id.
    """
    seen: set[str] = set()
    components: list[set[str]] = []
    for start in g.adjacency:
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for cid in g.adjacency[u]:
                v = g.channels[cid].peer(u)
                if v not in comp:
                    comp.add(v)
                    queue.append(v)
        seen |= comp
        components.append(comp)
    if not components:
        return NetworkGraph()
    biggest = max(len(c) for c in components)
    best = min((c for c in components if len(c) == biggest), key=min)

    sub = NetworkGraph()
    for node in g.adjacency:
        if node in best:
            sub.add_node(node)
    for cid, chan in g.channels.items():
        if chan.node_a in best and chan.node_b in best:
            sub.add_channel(
                chan.node_a, chan.node_b, chan.capacity_msat,
                balance_a_msat=chan.balance_a_msat,
                policy_a=chan.policy_a, policy_b=chan.policy_b,
                channel_id=cid,
            )
    return sub


def to_snapshot_dict(g: NetworkGraph) -> dict:
    """Serialize a graph back into describegraph-shaped JSON (debug surface).

    Balances are not part of the snapshot format and are not emitted.
    """
    def policy_dict(p: ChannelPolicy):
        if p == DISABLED_POLICY:
            return None
        return {
            "fee_base_msat": str(p.base_fee_msat),
            "fee_rate_milli_msat": str(p.prop_fee_millionths),
            "time_lock_delta": p.cltv_delta,
            "disabled": not p.enabled,
        }

    return {
        "nodes": [{"pub_key": n} for n in g.adjacency],
        "edges": [
            {
                "channel_id": c.channel_id,
                "node1_pub": c.node_a,
                "node2_pub": c.node_b,
                "capacity": str(c.capacity_msat // MSAT_PER_SAT),
                "node1_policy": policy_dict(c.policy_a),
                "node2_policy": policy_dict(c.policy_b),
            }
            for c in g.channels.values()
        ],
    }
