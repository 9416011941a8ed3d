"""Directed multigraph model of a payment channel network.

Money is integer millisatoshi throughout (1 sat = 1000 msat), so balance
arithmetic is exact. A channel is one funding arrangement between two nodes;
each endpoint holds a private balance share and the two shares always sum to
the channel capacity. Forwarding across the channel is governed per direction
by the forwarding endpoint's policy.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

MSAT_PER_SAT = 1000

DEFAULT_BASE_FEE_MSAT = 1_000        # 1 satoshi
DEFAULT_PROP_FEE_MILLIONTHS = 1      # 1e-6 of the forwarded amount
DEFAULT_CLTV_DELTA = 40


@dataclass(frozen=True)
class ChannelPolicy:
    """Forwarding terms advertised by one endpoint for one direction."""

    base_fee_msat: int = DEFAULT_BASE_FEE_MSAT
    prop_fee_millionths: int = DEFAULT_PROP_FEE_MILLIONTHS
    cltv_delta: int = DEFAULT_CLTV_DELTA
    enabled: bool = True


# Placeholder for a direction whose policy is unknown; never routable.
DISABLED_POLICY = ChannelPolicy(base_fee_msat=0, prop_fee_millionths=0,
                                cltv_delta=0, enabled=False)


def fee(policy: ChannelPolicy, amount_msat: int) -> int:
    """Fee in msat for forwarding ``amount_msat`` under ``policy``.

    base + floor(prop * amount / 1e6), all integer arithmetic.
    """
    if amount_msat < 0:
        raise ValueError("amount_msat must be non-negative")
    return policy.base_fee_msat + (policy.prop_fee_millionths * amount_msat) // 1_000_000


@dataclass
class Channel:
    """A funded channel between two nodes with a mutable balance split.

    ``policy_a`` governs forwarding in direction a -> b (it is what node_a
    charges), ``policy_b`` the reverse.
    """

    channel_id: str
    node_a: str
    node_b: str
    capacity_msat: int
    balance_a_msat: int
    balance_b_msat: int
    policy_a: ChannelPolicy = ChannelPolicy()
    policy_b: ChannelPolicy = ChannelPolicy()

    def __post_init__(self) -> None:
        if self.node_a == self.node_b:
            raise ValueError(f"channel {self.channel_id}: self-channel not allowed")
        if self.capacity_msat <= 0:
            raise ValueError(f"channel {self.channel_id}: capacity must be positive")
        if self.balance_a_msat < 0 or self.balance_b_msat < 0:
            raise ValueError(f"channel {self.channel_id}: negative balance")
        if self.balance_a_msat + self.balance_b_msat != self.capacity_msat:
            raise ValueError(
                f"channel {self.channel_id}: balances "
                f"{self.balance_a_msat}+{self.balance_b_msat} != capacity {self.capacity_msat}"
            )

    def peer(self, node: str) -> str:
        if node == self.node_a:
            return self.node_b
        if node == self.node_b:
            return self.node_a
        raise ValueError(f"{node} is not an endpoint of channel {self.channel_id}")

    def policy_from(self, node: str) -> ChannelPolicy:
        """Policy governing a forward sent out by ``node`` over this channel."""
        return self.policy_a if node == self.node_a else self.policy_b

    def balance_from(self, node: str) -> int:
        return self.balance_a_msat if node == self.node_a else self.balance_b_msat

    def push(self, from_node: str, amount_msat: int) -> None:
        """Move ``amount_msat`` from ``from_node``'s side to the peer's side."""
        if self.balance_from(from_node) < amount_msat:
            raise ValueError(f"channel {self.channel_id}: insufficient balance")
        if from_node == self.node_a:
            self.balance_a_msat -= amount_msat
            self.balance_b_msat += amount_msat
        else:
            self.balance_b_msat -= amount_msat
            self.balance_a_msat += amount_msat


@dataclass
class NetworkGraph:
    """Nodes plus a multiset of channels, with per-node adjacency lists.

    Equality compares nodes, channels, and adjacency (bookkeeping counters
    are excluded), so add_channel followed by remove_channel restores a graph
    equal to the original.
    """

    channels: dict[str, Channel] = field(default_factory=dict)
    adjacency: dict[str, list[str]] = field(default_factory=dict)
    _version: int = field(default=0, compare=False, repr=False)
    _channel_seq: int = field(default=0, compare=False, repr=False)
    _route_index: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def nodes(self):
        return self.adjacency.keys()

    def node_count(self) -> int:
        return len(self.adjacency)

    def channel_count(self) -> int:
        return len(self.channels)

    def has_node(self, node: str) -> bool:
        return node in self.adjacency

    def add_node(self, node: str) -> None:
        if not node:
            raise ValueError("node id must be non-empty")
        if node in self.adjacency:
            raise ValueError(f"duplicate node id {node!r}")
        self.adjacency[node] = []

    def add_channel(
        self,
        a: str,
        b: str,
        capacity_msat: int,
        *,
        balance_a_msat: int | None = None,
        policy_a: ChannelPolicy | None = None,
        policy_b: ChannelPolicy | None = None,
        channel_id: str | None = None,
    ) -> str:
        """Open a channel a<->b and return its id.

        ``balance_a_msat`` defaults to an equal split (capacity // 2 on a's
        side). Policies default to the network-wide defaults.
        """
        if a not in self.adjacency:
            raise ValueError(f"unknown node {a!r}")
        if b not in self.adjacency:
            raise ValueError(f"unknown node {b!r}")
        if channel_id is None:
            channel_id = f"ch{self._channel_seq:08d}"
            self._channel_seq += 1
        if channel_id in self.channels:
            raise ValueError(f"duplicate channel id {channel_id!r}")
        if balance_a_msat is None:
            balance_a_msat = capacity_msat // 2
        chan = Channel(
            channel_id=channel_id,
            node_a=a,
            node_b=b,
            capacity_msat=capacity_msat,
            balance_a_msat=balance_a_msat,
            balance_b_msat=capacity_msat - balance_a_msat,
            policy_a=policy_a if policy_a is not None else ChannelPolicy(),
            policy_b=policy_b if policy_b is not None else ChannelPolicy(),
        )
        self.channels[channel_id] = chan
        self.adjacency[a].append(channel_id)
        self.adjacency[b].append(channel_id)
        self._version += 1
        return channel_id

    def remove_channel(self, channel_id: str) -> None:
        chan = self.channels.pop(channel_id, None)
        if chan is None:
            raise ValueError(f"unknown channel {channel_id!r}")
        self.adjacency[chan.node_a].remove(channel_id)
        self.adjacency[chan.node_b].remove(channel_id)
        self._version += 1

    def channel(self, channel_id: str) -> Channel:
        return self.channels[channel_id]

    def channels_of(self, node: str) -> list[Channel]:
        return [self.channels[cid] for cid in self.adjacency[node]]

    def clone(self) -> "NetworkGraph":
        g = NetworkGraph()
        g.channels = {cid: replace(c) for cid, c in self.channels.items()}
        g.adjacency = {n: list(cids) for n, cids in self.adjacency.items()}
        g._channel_seq = self._channel_seq
        return g

    def fingerprint(self) -> str:
        """Stable digest of the full graph state, balances included."""
        payload = {
            "nodes": sorted(self.adjacency),
            "channels": sorted(
                (
                    c.channel_id, c.node_a, c.node_b, c.capacity_msat,
                    c.balance_a_msat, c.balance_b_msat,
                    _policy_tuple(c.policy_a), _policy_tuple(c.policy_b),
                )
                for c in self.channels.values()
            ),
        }
        blob = json.dumps(payload, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _policy_tuple(p: ChannelPolicy):
    return [p.base_fee_msat, p.prop_fee_millionths, p.cltv_delta, p.enabled]


def peer_degrees(g: NetworkGraph) -> dict[str, int]:
    """Distinct-peer count per node on the undirected channel projection."""
    return {
        node: len({g.channels[cid].peer(node) for cid in cids})
        for node, cids in g.adjacency.items()
    }


@dataclass
class FeeGraph:
    """Capacity-filtered simple digraph whose weights are forwarding fees.

    Parallel channels between the same ordered pair collapse to the
    minimum-fee edge; directions that are disabled or cannot carry
    ``amount_msat`` are absent.
    """

    amount_msat: int
    nodes: list[str]
    edges: dict[tuple[str, str], int]
    adj: dict[str, list[tuple[str, int]]]
    _node_set: frozenset = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self._node_set:
            self._node_set = frozenset(self.nodes)

    def has_node(self, v: str) -> bool:
        return v in self._node_set


def build_fee_graph(g: NetworkGraph, amount_msat: int,
                    exclude: frozenset[str] | None = None) -> FeeGraph:
    """Reduce ``g`` to the simple fee-weighted digraph at ``amount_msat``.

    ``exclude`` drops the listed nodes (and their edges) entirely; strategy
    code uses it to evaluate the network without the joining node.
    """
    if amount_msat <= 0:
        raise ValueError("amount_msat must be positive")
    excluded = exclude or frozenset()
    nodes = [n for n in g.adjacency if n not in excluded]
    edges: dict[tuple[str, str], int] = {}
    for u in nodes:
        for cid in g.adjacency[u]:
            chan = g.channels[cid]
            if chan.capacity_msat < amount_msat:
                continue
            pol = chan.policy_from(u)
            if not pol.enabled:
                continue
            v = chan.peer(u)
            if v in excluded:
                continue
            w = fee(pol, amount_msat)
            key = (u, v)
            if key not in edges or w < edges[key]:
                edges[key] = w
    adj: dict[str, list[tuple[str, int]]] = {n: [] for n in nodes}
    for (u, v), w in edges.items():
        adj[u].append((v, w))
    for lst in adj.values():
        lst.sort()
    return FeeGraph(amount_msat=amount_msat, nodes=nodes, edges=edges, adj=adj)


def degree(fg: FeeGraph, v: str) -> int:
    """Number of distinct out-neighbors of ``v`` in the fee graph."""
    if not fg.has_node(v):
        raise ValueError(f"unknown node {v!r}")
    return len(fg.adj.get(v, ()))
