"""Weighted betweenness centrality and shortest-path counting on fee graphs.

Betweenness follows Brandes' dependency-accumulation scheme with a Dijkstra
pass per source. Values are unnormalized sums over ordered pairs (s, t) with
s != v != t on the directed fee graph; edge weights are integer fees, so
shortest-path comparisons are exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .graph import FeeGraph

INF = float("inf")


@dataclass
class _Indexed:
    nodes: list[str]
    index: dict[str, int]
    adj: list[list[tuple[int, int]]]     # u -> [(v, weight)]


def _indexed(fg: FeeGraph) -> _Indexed:
    index = {n: i for i, n in enumerate(fg.nodes)}
    adj: list[list[tuple[int, int]]] = [[] for _ in fg.nodes]
    for u, entries in fg.adj.items():
        ui = index[u]
        adj[ui] = [(index[v], w) for v, w in entries]
    return _Indexed(nodes=list(fg.nodes), index=index, adj=adj)


def _sssp_counts(ig: _Indexed, s: int):
    """Dijkstra from ``s``: settle order, distances, path counts, predecessors."""
    n = len(ig.nodes)
    dist = [INF] * n
    sigma = [0.0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    dist[s] = 0
    sigma[s] = 1.0
    order: list[int] = []
    done = [False] * n
    heap = [(0, s)]
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        d, u = pop(heap)
        if done[u] or d > dist[u]:
            continue
        done[u] = True
        order.append(u)
        su = sigma[u]
        for v, w in ig.adj[u]:
            nd = d + w
            dv = dist[v]
            if nd < dv:
                dist[v] = nd
                sigma[v] = su
                preds[v] = [u]
                push(heap, (nd, v))
            elif nd == dv:
                sigma[v] += su
                preds[v].append(u)
    return order, dist, sigma, preds


def betweenness(fg: FeeGraph) -> dict[str, float]:
    """Unnormalized weighted betweenness of every node in the fee graph."""
    ig = _indexed(fg)
    n = len(ig.nodes)
    bc = [0.0] * n
    for s in range(n):
        order, _dist, sigma, preds = _sssp_counts(ig, s)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return {ig.nodes[i]: bc[i] for i in range(n)}


def source_dependencies(fg: FeeGraph, source: str) -> dict[str, float]:
    """Brandes per-source dependency values delta_s(v) (diagnostic surface)."""
    ig = _indexed(fg)
    s = ig.index[source]
    order, _dist, sigma, preds = _sssp_counts(ig, s)
    delta = [0.0] * len(ig.nodes)
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
    return {ig.nodes[i]: delta[i] for i in range(len(ig.nodes))}


def all_pairs_distance_sigma(fg: FeeGraph):
    """Distance and shortest-path-count matrices for every ordered pair.

    Returns (D, S, index, nodes): D[i, j] is the shortest-path distance,
    S[i, j] the number of shortest paths (0 where unreachable).
    """
    ig = _indexed(fg)
    n = len(ig.nodes)
    D = np.full((n, n), INF)
    S = np.zeros((n, n))
    for s in range(n):
        _order, dist, sigma, _preds = _sssp_counts(ig, s)
        D[s, :] = dist
        S[s, :] = sigma
    return D, S, ig.index, ig.nodes


class ShortestPathCounts:
    """All-pairs sigma bookkeeping: total and via-node shortest-path counts."""

    def __init__(self, fg: FeeGraph):
        self.D, self.S, self.index, self.nodes = all_pairs_distance_sigma(fg)

    def distance(self, s: str, t: str) -> float:
        return self.D[self.index[s], self.index[t]]

    def sigma(self, s: str, t: str) -> float:
        if s == t:
            return 1.0
        return self.S[self.index[s], self.index[t]]

    def sigma_via(self, s: str, t: str, v: str) -> float:
        """Count of shortest s->t paths passing through interior node v."""
        si, ti, vi = self.index[s], self.index[t], self.index[v]
        if v in (s, t):
            return 0.0
        if self.D[si, vi] + self.D[vi, ti] != self.D[si, ti]:
            return 0.0
        return self.S[si, vi] * self.S[vi, ti]


def added_node_betweenness(
    D: np.ndarray,
    S: np.ndarray,
    attach: list[int],
    w_to_joiner: list[int],
    w_from_joiner: list[int],
) -> float:
    """Betweenness a new node would have after attaching to ``attach``.

    ``D``/``S`` describe the base graph (which must not contain the new
    node). ``w_to_joiner[i]`` is the weight of the edge attach[i] -> joiner,
    ``w_from_joiner[i]`` of joiner -> attach[i]. Equivalent to inserting the
    node, rebuilding the fee graph, and running Brandes, but in O(n^2).
    """
    if not attach:
        return 0.0
    a = np.asarray(attach)
    win = np.asarray(w_to_joiner, dtype=float)
    wout = np.asarray(w_from_joiner, dtype=float)

    to_j = D[:, a] + win[None, :]                   # (n, |A|)
    d_to = to_j.min(axis=1)                         # best s -> joiner
    sigma_to = np.where(to_j == d_to[:, None], S[:, a], 0.0).sum(axis=1)

    from_j = D[a, :] + wout[:, None]                # (|A|, n)
    d_from = from_j.min(axis=0)                     # best joiner -> t
    sigma_from = np.where(from_j == d_from[None, :], S[a, :], 0.0).sum(axis=0)

    d_via = np.add.outer(d_to, d_from)
    np.fill_diagonal(d_via, INF)                    # pairs need s != t
    # Pairs the joiner strictly improves are routed only through it: each
    # contributes exactly 1. Tied pairs split between old and via-j paths.
    bc = float((d_via < D).sum())
    tied = (d_via == D) & np.isfinite(d_via)
    rows, cols = np.nonzero(tied)
    if rows.size:
        sigma_via = sigma_to[rows] * sigma_from[cols]
        sigma_old = S[rows, cols]
        bc += float((sigma_via / (sigma_old + sigma_via)).sum())
    return bc
