"""Weighted cut engines: s-t min cut, global min cut, exhaustive enumeration.

Parallel edges are merged per node pair inside the flow solver but cuts are
always reported edge-by-edge. Weights may be +inf, which is absorbing: an
infinite edge never enters a returned cut while any finite cut exists.

Tie-breaking is exact and deterministic. Each edge weight is quantized to
1e-12 and packed into a single integer together with an edge-count term and
a per-edge binary marker, ordered so that the solver minimizes weight first,
then the number of cut edges, then the lexicographically smallest sorted
edge-id set. Because the markers are distinct powers of two, the minimizing
edge set is unique, and minimizing the edge count as a secondary objective
makes every returned cut inclusion-minimal: both sides of the bipartition
induce connected subgraphs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import TooLarge

INFINITY = math.inf

_SCALE = 10**12  # weight quantum; weights within 1e-12 are tied


@dataclass(frozen=True)
class WeightedEdge:
    id: int
    u: int
    v: int
    weight: float
    secure: bool = False


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected multigraph with nonnegative (possibly infinite) edge weights."""

    nodes: tuple[int, ...]
    edges: tuple[WeightedEdge, ...]

    def __post_init__(self):
        node_set = set(self.nodes)
        seen = set()
        for e in self.edges:
            if e.u == e.v or e.u not in node_set or e.v not in node_set:
                raise ValueError(f"edge {e.id} has invalid endpoints ({e.u},{e.v})")
            if math.isnan(e.weight) or e.weight < 0:
                raise ValueError(f"edge {e.id} weight must be nonnegative")
            if e.id in seen:
                raise ValueError(f"duplicate edge id {e.id}")
            seen.add(e.id)

    @classmethod
    def from_measurement_graph(cls, graph, secure_weight: float, insecure_weight: float):
        """Weight every edge of a measurement graph by its security class."""
        edges = tuple(
            WeightedEdge(
                id=e.id,
                u=e.u,
                v=e.v,
                weight=secure_weight if e.secure else insecure_weight,
                secure=e.secure,
            )
            for e in graph.edges
        )
        return cls(nodes=tuple(graph.nodes), edges=edges)

    def reweighted(self, overrides: Mapping[int, float]) -> "WeightedGraph":
        edges = tuple(
            WeightedEdge(e.id, e.u, e.v, overrides.get(e.id, e.weight), e.secure)
            for e in self.edges
        )
        return WeightedGraph(nodes=self.nodes, edges=edges)


@dataclass(frozen=True)
class CutResult:
    """A graph cut: node bipartition, member edge ids, class counts, weight."""

    side_a: frozenset[int]
    edges: tuple[int, ...]
    weight: float
    n_secure: int
    n_insecure: int

    def __len__(self) -> int:
        return len(self.edges)


def cut_from_side(edges: Iterable[WeightedEdge], side: frozenset[int]) -> CutResult:
    """Materialize the cut defined by a node subset over the given edges."""
    members = [e for e in edges if (e.u in side) != (e.v in side)]
    n_sec = sum(1 for e in members if e.secure)
    if any(math.isinf(e.weight) for e in members):
        weight = INFINITY
    else:
        weight = float(sum(e.weight for e in members))
    return CutResult(
        side_a=side,
        edges=tuple(sorted(e.id for e in members)),
        weight=weight,
        n_secure=n_sec,
        n_insecure=len(members) - n_sec,
    )


class _Dinic:
    """Max-flow over arbitrary-precision integer capacities."""

    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add_undirected(self, u: int, v: int, c: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(c)

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        big = sum(self.cap) + 1
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for a in self.adj[u]:
                    v = self.to[a]
                    if self.cap[a] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return total
            it = [0] * self.n

            def dfs(u: int, limit: int) -> int:
                if u == t:
                    return limit
                while it[u] < len(self.adj[u]):
                    a = self.adj[u][it[u]]
                    v = self.to[a]
                    if self.cap[a] > 0 and level[v] == level[u] + 1:
                        pushed = dfs(v, min(limit, self.cap[a]))
                        if pushed > 0:
                            self.cap[a] -= pushed
                            self.cap[a ^ 1] += pushed
                            return pushed
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, big)
                if pushed == 0:
                    break
                total += pushed

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in self.adj[u]:
                v = self.to[a]
                if self.cap[a] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


class CutSolver:
    """Reusable exact min-cut solver for one weighted graph.

    Cut values are compared as packed integers (weight, edge count,
    edge-id lexicography), so results are exact and identical across calls.
    """

    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self._nodes = list(graph.nodes)
        self._index = {v: i for i, v in enumerate(self._nodes)}
        m = len(graph.edges)
        ranks = {eid: r for r, eid in enumerate(sorted(e.id for e in graph.edges))}
        count_unit = 1 << (m + 2)
        weight_unit = (m + 2) * count_unit
        finite = [round(e.weight * _SCALE) for e in graph.edges if not math.isinf(e.weight)]
        inf_quantum = sum(finite) + 1
        self._pair_caps: dict[tuple[int, int], int] = {}
        for e in graph.edges:
            quantum = inf_quantum if math.isinf(e.weight) else round(e.weight * _SCALE)
            marker = 1 << (m - 1 - ranks[e.id])
            composite = quantum * weight_unit + count_unit - marker
            a, b = self._index[e.u], self._index[e.v]
            key = (a, b) if a < b else (b, a)
            self._pair_caps[key] = self._pair_caps.get(key, 0) + composite

    def _network(self) -> _Dinic:
        net = _Dinic(len(self._nodes))
        for (a, b), cap in sorted(self._pair_caps.items()):
            net.add_undirected(a, b, cap)
        return net

    def min_st_cut(self, s: int, t: int) -> tuple[int, CutResult]:
        """Packed cut value and the unique optimal cut separating s and t."""
        if s == t:
            raise ValueError("s and t must differ")
        net = self._network()
        value = net.max_flow(self._index[s], self._index[t])
        side = frozenset(self._nodes[i] for i in net.reachable(self._index[s]))
        return value, cut_from_side(self.graph.edges, side)

    def global_min_cut(self) -> tuple[int, CutResult]:
        """Minimum over all proper bipartitions, as a sweep of s-t cuts."""
        if len(self._nodes) < 2:
            raise ValueError("global min cut needs at least two nodes")
        anchor = self._nodes[0]
        best: tuple[int, CutResult] | None = None
        for t in self._nodes[1:]:
            candidate = self.min_st_cut(anchor, t)
            if best is None or candidate[0] < best[0]:
                best = candidate
        assert best is not None
        return best


def min_st_cut(g: WeightedGraph, s: int, t: int) -> CutResult:
    """Minimum weight cut separating s and t; weight equals the max flow."""
    return CutSolver(g).min_st_cut(s, t)[1]


def global_min_cut(g: WeightedGraph) -> CutResult:
    """Minimum weight cut over all proper bipartitions."""
    return CutSolver(g).global_min_cut()[1]


def enumerate_cuts(g: WeightedGraph, max_nodes: int = 16) -> Iterator[CutResult]:
    """Every distinct cut of a small graph, one per proper bipartition.

    Yields 2**(n-1) - 1 cuts; the side reported never contains the first
    node. Raises TooLarge beyond ``max_nodes`` nodes.
    """
    if len(g.nodes) > max_nodes:
        raise TooLarge(f"{len(g.nodes)} nodes exceeds enumeration cap {max_nodes}")
    others = list(g.nodes[1:])
    for mask in range(1, 1 << len(others)):
        side = frozenset(v for i, v in enumerate(others) if mask >> i & 1)
        yield cut_from_side(g.edges, side)
