"""Brute-force ground truth for minimum attack costs on small graphs.

Enumerates every bipartition whose two sides are internally connected (any
attack on a cut with a disconnected side splits into a cheaper attack on a
sub-cut, so nothing is lost) and, per cut, every admissible action split by
counts, since all insecure edges share one cost and all secure edges share
another.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .attack import AttackPlan, AttackType, CostModel, Infeasible, _assemble
from .errors import TooLarge
from .grid import MeasurementGraph, connected
from .mincut import CutResult

MAX_ORACLE_NODES = 12


@dataclass(frozen=True)
class _CensusCut:
    side: frozenset[int]
    secure: tuple[int, ...]
    insecure: tuple[int, ...]


def _induced_connected(side: frozenset[int], graph: MeasurementGraph) -> bool:
    pairs = [(e.u, e.v) for e in graph.edges if e.u in side and e.v in side]
    return connected(side, pairs)


@lru_cache(maxsize=256)
def _cut_census(graph: MeasurementGraph) -> tuple[_CensusCut, ...]:
    secure_ids = set(graph.secure_ids)
    others = list(graph.nodes[1:])
    all_nodes = frozenset(graph.nodes)
    cuts = []
    for mask in range(1, 1 << len(others)):
        side = frozenset(v for i, v in enumerate(others) if mask >> i & 1)
        rest = all_nodes - side
        if not _induced_connected(side, graph) or not _induced_connected(rest, graph):
            continue
        members = [e.id for e in graph.edges if (e.u in side) != (e.v in side)]
        cuts.append(
            _CensusCut(
                side=side,
                secure=tuple(sorted(i for i in members if i in secure_ids)),
                insecure=tuple(sorted(i for i in members if i not in secure_ids)),
            )
        )
    return tuple(cuts)


def _best_split(
    attack_type: AttackType, n_sec: int, n_ins: int, cost: CostModel
) -> Optional[tuple[float, tuple[int, int, int]]]:
    """Cheapest admissible (inject, jam-insecure, jam-secure) counts for a cut."""
    p_i, p_s, p_sc = cost.p_inject, cost.p_jam_secure, cost.p_jam_insecure
    size = n_sec + n_ins
    if n_ins == 0:
        return None
    if attack_type.hidden:
        # whole cut touched: secure edges all jammed, insecure split inject/jam
        if attack_type is AttackType.HIDDEN_INJECTION:
            if n_sec > 0:
                return None
            return p_i * n_ins, (n_ins, 0, 0)
        if attack_type is AttackType.HIDDEN_JAMMING and n_sec > 0:
            return None
        k = np.arange(1, n_ins + 1)
        costs = p_i * k + p_sc * (n_ins - k) + p_s * n_sec
        best = int(np.argmin(costs))
        return float(costs[best]), (int(k[best]), n_ins - int(k[best]), n_sec)
    # detectable: injected edges must strictly outnumber the untouched residue
    jam_ins_max = 0 if attack_type is AttackType.DETECTABLE_INJECTION else n_ins
    jam_sec_max = n_sec if attack_type is AttackType.DETECTABLE_GENERALIZED else 0
    ki = np.arange(1, n_ins + 1).reshape(-1, 1, 1)
    kji = np.arange(0, jam_ins_max + 1).reshape(1, -1, 1)
    kjs = np.arange(0, jam_sec_max + 1).reshape(1, 1, -1)
    feasible = (ki + kji <= n_ins) & (2 * ki > size - kji - kjs)
    if not feasible.any():
        return None
    costs = p_i * ki + p_sc * kji + p_s * kjs + np.where(feasible, 0.0, np.inf)
    flat = int(np.argmin(costs))
    a, b, c = np.unravel_index(flat, costs.shape)
    return float(costs[a, b, c]), (int(ki[a, 0, 0]), int(kji[0, b, 0]), int(kjs[0, 0, c]))


def optimal_cost(
    graph: MeasurementGraph,
    cost: CostModel,
    attack_type: AttackType,
    max_nodes: int = MAX_ORACLE_NODES,
) -> Union[tuple[float, AttackPlan], Infeasible]:
    """True minimum attack cost and a witness plan, by full enumeration."""
    if len(graph.nodes) > max_nodes:
        raise TooLarge(f"{len(graph.nodes)} nodes exceeds the oracle cap {max_nodes}")
    memo: dict[tuple[int, int], Optional[tuple[float, tuple[int, int, int]]]] = {}
    best: Optional[tuple[float, _CensusCut, tuple[int, int, int]]] = None
    for entry in _cut_census(graph):
        key = (len(entry.secure), len(entry.insecure))
        if key not in memo:
            memo[key] = _best_split(attack_type, key[0], key[1], cost)
        found = memo[key]
        if found is None:
            continue
        value, counts = found
        if best is None or value < best[0]:
            best = (value, entry, counts)
    if best is None:
        return Infeasible(f"no cut admits a {attack_type.value} attack")
    value, entry, (k_inject, k_jam_ins, k_jam_sec) = best
    members = tuple(sorted(entry.secure + entry.insecure))
    cut = CutResult(
        side_a=entry.side,
        edges=members,
        weight=float(len(members)),
        n_secure=len(entry.secure),
        n_insecure=len(entry.insecure),
    )
    plan = _assemble(
        attack_type,
        graph,
        cut,
        entry.insecure[:k_inject],
        entry.insecure[k_inject : k_inject + k_jam_ins],
        entry.secure[:k_jam_sec],
        cost,
    )
    assert abs(plan.total_cost - value) < 1e-9
    return value, plan
