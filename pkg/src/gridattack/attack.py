"""Constructors for minimum-cost data attacks on the measurement graph.

Every attack is built on a graph cut. Hidden attacks touch the whole cut
(one injected measurement, the rest jammed or, without jamming, all
injected) so the estimator's residual is unchanged. Detectable attacks
leave part of the cut untouched and rely on the bad-data remover discarding
that untouched residue: the injected measurements must form a strict
majority of the surviving cut edges.

Designers return an AttackPlan, or Infeasible when no structure can exist
(for generalized attacks only an all-secure system), or NoSolutionFound
when the iterative constrained-cut search exhausts without a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

from .errors import InvalidCosts
from .grid import REFERENCE_BUS, MeasurementGraph
from .mincut import INFINITY, CutResult, CutSolver, WeightedGraph, cut_from_side


class AttackType(Enum):
    HIDDEN_INJECTION = "hidden-injection"
    DETECTABLE_INJECTION = "detectable-injection"
    HIDDEN_JAMMING = "hidden-jamming"
    DETECTABLE_JAMMING = "detectable-jamming"
    HIDDEN_GENERALIZED = "hidden-generalized"
    DETECTABLE_GENERALIZED = "detectable-generalized"

    @property
    def hidden(self) -> bool:
        return self in (
            AttackType.HIDDEN_INJECTION,
            AttackType.HIDDEN_JAMMING,
            AttackType.HIDDEN_GENERALIZED,
        )


class CostInterval(Enum):
    I = "I"
    II = "II"
    III = "III"


class CutConstraint(Enum):
    """Cut-composition constraints for the iterative constrained search."""

    SECURE_MINORITY = "secure-minority"  # case A: secure edges strictly below half
    SECURE_WEAK_MAJORITY = "secure-weak-majority"  # case B: secure at least half, >=1 insecure


@dataclass(frozen=True)
class CostModel:
    """Per-measurement adversary costs; jamming never beats injecting."""

    p_inject: float
    p_jam_secure: float
    p_jam_insecure: float

    def __post_init__(self):
        ok = 0 < self.p_jam_insecure <= self.p_jam_secure <= self.p_inject
        if not ok:
            raise InvalidCosts(
                f"need 0 < p_jam_insecure <= p_jam_secure <= p_inject, got "
                f"({self.p_inject}, {self.p_jam_secure}, {self.p_jam_insecure})"
            )


@dataclass(frozen=True)
class Infeasible:
    """No attack of the requested type exists, proven structurally."""

    reason: str = ""


@dataclass(frozen=True)
class NoSolutionFound:
    """The heuristic search gave up; not a proof of infeasibility."""

    reason: str = ""


@dataclass(frozen=True)
class AttackPlan:
    """Per-measurement actions on one cut, with the exact total cost."""

    attack_type: AttackType
    cut: CutResult
    injected: frozenset[int]
    jammed_insecure: frozenset[int]
    jammed_secure: frozenset[int]
    injection_state_shift: tuple[int, ...]
    total_cost: float

    @property
    def touched(self) -> frozenset[int]:
        return self.injected | self.jammed_insecure | self.jammed_secure

    @property
    def untouched(self) -> frozenset[int]:
        return frozenset(self.cut.edges) - self.touched

    @property
    def jammed(self) -> frozenset[int]:
        return self.jammed_insecure | self.jammed_secure


DesignResult = Union[AttackPlan, Infeasible, NoSolutionFound]


def classify_interval(cost: CostModel) -> CostInterval:
    """Which of the three relative-cost regimes the triple falls in.

    Boundaries go by the closed comparisons: interval I requires both
    jamming costs at or above half the injection cost, interval II keeps
    cheap insecure jamming but the two jamming costs together still reach
    the injection cost, interval III is everything cheaper.
    """
    if not 0 < cost.p_jam_insecure <= cost.p_jam_secure <= cost.p_inject:
        raise InvalidCosts("cost triple violates the permissible ordering")
    half = cost.p_inject / 2.0
    if cost.p_jam_insecure >= half and cost.p_jam_secure >= half:
        return CostInterval.I
    if cost.p_jam_secure + cost.p_jam_insecure >= cost.p_inject:
        return CostInterval.II
    return CostInterval.III


def _state_shift(graph: MeasurementGraph, cut: CutResult) -> tuple[int, ...]:
    """0-1 indicator of the reference-free cut side, reference entry last and 0."""
    side = cut.side_a
    if REFERENCE_BUS in side:
        side = frozenset(graph.nodes) - side
    vec = [0] * len(graph.nodes)
    for node in side:
        vec[graph.state_index(node)] = 1
    return tuple(vec)


def _assemble(
    attack_type: AttackType,
    graph: MeasurementGraph,
    cut: CutResult,
    injected: Sequence[int],
    jammed_insecure: Sequence[int],
    jammed_secure: Sequence[int],
    cost: CostModel,
) -> AttackPlan:
    inj = frozenset(injected)
    jam_i = frozenset(jammed_insecure)
    jam_s = frozenset(jammed_secure)
    members = frozenset(cut.edges)
    secure = set(graph.secure_ids)
    assert inj <= members and jam_i <= members and jam_s <= members
    assert not (inj & (jam_i | jam_s)) and not (jam_i & jam_s)
    assert not (inj | jam_i) & secure and jam_s <= secure
    if attack_type.hidden:
        assert inj | jam_i | jam_s == members, "hidden attacks must touch the whole cut"
        assert inj, "hidden attacks inject at least one measurement"
    else:
        survivors = len(members) - len(jam_i) - len(jam_s)
        assert 2 * len(inj) > survivors, "injected edges must outnumber the surviving residue"
    total = (
        cost.p_inject * len(inj)
        + cost.p_jam_insecure * len(jam_i)
        + cost.p_jam_secure * len(jam_s)
    )
    return AttackPlan(
        attack_type=attack_type,
        cut=cut,
        injected=inj,
        jammed_insecure=jam_i,
        jammed_secure=jam_s,
        injection_state_shift=_state_shift(graph, cut),
        total_cost=total,
    )


def _insecure_pairs(graph: MeasurementGraph) -> list[tuple[int, int]]:
    return sorted({tuple(sorted((e.u, e.v))) for e in graph.edges if not e.secure})


def _sweep_min_cut(graph: MeasurementGraph, secure_w: float, insecure_w: float) -> Optional[CutResult]:
    """Lightest cut through some insecure edge, by an s-t sweep over them.

    Every cut separating the endpoints of an insecure edge contains that
    edge, and the optimum contains some insecure edge, so the sweep is
    exact. Returns None when the graph has no insecure edges.
    """
    pairs = _insecure_pairs(graph)
    if not pairs:
        return None
    solver = CutSolver(WeightedGraph.from_measurement_graph(graph, secure_w, insecure_w))
    best: Optional[tuple[int, CutResult]] = None
    for s, t in pairs:
        candidate = solver.min_st_cut(s, t)
        if best is None or candidate[0] < best[0]:
            best = candidate
    assert best is not None
    return best[1]


def _secure_free_min_cut(graph: MeasurementGraph) -> Optional[CutResult]:
    """Minimum-cardinality cut with no secure edges, or None."""
    cut = _sweep_min_cut(graph, secure_w=INFINITY, insecure_w=1.0)
    if cut is None or math.isinf(cut.weight):
        return None
    return cut


def constrained_min_cut(
    weighted: WeightedGraph,
    constraint: CutConstraint,
    beta: float = INFINITY,
    gamma: float = INFINITY,
    max_boosts: Optional[int] = None,
) -> Union[CutResult, NoSolutionFound]:
    """Iterative minimum-weight cut subject to a composition constraint.

    Recomputes the global minimum cut, and while the constraint fails,
    raises the weight of one violating cut edge by ``beta`` (the edge of
    minimum current weight, largest id on ties; a secure edge under the
    minority constraint, an insecure edge under the weak-majority one,
    except that a cut with no insecure edge gets a secure edge pushed to
    infinity). Gives up once the working cut weight reaches ``gamma`` or
    after ``max_boosts`` reweighting steps (defaults to the edge count).
    The returned cut reports its weight under the original weights.
    """
    working = {e.id: e.weight for e in weighted.edges}
    cap = len(weighted.edges) if max_boosts is None else max_boosts
    boosts = 0
    while True:
        graph = weighted.reweighted(working)
        _, cut = CutSolver(graph).global_min_cut()
        n_ins = cut.n_insecure
        if constraint is CutConstraint.SECURE_MINORITY:
            satisfied = 2 * cut.n_secure < len(cut.edges)
        else:
            satisfied = n_ins >= 1 and 2 * n_ins <= len(cut.edges)
        if satisfied:
            return cut_from_side(weighted.edges, cut.side_a)
        if cut.weight >= gamma:
            return NoSolutionFound(f"working cut weight {cut.weight} reached gamma {gamma}")
        if boosts >= cap:
            return NoSolutionFound(f"no constrained cut after {boosts} reweighting steps")
        edge_map = {e.id: e for e in weighted.edges}
        if constraint is CutConstraint.SECURE_MINORITY:
            candidates = [i for i in cut.edges if edge_map[i].secure]
            step = beta
        elif n_ins == 0:
            candidates = [i for i in cut.edges if edge_map[i].secure]
            step = INFINITY
        else:
            candidates = [i for i in cut.edges if not edge_map[i].secure]
            step = beta
        target = min(candidates, key=lambda i: (working[i], -i))
        working[target] = working[target] + step
        boosts += 1


def hidden_injection(graph: MeasurementGraph, cost: CostModel) -> DesignResult:
    """Inject along a minimum-cardinality cut that avoids every secure edge."""
    cut = _secure_free_min_cut(graph)
    if cut is None:
        return Infeasible("every cut contains a secure measurement")
    return _assemble(AttackType.HIDDEN_INJECTION, graph, cut, cut.edges, (), (), cost)


def hidden_jamming(graph: MeasurementGraph, cost: CostModel) -> DesignResult:
    """Same secure-free cut, but jam all of it except one injected edge."""
    cut = _secure_free_min_cut(graph)
    if cut is None:
        return Infeasible("every cut contains a secure measurement")
    ids = sorted(cut.edges)
    return _assemble(AttackType.HIDDEN_JAMMING, graph, cut, ids[:1], ids[1:], (), cost)


def _plan_jam_all_inject_one(
    attack_type: AttackType, graph: MeasurementGraph, cut: CutResult, cost: CostModel
) -> AttackPlan:
    secure = set(graph.secure_ids)
    ins = sorted(i for i in cut.edges if i not in secure)
    sec = sorted(i for i in cut.edges if i in secure)
    return _assemble(attack_type, graph, cut, ins[:1], ins[1:], sec, cost)


def hidden_generalized(graph: MeasurementGraph, cost: CostModel) -> DesignResult:
    """Lightest cut under jamming-cost weights; inject one edge, jam the rest.

    Secure edges weigh their jamming cost, insecure ones theirs; the
    injected edge upgrades one insecure jam to an injection, so the total
    is the cut weight plus the inject/jam-insecure cost difference. Exact
    for every permissible cost triple.
    """
    cut = _sweep_min_cut(graph, cost.p_jam_secure, cost.p_jam_insecure)
    if cut is None:
        return Infeasible("no insecure measurement to inject into")
    return _plan_jam_all_inject_one(AttackType.HIDDEN_GENERALIZED, graph, cut, cost)


def _cut_insecure_sorted(graph: MeasurementGraph, cut: CutResult) -> list[int]:
    secure = set(graph.secure_ids)
    return sorted(i for i in cut.edges if i not in secure)


def _case_a_unit(
    attack_type: AttackType,
    graph: MeasurementGraph,
    cost: CostModel,
    beta: float,
    gamma: float,
) -> Union[AttackPlan, NoSolutionFound]:
    """Minimum-cardinality secure-minority cut: inject half, jam one if even."""
    unit = WeightedGraph.from_measurement_graph(graph, 1.0, 1.0)
    found = constrained_min_cut(unit, CutConstraint.SECURE_MINORITY, beta, gamma)
    if isinstance(found, NoSolutionFound):
        return found
    size = len(found.edges)
    ins = _cut_insecure_sorted(graph, found)
    k_inject = (1 + size) // 2
    k_jam = 1 - size % 2
    return _assemble(
        attack_type,
        graph,
        found,
        ins[:k_inject],
        ins[k_inject : k_inject + k_jam],
        (),
        cost,
    )


def _case_a_cheap_jam(
    attack_type: AttackType,
    graph: MeasurementGraph,
    cost: CostModel,
    beta: float,
    gamma: float,
) -> Union[AttackPlan, NoSolutionFound]:
    """Secure-minority cut weighted for cheap insecure jamming.

    Inject one more insecure edge than there are secure ones; jam every
    other insecure edge; leave the secure edges as the removal residue.
    """
    weighted = WeightedGraph.from_measurement_graph(
        graph, cost.p_inject - cost.p_jam_insecure, cost.p_jam_insecure
    )
    found = constrained_min_cut(weighted, CutConstraint.SECURE_MINORITY, beta, gamma)
    if isinstance(found, NoSolutionFound):
        return found
    ins = _cut_insecure_sorted(graph, found)
    k_inject = found.n_secure + 1
    return _assemble(attack_type, graph, found, ins[:k_inject], ins[k_inject:], (), cost)


def _case_b(
    attack_type: AttackType,
    graph: MeasurementGraph,
    cost: CostModel,
    beta: float,
    gamma: float,
) -> Union[AttackPlan, NoSolutionFound]:
    """Secure-weak-majority cut: jam just enough secure edges for feasibility.

    Injects every insecure cut edge and jams secure edges until the
    injected ones form a strict majority of what survives.
    """
    weighted = WeightedGraph.from_measurement_graph(
        graph, cost.p_jam_secure, cost.p_inject - cost.p_jam_secure
    )
    found = constrained_min_cut(weighted, CutConstraint.SECURE_WEAK_MAJORITY, beta, gamma)
    if isinstance(found, NoSolutionFound):
        return found
    secure = set(graph.secure_ids)
    ins = _cut_insecure_sorted(graph, found)
    sec = sorted(i for i in found.edges if i in secure)
    k_jam_secure = found.n_secure + 1 - found.n_insecure
    return _assemble(attack_type, graph, found, ins, (), sec[:k_jam_secure], cost)


def detectable_injection(
    graph: MeasurementGraph,
    cost: CostModel,
    beta: float = INFINITY,
    gamma: float = INFINITY,
) -> DesignResult:
    """Inject a strict majority of a minimum secure-minority cut; jam nothing."""
    if not graph.insecure_ids:
        return Infeasible("no insecure measurement to inject into")
    unit = WeightedGraph.from_measurement_graph(graph, 1.0, 1.0)
    found = constrained_min_cut(unit, CutConstraint.SECURE_MINORITY, beta, gamma)
    if isinstance(found, NoSolutionFound):
        return found
    k = 1 + len(found.edges) // 2
    ins = _cut_insecure_sorted(graph, found)
    return _assemble(AttackType.DETECTABLE_INJECTION, graph, found, ins[:k], (), (), cost)


def detectable_jamming(
    graph: MeasurementGraph,
    cost: CostModel,
    beta: float = INFINITY,
    gamma: float = INFINITY,
) -> DesignResult:
    """Injection plus jamming of insecure measurements only.

    Below half the injection cost, jamming substitutes for injections and
    the cut is weighted accordingly; from half upward the best cut is the
    minimum-cardinality one with at most one jammed edge to make the
    surviving count odd.
    """
    if not graph.insecure_ids:
        return Infeasible("no insecure measurement to inject into")
    if cost.p_jam_insecure < cost.p_inject / 2.0:
        return _case_a_cheap_jam(AttackType.DETECTABLE_JAMMING, graph, cost, beta, gamma)
    return _case_a_unit(AttackType.DETECTABLE_JAMMING, graph, cost, beta, gamma)


def detectable_generalized(
    graph: MeasurementGraph,
    cost: CostModel,
    beta: float = INFINITY,
    gamma: float = INFINITY,
) -> DesignResult:
    """Best detectable attack using all three tools, dispatched by interval.

    Interval I compares the minimum-cardinality secure-minority plan with
    the jam-the-secure-surplus plan; interval II does the same with the
    cheap-jamming weighting; interval III collapses to the hidden
    generalized structure with a single injection.
    """
    if not graph.insecure_ids:
        return Infeasible("no insecure measurement to inject into")
    interval = classify_interval(cost)
    if interval is CostInterval.III:
        cut = _sweep_min_cut(graph, cost.p_jam_secure, cost.p_jam_insecure)
        assert cut is not None
        return _plan_jam_all_inject_one(AttackType.DETECTABLE_GENERALIZED, graph, cut, cost)
    if interval is CostInterval.I:
        plan_a = _case_a_unit(AttackType.DETECTABLE_GENERALIZED, graph, cost, beta, gamma)
    else:
        plan_a = _case_a_cheap_jam(AttackType.DETECTABLE_GENERALIZED, graph, cost, beta, gamma)
    plan_b = _case_b(AttackType.DETECTABLE_GENERALIZED, graph, cost, beta, gamma)
    plans = [p for p in (plan_a, plan_b) if isinstance(p, AttackPlan)]
    if not plans:
        return NoSolutionFound("both constrained sub-problems exhausted")
    return min(plans, key=lambda p: p.total_cost)


DESIGNERS = {
    AttackType.HIDDEN_INJECTION: hidden_injection,
    AttackType.DETECTABLE_INJECTION: detectable_injection,
    AttackType.HIDDEN_JAMMING: hidden_jamming,
    AttackType.DETECTABLE_JAMMING: detectable_jamming,
    AttackType.HIDDEN_GENERALIZED: hidden_generalized,
    AttackType.DETECTABLE_GENERALIZED: detectable_generalized,
}


def design(attack_type: AttackType, graph: MeasurementGraph, cost: CostModel) -> DesignResult:
    """Run the designer registered for the given attack type."""
    return DESIGNERS[attack_type](graph, cost)
