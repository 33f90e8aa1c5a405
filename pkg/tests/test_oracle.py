"""The exhaustive cost oracle: frozen examples and cross-checks."""

import random

import numpy as np
import pytest

import gridattack as ga
from gridattack.attack import AttackType
from conftest import triangle_graph, random_cost, random_system

EXHAUSTIVE = ga.DetectorConfig(removal_mode=ga.RemovalMode.EXHAUSTIVE_MINIMAL)


def test_oracle_triangle_hidden_generalized():
    value, plan = ga.optimal_cost(triangle_graph(), ga.CostModel(1, 0.5, 0.25),
                                  AttackType.HIDDEN_GENERALIZED)
    assert value == pytest.approx(1.25)
    assert plan.cut.edges == (0, 2)


def test_oracle_triangle_detectable_generalized():
    value, _ = ga.optimal_cost(triangle_graph(), ga.CostModel(1, 0.8, 0.6),
                               AttackType.DETECTABLE_GENERALIZED)
    assert value == pytest.approx(1.6)


def test_oracle_all_secure_infeasible():
    g = triangle_graph(secure=(True, True, True))
    for t in AttackType:
        assert isinstance(ga.optimal_cost(g, ga.CostModel(1, 0.5, 0.25), t), ga.Infeasible)


def test_oracle_node_cap():
    rng = random.Random(51)
    sys_ = random_system(rng, n_buses=12, m=16)
    g = ga.build_graph(sys_)
    with pytest.raises(ga.TooLarge):
        ga.optimal_cost(g, ga.CostModel(1, 0.5, 0.25), AttackType.HIDDEN_GENERALIZED)


def test_oracle_lower_bounds_designers():
    rng = random.Random(52)
    for _ in range(25):
        sys_ = random_system(rng)
        g = ga.build_graph(sys_)
        cost = random_cost(rng)
        for t in AttackType:
            got = ga.design(t, g, cost)
            want = ga.optimal_cost(g, cost, t)
            if isinstance(got, ga.AttackPlan):
                assert isinstance(want, tuple)
                assert want[0] <= got.total_cost + 1e-12


def test_oracle_plans_verify():
    rng = random.Random(53)
    checked = 0
    for _ in range(15):
        sys_ = random_system(rng)
        g = ga.build_graph(sys_)
        cost = random_cost(rng)
        truth = np.zeros(sys_.n + 1)
        for t in AttackType:
            want = ga.optimal_cost(g, cost, t)
            if isinstance(want, tuple):
                verdict = ga.execute(sys_, truth, want[1], EXHAUSTIVE)
                assert verdict.success, (t, want[0])
                checked += 1
    assert checked >= 30


def test_oracle_detectable_needs_insecure_majority_cut():
    # cut of 1 insecure + 2 secure cannot host a pure injection attack
    sys_ = ga.MeasurementSystem(
        buses=(ga.Bus(0, is_reference=True), ga.Bus(1)),
        lines=(),
        measurements=(
            ga.Measurement(0, ga.MeasurementKind.PHASE_ANGLE, 1),
            ga.Measurement(1, ga.MeasurementKind.PHASE_ANGLE, 1, secure=True),
            ga.Measurement(2, ga.MeasurementKind.PHASE_ANGLE, 1, secure=True),
        ),
    )
    g = ga.build_graph(sys_)
    assert isinstance(
        ga.optimal_cost(g, ga.CostModel(1, 0.8, 0.6), AttackType.DETECTABLE_INJECTION),
        ga.Infeasible,
    )
    # but the generalized attack jams the secure pair and injects the loner
    value, plan = ga.optimal_cost(g, ga.CostModel(1, 0.8, 0.6), AttackType.DETECTABLE_GENERALIZED)
    assert plan.injected == frozenset({0})
    assert value == pytest.approx(1 + 2 * 0.8)
