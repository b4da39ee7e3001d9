# -*- coding: utf-8 -*-
"""Unittests for code in the growth module.

This module contains code to test the content
of the pydhtsp.core.growth module using pytest.

Example:
    To run the tests you can for example:
        - Run the pytest command from the command line:
            ..> pytest
        - Run the tests.py file in the repos top-level:
            ..> python tests.py
"""


import io
import json

import pytest

from pydhtsp.core.components import init
from pydhtsp.core.growth import EdgeFrontier
from pydhtsp.core.growth import IterationEvent
from pydhtsp.core.growth import JsonlTraceSink
from pydhtsp.core.growth import check_dual_feasibility
from pydhtsp.core.growth import epsilon1
from pydhtsp.core.growth import epsilon2
from pydhtsp.core.growth import epsilon3
from pydhtsp.core.growth import replay
from pydhtsp.core.growth import run
from pydhtsp.core.instance import Instance
from pydhtsp.core.instance import generate

from test.utils import assert_obj_attr
from test.utils import integer_instance
from test.utils import single_target

from test.cases.cases_growth_trace import cases


def component(state, forest, vertex):
    return state.forests[forest].component_of(vertex)


@pytest.mark.parametrize("case", cases())
@pytest.mark.parametrize("exact", [False, True])
@pytest.mark.parametrize("scan", ["incremental", "full"])
def test_trace_goldens(case, exact, scan):
    """Test the JSONL trace of hand traced single target runs."""
    stream = io.StringIO()
    result = run(single_target(case["cost1"], case["cost2"], exact=exact),
                 trace=JsonlTraceSink(stream), scan=scan, check_invariants=True)

    assert stream.getvalue().splitlines() == case["trace"]
    assert_obj_attr(result, "iterations", len(case["trace"]))


def test_first_trace_state():
    """cost1 = 3, cost2 = 1: F1 stays empty, F2 holds (d2, t)."""
    result = run(single_target(3, 1))
    state = result.state

    assert state.forests[1].edges == []
    assert state.forests[2].edges == [(0, 1)]
    assert state.labels == [None, {1}]
    assert result.history.total(1) == 1
    assert result.events[1].eps_min == 0


def test_empty_instance():
    result = run(generate(0, seed=1))

    assert result.iterations == 0
    assert result.state.forests[1].edges == []
    assert result.state.forests[2].edges == []


def test_epsilon1():
    instance = Instance([[0, 5, 9], [5, 0, 4], [9, 4, 0]], [[0, 9, 9], [9, 0, 4], [9, 4, 0]])
    state = init(instance)

    # Two active singletons meet halfway, the depot edge needs the full cost.
    assert epsilon1(state) == (2, (1, 2))

    state.merge(1, component(state, 1, 1), component(state, 1, 2), (1, 2))
    state.merge(2, component(state, 2, 1), component(state, 2, 2), (1, 2))
    assert epsilon1(state) == (5, (0, 1))

    # Nothing is left once everything is inactive.
    state.merge(1, component(state, 1, 0), component(state, 1, 1), (0, 1))
    assert epsilon1(state) is None


def test_epsilon2():
    state = init(single_target(3, 1))
    assert epsilon2(state) == (1, (0, 1))

    state.merge(2, component(state, 2, 0), component(state, 2, 1), (0, 1))
    assert epsilon2(state) is None


def test_epsilon3():
    state = init(single_target(3, 1))
    assert epsilon3(state) is None

    state.bump_duals(1.0)
    state.merge(2, component(state, 2, 0), component(state, 2, 1), (0, 1))
    assert epsilon3(state) == (0, component(state, 1, 1))


def test_epsilon3_cluster():
    """A cluster becomes a candidate once its last child has left."""
    state = init(generate(4, seed=2))
    state.bump_duals(1.0)
    for u, v in ((1, 2), (2, 3), (3, 4)):
        state.merge(1, component(state, 1, u), component(state, 1, v), (u, v))
    cluster = component(state, 1, 1)

    for vertex in (1, 2, 3):
        state.merge(2, component(state, 2, vertex), component(state, 2, 0), (0, vertex))
    assert epsilon3(state) is None

    state.merge(2, component(state, 2, 4), component(state, 2, 0), (0, 4))
    assert epsilon3(state) == (0, cluster)


def test_epsilon3_cluster_slack():
    """Children leaving after a bump leave Bound(C) - w(C) behind."""
    state = init(generate(4, seed=2))
    state.bump_duals(1.0)
    for u, v in ((1, 2), (2, 3), (3, 4)):
        state.merge(1, component(state, 1, u), component(state, 1, v), (u, v))
    cluster = component(state, 1, 1)

    for vertex in (1, 2):
        state.merge(2, component(state, 2, vertex), component(state, 2, 0), (0, vertex))

    # Two children remain: w grows by 0.5, the bound by twice that.
    state.bump_duals(0.5)
    for vertex in (3, 4):
        state.merge(2, component(state, 2, vertex), component(state, 2, 0), (0, vertex))

    assert state.get_w(cluster) == 4.5
    assert state.get_bound(cluster) == 5
    assert epsilon3(state) == (0.5, cluster)


@pytest.mark.parametrize("seed", range(20))
def test_epsilon2_dominates_epsilon1(seed):
    """Equally active target pairs with equal potentials reach E1 first.

    Costs between targets are lower for vehicle 1, so along a run every
    such pair has an F2 candidate at least as large as its F1 candidate.
    """
    instance = integer_instance(3 + seed % 5, seed=100 + seed, factor=1 + seed % 3)
    state = init(instance)
    first, second = state.forests[1], state.forests[2]
    compared = 0

    for _ in range(3 * instance.n_targets + 2):
        if not state.has_active(1):
            break
        for u in range(1, instance.size):
            for v in range(u + 1, instance.size):
                if first.component[u] == first.component[v] or second.component[u] == second.component[v]:
                    continue
                if (first.active[u], first.active[v]) != (second.active[u], second.active[v]):
                    continue
                if first.potential[u] != second.potential[u] or first.potential[v] != second.potential[v]:
                    continue
                rate = int(first.active[u]) + int(first.active[v])
                if rate == 0:
                    continue
                reduced1 = first.cost[u, v] - first.potential[u] - first.potential[v]
                reduced2 = second.cost[u, v] - second.potential[u] - second.potential[v]
                assert reduced2 / rate >= reduced1 / rate
                compared += 1
        _apply(state, (epsilon1(state), epsilon2(state)), epsilon3(state))

    assert compared > 0


def test_edge_frontier_matches_scan():
    """The cached tight times agree with a full scan after every event."""
    instance = integer_instance(7, seed=3, factor=2)
    state = init(instance)
    frontiers = {forest: EdgeFrontier(state, forest) for forest in (1, 2)}
    full = init(instance)

    for _ in range(3 * 7 + 2):
        if not state.has_active(1):
            break
        expected = (epsilon1(full), epsilon2(full))
        assert (frontiers[1].pick(), frontiers[2].pick()) == expected
        _apply(state, expected, epsilon3(state))
        _apply(full, expected, epsilon3(full))


@pytest.mark.parametrize("seed", range(25))
def test_scans_agree_exactly(seed):
    """In rational arithmetic both strategies emit the same trace."""
    instance = integer_instance(3 + seed % 8, seed=seed, factor=1 + seed % 3)

    incremental = run(instance, scan="incremental", check_invariants=True)
    full = run(instance, scan="full", check_invariants=True)

    assert [event.to_dict() for event in incremental.events] == [event.to_dict() for event in full.events]
    assert [event.eps_min for event in incremental.events] == [event.eps_min for event in full.events]


@pytest.mark.parametrize("seed", range(40))
def test_run_properties(seed):
    """Iteration bound, case priority, dual feasibility and coverage."""
    n = 2 + seed % 12
    instance = generate(n, alpha=[1, 1.2, 2, 5][seed % 4], seed=seed)
    result = run(instance, check_invariants=True)
    state = result.state

    assert result.iterations <= 3 * n + 2
    assert not state.has_active(1)
    assert not state.has_active(2)
    check_dual_feasibility(state)

    for event in result.events:
        values = [eps for eps in (event.eps1, event.eps2, event.eps3) if eps is not None]
        assert event.eps_min == min(values) >= 0
        if event.case == "E2":
            assert event.eps1 is None or event.eps1 > event.eps_min
        if event.case == "E3":
            assert all(eps is None or eps > event.eps_min for eps in (event.eps1, event.eps2))

    # A target away from d1 in F1 was deactivated only after its F2 part reached d2.
    for target in range(1, n + 1):
        in_depot1 = component(state, 1, target) == component(state, 1, 0)
        in_depot2 = component(state, 2, target) == component(state, 2, 0)
        assert in_depot1 or in_depot2


def test_run_is_deterministic():
    instance = generate(30, alpha=1.3, seed=11)
    first, second = run(instance), run(instance)
    assert [event.to_dict() for event in first.events] == [event.to_dict() for event in second.events]


def test_run_unknown_scan():
    with pytest.raises(ValueError):
        run(single_target(1, 2), scan="heap")


def test_iteration_event():
    event = IterationEvent(3, 1.5, None, 0.0, 0.0, "E3", deactivated=[2, 4])
    json_ = event.to_dict()

    assert json_ == {"iter": 3, "eps": [1.5, None, 0], "case": "E3", "deactivated": [2, 4]}
    assert json.dumps(json_) == '{"iter": 3, "eps": [1.5, null, 0], "case": "E3", "deactivated": [2, 4]}'

    back = IterationEvent.from_dict(json.loads(json.dumps(json_)))
    assert back.to_dict() == json_
    assert back.eps_min == 0

    with pytest.raises(ValueError, match="E4"):
        IterationEvent.from_dict(dict(json_, case="E4"))


def test_replay():
    """The forests after every iteration follow from the trace alone."""
    instance = generate(8, alpha=1.5, seed=6)
    stream = io.StringIO()
    result = run(instance, trace=JsonlTraceSink(stream))

    lines = [json.loads(line) for line in stream.getvalue().splitlines()]
    snapshots = replay(lines, instance.n_targets)

    assert len(snapshots) == result.iterations
    last = snapshots[-1]
    assert last.edges1 == sorted(result.state.forests[1].edges)
    assert last.edges2 == sorted(result.state.forests[2].edges)
    assert last.deactivated == [sorted(label) for label in result.state.deactivated]

    with pytest.raises(ValueError):
        replay(lines, 1)


def _apply(state, edges, third):
    first, second = edges
    values = [candidate[0] if candidate is not None else None for candidate in (first, second, third)]
    eps_min = min(value for value in values if value is not None)
    state.bump_duals(eps_min)

    if first is not None and first[0] <= eps_min:
        forest, (u, v) = 1, first[1]
    elif second is not None and second[0] <= eps_min:
        forest, (u, v) = 2, second[1]
    else:
        state.deactivate_with_label(third[1])
        return

    state.merge(forest, component(state, forest, u), component(state, forest, v), (u, v))
