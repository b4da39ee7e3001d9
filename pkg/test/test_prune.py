# -*- coding: utf-8 -*-
"""Unittests for code in the prune module.

This module contains code to test the content
of the pydhtsp.core.prune module using pytest.

Example:
    To run the tests you can for example:
        - Run the pytest command from the command line:
            ..> pytest
        - Run the tests.py file in the repos top-level:
            ..> python tests.py
"""


import networkx as nx
import pytest

from pydhtsp.core.components import init
from pydhtsp.core.error import InvariantViolationError
from pydhtsp.core.growth import run
from pydhtsp.core.instance import Instance
from pydhtsp.core.instance import generate
from pydhtsp.core.prune import prune
from pydhtsp.core.prune import prune_forests
from pydhtsp.core.prune import tree_cost

from test.utils import assert_obj_attr
from test.utils import assert_obj_func
from test.utils import integer_instance
from test.utils import random_instances
from test.utils import single_target


def test_prune_single_target():
    """The deactivated target is dropped from F1 and kept in F2."""
    hsf = prune(run(single_target(3, 1)).state)

    assert_obj_attr(hsf, "edges1", [])
    assert_obj_attr(hsf, "edges2", [(0, 1)])
    assert_obj_attr(hsf, "targets1", [])
    assert_obj_attr(hsf, "targets2", [1])
    assert_obj_attr(hsf, "cost", 1)
    assert_obj_func(hsf, "to_dict", None, {
        "edges1": [],
        "edges2": [[0, 1]],
        "targets2": [1],
        "partition": [[1]],
        "cost1": 0,
        "cost2": 1,
    })

    hsf = prune(run(single_target(1, 5)).state)
    assert hsf.edges1 == [(0, 1)]
    assert hsf.edges2 == []
    assert hsf.targets2 == []


def test_prune_forests_without_labels():
    """Without deactivated sets the whole d1 tree is kept."""
    edges1 = [(0, 1), (1, 2), (1, 3)]
    pruned1, pruned2, dropped, partition = prune_forests(edges1, [(2, 3)], [], 3)

    assert pruned1 == edges1
    assert pruned2 == []
    assert dropped == []
    assert partition == []


def test_prune_forests_leaf_region():
    """A labeled region hanging off by one edge is removed with its subtree."""
    edges1 = [(0, 1), (1, 2), (2, 3)]
    edges2 = [(0, 2), (2, 3)]
    pruned1, pruned2, dropped, partition = prune_forests(edges1, edges2, [[3], [2, 3]], 3)

    assert pruned1 == [(0, 1)]
    assert pruned2 == [(0, 2), (2, 3)]
    assert dropped == [2, 3]
    assert partition == [frozenset({2, 3})]


def test_prune_forests_inner_region():
    """A labeled region with two tree edges is a pass-through and stays."""
    edges1 = [(0, 2), (2, 1)]
    pruned1, _, dropped, _ = prune_forests(edges1, [(0, 2)], [[2]], 2)

    assert pruned1 == [(0, 2), (1, 2)]
    assert dropped == []


def test_prune_forests_lost_target():
    """An unlabeled target that F1 never reached cannot be served."""
    with pytest.raises(InvariantViolationError):
        prune_forests([(0, 1)], [(0, 2)], [], 2)


def test_prune_forests_mixed_pieces():
    """An F2 piece must stay inside one deactivated set."""
    with pytest.raises(InvariantViolationError):
        prune_forests([], [(0, 1), (1, 2)], [[1], [2]], 2)


def test_prune_grown_nested_region():
    """A deactivated cluster around an earlier deactivated target is cut whole.

    Target 2 sits next to d2 and is deactivated first. Targets 1 and 3
    join it in F1 and the cluster {1, 2, 3} is deactivated once all of
    it reached d2 in F2. Target 4 then grows into the cluster and
    carries it to d1, so the cluster hangs off F1 by the edge to 4.
    """
    cost1 = [[0, 18, 18, 18, 10],
             [18, 0, 4, 8, 8],
             [18, 4, 0, 4, 8],
             [18, 8, 4, 0, 8],
             [10, 8, 8, 8, 0]]
    cost2 = [[0, 5, 1, 5, 20],
             [5, 0, 4, 8, 20],
             [1, 4, 0, 4, 20],
             [5, 8, 4, 0, 20],
             [20, 20, 20, 20, 0]]
    instance = Instance(cost1, cost2, exact=True)
    result = run(instance, check_invariants=True)

    assert [event.case for event in result.events] == ["E2", "E3", "E1", "E1", "E2", "E2", "E3", "E1", "E1"]
    assert [sorted(label) for label in result.state.deactivated] == [[2], [1, 2, 3]]
    assert (0, 4) in result.state.forests[1].edges

    hsf = prune(result.state)
    assert_obj_attr(hsf, "edges1", [(0, 4)])
    assert_obj_attr(hsf, "edges2", [(0, 2), (1, 2), (2, 3)])
    assert_obj_attr(hsf, "targets1", [4])
    assert_obj_attr(hsf, "targets2", [1, 2, 3])
    assert_obj_attr(hsf, "partition", [frozenset({1, 2, 3})])
    assert hsf.cost == 19


@pytest.mark.parametrize("instance", random_instances(30, [2, 3, 5, 8, 12], [1, 1.2, 2, 4], seed=3))
def test_prune_properties(instance):
    """Test the pruned forests of grown instances.

    F1' is a tree through d1, F2' a tree through d2, together they
    cover the targets once, the dropped targets split into deactivated
    sets, and pruning again removes nothing.
    """
    result = run(instance)
    hsf = prune(result.state)
    n = instance.n_targets

    first = nx.Graph(hsf.edges1)
    first.add_node(0)
    second = nx.Graph(hsf.edges2)
    second.add_node(0)
    assert nx.is_tree(first)
    assert nx.is_tree(second)
    assert sorted(set(first.nodes) - {0}) == hsf.targets1
    assert sorted(set(second.nodes) - {0}) == hsf.targets2
    assert sorted(hsf.targets1 + hsf.targets2) == list(range(1, n + 1))

    assert set(hsf.edges1) <= set(result.state.forests[1].edges)
    assert set(hsf.edges2) <= set(result.state.forests[2].edges)
    assert sorted(vertex for part in hsf.partition for vertex in part) == hsf.targets2

    # Every deactivated set left in F1' is crossed by at least two of its edges.
    for label in result.state.deactivated:
        region = [vertex for vertex in label if first.has_node(vertex)]
        if region:
            assert nx.cut_size(first, region) >= 2

    assert hsf.cost1 == tree_cost(hsf.edges1, instance.cost1)
    assert hsf.cost2 == tree_cost(hsf.edges2, instance.cost2)

    again = prune_forests(hsf.edges1, hsf.edges2, result.state.deactivated, n)
    assert again[:3] == (hsf.edges1, hsf.edges2, hsf.targets2)


def test_prune_exact():
    instance = integer_instance(6, seed=5, factor=2)
    hsf = prune(run(instance).state)

    assert hsf.cost == tree_cost(hsf.edges1, instance.cost1) + tree_cost(hsf.edges2, instance.cost2)
    assert not isinstance(hsf.cost, float)


def test_prune_needs_finished_state():
    with pytest.raises(InvariantViolationError):
        prune(init(generate(3, seed=1)))
