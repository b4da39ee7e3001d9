# -*- coding: utf-8 -*-
"""Unittests for code in the certificate module.

This module contains code to test the content
of the pydhtsp.core.certificate module using pytest.

Example:
    To run the tests you can for example:
        - Run the pytest command from the command line:
            ..> pytest
        - Run the tests.py file in the repos top-level:
            ..> python tests.py
"""


import pytest

from pydhtsp.core.certificate import Certificate
from pydhtsp.core.certificate import Violation
from pydhtsp.core.certificate import certify
from pydhtsp.core.certificate import check_bound_constraints
from pydhtsp.core.certificate import check_edge_constraints
from pydhtsp.core.certificate import dual_objective
from pydhtsp.core.components import DualHistory
from pydhtsp.core.growth import run
from pydhtsp.core.instance import generate
from pydhtsp.core.prune import prune
from pydhtsp.core.tour import TourPair
from pydhtsp.core.tour import build_tours

from test.utils import assert_obj_attr
from test.utils import integer_instance
from test.utils import random_instances
from test.utils import single_target


def solved(instance):
    result = run(instance)
    hsf = prune(result.state)
    return hsf, build_tours(hsf, instance), result.history


def record_of(history, forest, vertices):
    return next(record for record in history.records(forest) if record.vertices == frozenset(vertices))


def test_certify_single_target():
    """cost1 = 3, cost2 = 1 gives the dual objective 2 and ratio 1."""
    instance = single_target(3, 1)
    hsf, tours, history = solved(instance)
    certificate = certify(hsf, tours, history, instance)

    assert_obj_attr(certificate, "dual_objective", 2)
    assert_obj_attr(certificate, "hsf_cost", 1)
    assert_obj_attr(certificate, "tour_cost", 2)
    assert_obj_attr(certificate, "feasible", True)
    assert_obj_attr(certificate, "ratio_vs_dual", 1)
    assert certificate.to_dict() == {
        "dual_objective": 2,
        "hsf_cost": 1,
        "tour_cost": 2,
        "ratio_vs_dual": 1,
        "feasible": True,
        "violations": [],
    }


def test_edge_constraint_violation():
    """Raising one dual value above an edge cost is caught on that edge."""
    instance = single_target(3, 1)
    _, _, history = solved(instance)

    broken = history.copy()
    record_of(broken, 1, {1}).y = 5
    assert check_edge_constraints(broken, instance) == [Violation("edge-1", (0, 1), -2)]

    broken = history.copy()
    record_of(broken, 2, {1}).y = 2
    assert check_edge_constraints(broken, instance) == [Violation("edge-2", (0, 1), -1)]

    # The original is untouched.
    assert check_edge_constraints(history, instance) == []


def test_bound_constraint_violation():
    instance = single_target(3, 1)
    _, _, history = solved(instance)

    broken = history.copy()
    record_of(broken, 1, {1}).y = 1.5
    violations = check_bound_constraints(broken)

    assert violations == [Violation("bound", (1,), -0.5)]
    assert violations[0].to_dict() == {"constraint": "bound", "location": [1], "slack": -0.5}
    assert check_bound_constraints(history) == []


def test_certify_reports_broken_history():
    instance = single_target(3, 1)
    hsf, tours, history = solved(instance)

    broken = history.copy()
    record_of(broken, 1, {1}).y = 5
    certificate = certify(hsf, tours, broken, instance)

    assert not certificate.feasible
    assert {violation.constraint for violation in certificate.violations} == {"edge-1", "bound"}

    # Without the constraint checks only the cost inequalities remain.
    assert certify(hsf, tours, broken, instance, check_constraints=False).feasible


def test_certify_cost_inequalities():
    instance = single_target(3, 1)
    hsf, _, history = solved(instance)

    tours = TourPair([0], [0, 1, 0], 0, 5)
    certificate = certify(hsf, tours, history, instance)
    assert certificate.violations == [Violation("shortcut", (2,), -3)]

    hsf.cost2 = 7
    certificate = certify(hsf, TourPair([0], [0, 1, 0], 0, 2), history, instance)
    assert [violation.constraint for violation in certificate.violations] == ["theorem"]


def test_empty_history():
    history = DualHistory()

    assert dual_objective(history) == 0
    assert check_bound_constraints(history) == []
    assert check_edge_constraints(history, generate(0, seed=1)) == []
    assert Certificate(0, 0, 0).ratio_vs_dual is None


@pytest.mark.parametrize("instance", random_instances(40, [2, 4, 7, 15, 30], [1, 1.2, 2, 5], seed=12))
def test_certify_random(instance):
    """Grown duals are feasible and bound both costs."""
    hsf, tours, history = solved(instance)
    certificate = certify(hsf, tours, history, instance)

    assert certificate.feasible, certificate.violations
    assert hsf.cost <= certificate.dual_objective + 1e-6
    assert tours.total <= 2 * hsf.cost + 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_certify_exact(seed):
    instance = integer_instance(4 + seed % 5, seed=seed, factor=1 + seed % 2)
    hsf, tours, history = solved(instance)
    certificate = certify(hsf, tours, history, instance)

    assert certificate.feasible
    assert hsf.cost <= certificate.dual_objective


def test_certify_large_alpha():
    """With a very expensive vehicle 2 everything is served by vehicle 1."""
    instance = generate(8, alpha=1000, seed=4)
    hsf, tours, history = solved(instance)
    certificate = certify(hsf, tours, history, instance)

    assert hsf.targets2 == []
    assert certificate.feasible
    assert certificate.dual_objective > 0
    assert hsf.cost <= certificate.dual_objective + 1e-6
