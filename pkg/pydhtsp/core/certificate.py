# -*- coding: utf-8 -*-
"""Dual certificates for solved instances.

This module contains code that checks the dual values collected
during growth against every constraint of the dual program and
bounds the solution with them:

    cost(HSF) <= 2 * sum Y1(S) <= OPT    and    cost(tours) <= 2 * cost(HSF)

The first inequality holds by construction, the second needs dual
feasibility, which is verified here edge by edge and on every set
of both laminar families.
"""


import logging

from dataclasses import dataclass
from dataclasses import field
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from pydhtsp.core.components import DEPOT
from pydhtsp.core.components import DualHistory
from pydhtsp.core.components import DualRecord
from pydhtsp.core.instance import Instance
from pydhtsp.core.prune import HsfSolution
from pydhtsp.core.tour import TourPair
from pydhtsp.core.utils import Arithmetic
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import for_matrix
from pydhtsp.core.utils import to_json_number


logger = logging.getLogger(__name__)


CONSTRAINTS = ("edge-1", "edge-2", "bound", "theorem", "shortcut")


@dataclass(frozen=True)
class Violation:
    """A violated inequality.

    Attributes:
        constraint (str): One of ``CONSTRAINTS``.
        location (tuple): The edge, set or vehicle the inequality is about.
        slack (Number): Right-hand side minus left-hand side (negative).
    """
    constraint: str
    location: Tuple[int, ...]
    slack: Number

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint,
            "location": [int(index) for index in self.location],
            "slack": to_json_number(self.slack),
        }


@dataclass
class Certificate:
    """The dual lower bound of a solve and all violations found.

    Attributes:
        dual_objective (Number): 2 * sum of all Y1 values.
        hsf_cost (Number): cost(F1') + cost(F2').
        tour_cost (Number): Total cost of both tours.
        violations (`list` of Violation): Empty for a valid certificate.
    """
    dual_objective: Number
    hsf_cost: Number
    tour_cost: Number
    violations: List[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def ratio_vs_dual(self) -> Optional[Number]:
        """Tour cost over the dual objective, None if the objective is 0."""
        if self.dual_objective > 0:
            return self.tour_cost / self.dual_objective
        return None

    def to_dict(self) -> dict:
        return {
            "dual_objective": to_json_number(self.dual_objective),
            "hsf_cost": to_json_number(self.hsf_cost),
            "tour_cost": to_json_number(self.tour_cost),
            "ratio_vs_dual": to_json_number(self.ratio_vs_dual),
            "feasible": self.feasible,
            "violations": [violation.to_dict() for violation in self.violations],
        }


def dual_objective(history: DualHistory) -> Number:
    """Return 2 * sum Y1(S), the lower bound on the optimal cost."""
    return 2 * history.total(1)


def check_edge_constraints(history: DualHistory, instance: Instance,
                           tolerance: Optional[Number] = None) -> List[Violation]:
    """Check sum of Y_i(S) over sets crossing e <= cost_i(e) on every edge.

    Args:
        history (DualHistory): Dual values of a finished run.
        instance (Instance): The solved instance.
        tolerance (Number, optional): Defaults to the certificate tolerance.

    Returns:
        `list` of Violation: One ``edge-i`` violation per over-packed edge.
    """
    arithmetic = for_matrix(instance.cost1)
    if tolerance is None:
        tolerance = arithmetic.certificate_tolerance

    violations = []
    for forest in (1, 2):
        cost = instance.cost(forest)
        members, y = _indicators(history.records(forest), instance.size, arithmetic.dtype)

        single = members.T @ y
        shared = members.T @ (members * y[:, None])
        crossing = single[:, None] + single[None, :] - 2 * shared
        slack = cost - crossing

        over = np.triu(np.asarray(slack < -tolerance, dtype=bool), 1)
        for u, v in np.argwhere(over):
            violation = Violation(f"edge-{forest}", (int(u), int(v)), slack[u, v])
            logger.warning("dual constraint violated: %s", violation)
            violations.append(violation)

    return violations


def check_bound_constraints(history: DualHistory,
                            tolerance: Optional[Number] = None) -> List[Violation]:
    """Check sum Y1(S ⊆ U) <= sum Y2(S ⊆ U) for every U of both families.

    Only target sets are checked: U never contains a depot.

    Args:
        history (DualHistory): Dual values of a finished run.
        tolerance (Number, optional): Defaults to the certificate tolerance.

    Returns:
        `list` of Violation: One ``bound`` violation per failing set.
    """
    arithmetic = Arithmetic(history.exact)
    if tolerance is None:
        tolerance = arithmetic.certificate_tolerance

    records = history.records(1) + history.records(2)
    sets = sorted({record.vertices for record in records if DEPOT not in record.vertices},
                  key=lambda vertices: (len(vertices), sorted(vertices)))
    if not sets:
        return []

    size = 1 + max(max(record.vertices) for record in records)
    universe = np.zeros((len(sets), size), dtype=np.int64)
    for row, vertices in enumerate(sets):
        universe[row, list(vertices)] = 1

    mass = []
    for forest in (1, 2):
        members, y = _indicators(history.records(forest), size, arithmetic.dtype)
        contained = (universe @ members.T) == members.sum(axis=1)[None, :]
        mass.append(contained.astype(np.int64) @ y)

    violations = []
    for row in np.flatnonzero(np.asarray(mass[0] > mass[1] + tolerance, dtype=bool)):
        violation = Violation("bound", tuple(sorted(sets[row])), mass[1][row] - mass[0][row])
        logger.warning("dual constraint violated: %s", violation)
        violations.append(violation)

    return violations


def certify(hsf: HsfSolution, tours: TourPair, history: DualHistory, instance: Instance,
            check_constraints: bool = True) -> Certificate:
    """Assemble the certificate of a solve.

    Besides the dual constraints this checks cost(HSF) <= dual objective
    and cost(tour_i) <= 2 * cost(F_i') for both vehicles.

    Args:
        hsf (HsfSolution): The pruned trees.
        tours (TourPair): The tours built from them.
        history (DualHistory): Dual values of the run.
        instance (Instance): The solved instance.
        check_constraints (bool): Check the dual constraints, which costs
            O(|T|^3) operations.

    Returns:
        Certificate: Feasible if no violation was found.
    """
    tolerance = for_matrix(instance.cost1).certificate_tolerance
    objective = dual_objective(history)

    violations = []
    if check_constraints:
        violations += check_edge_constraints(history, instance, tolerance)
        violations += check_bound_constraints(history, tolerance)

    bounds = [Violation("theorem", (), objective - hsf.cost)]
    for vehicle, tree, tour in ((1, hsf.cost1, tours.cost1), (2, hsf.cost2, tours.cost2)):
        bounds.append(Violation("shortcut", (vehicle,), 2 * tree - tour))

    for violation in bounds:
        if violation.slack < -tolerance:
            logger.warning("certificate inequality violated: %s", violation)
            violations.append(violation)

    return Certificate(objective, hsf.cost, tours.total, violations)


def _indicators(records: List[DualRecord], size: int, dtype) -> Tuple[np.ndarray, np.ndarray]:
    records = [record for record in records if record.y != 0]
    members = np.zeros((len(records), size), dtype=np.int64)
    y = np.zeros(len(records), dtype=dtype)

    for row, record in enumerate(records):
        members[row, list(record.vertices)] = 1
        y[row] = record.y

    return members, y
