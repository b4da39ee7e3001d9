# -*- coding: utf-8 -*-
"""Exact solutions of small instances.

This module contains code that solves instances with up to twelve
targets to optimality. A Held-Karp table per vehicle holds the
cheapest closed tour from its depot through every subset of
targets; the optimum is the best split of the targets between the
two tables. It is the ground truth the approximation is tested
against.
"""


from dataclasses import dataclass
from dataclasses import field
from typing import List

import numpy as np

from pydhtsp.core.certificate import Violation
from pydhtsp.core.components import DualHistory
from pydhtsp.core.error import OracleSizeError
from pydhtsp.core.instance import Instance
from pydhtsp.core.utils import Arithmetic
from pydhtsp.core.utils import Boundary
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import for_matrix
from pydhtsp.core.utils import to_json_number


SOLVE_GUARD = Boundary(0, 13)
DUAL_GUARD = Boundary(0, 11)


@dataclass
class ExactSolution:
    """An optimal pair of tours.

    Attributes:
        optimal (Number): The optimal total cost.
        assigned_to_v2 (`list` of int): 0-based positions of the targets
            served by vehicle 2.
        tour1 (`list` of int): Optimal tour of vehicle 1 (matrix indices).
        tour2 (`list` of int): Optimal tour of vehicle 2 (matrix indices).
    """
    optimal: Number
    assigned_to_v2: List[int] = field(default_factory=list)
    tour1: List[int] = field(default_factory=lambda: [0])
    tour2: List[int] = field(default_factory=lambda: [0])

    def to_dict(self) -> dict:
        return {
            "optimal": to_json_number(self.optimal),
            "assigned_to_v2": list(self.assigned_to_v2),
            "tour1": list(self.tour1),
            "tour2": list(self.tour2),
        }


class HeldKarp:
    """Optimal closed tours from the depot through every subset of targets.

    Subsets are bitmasks where bit ``i`` stands for matrix index ``i + 1``.

    Args:
        cost (`array`): Cost matrix of one vehicle.
        n_targets (int): Number of targets.
    """
    def __init__(self, cost: np.ndarray, n_targets: int):
        self.n_targets = n_targets

        zero = for_matrix(cost).zero
        cost = cost.tolist()
        full = 1 << n_targets

        paths = [[None] * n_targets for _ in range(full)]
        self.__parents = [[-1] * n_targets for _ in range(full)]
        for j in range(n_targets):
            paths[1 << j][j] = cost[0][j + 1]

        for mask in range(1, full):
            for j in range(n_targets):
                value = paths[mask][j]
                if value is None:
                    continue
                for nxt in range(n_targets):
                    bit = 1 << nxt
                    if mask & bit:
                        continue
                    candidate = value + cost[j + 1][nxt + 1]
                    current = paths[mask | bit][nxt]
                    if current is None or candidate < current:
                        paths[mask | bit][nxt] = candidate
                        self.__parents[mask | bit][nxt] = j

        self.__costs = [zero] * full
        self.__last = [-1] * full
        for mask in range(1, full):
            best = None
            for j in range(n_targets):
                if paths[mask][j] is None:
                    continue
                candidate = paths[mask][j] + cost[j + 1][0]
                if best is None or candidate < best:
                    best = candidate
                    self.__last[mask] = j
            self.__costs[mask] = best

    def get_cost(self, mask: int) -> Number:
        """Get the cost of the optimal tour through a subset."""
        return self.__costs[mask]

    def get_tour(self, mask: int) -> List[int]:
        """Get the optimal tour through a subset, from and to the depot."""
        order = []
        last = self.__last[mask]

        while last >= 0:
            order.append(last + 1)
            mask, last = mask ^ (1 << last), self.__parents[mask][last]

        return [0] + order[::-1] + [0] if order else [0]


def solve_exact(instance: Instance) -> ExactSolution:
    """Solve an instance to optimality.

    Args:
        instance (Instance): An instance with at most 12 targets.

    Returns:
        ExactSolution: The optimum, ties broken by the smallest
            bitmask of targets served by vehicle 2.

    Raises:
        OracleSizeError: If the instance has more than 12 targets.

    Example:
        >>> solve_exact(Instance([[0, 3], [3, 0]], [[0, 1], [1, 0]])).to_dict()
        {'optimal': 2, 'assigned_to_v2': [0], 'tour1': [0], 'tour2': [0, 1, 0]}
    """
    n = instance.n_targets
    if not SOLVE_GUARD.accepts(n):
        raise OracleSizeError(f"The exact oracle handles at most {SOLVE_GUARD.max - 1} targets, got {n}")

    first = HeldKarp(instance.cost1, n)
    second = HeldKarp(instance.cost2, n)
    full = (1 << n) - 1

    best, split = None, 0
    for mask in range(full + 1):
        value = first.get_cost(full ^ mask) + second.get_cost(mask)
        if best is None or value < best:
            best, split = value, mask

    return ExactSolution(
        optimal=best,
        assigned_to_v2=[i for i in range(n) if split >> i & 1],
        tour1=first.get_tour(full ^ split),
        tour2=second.get_tour(split),
    )


def check_dual_exhaustive(history: DualHistory, instance: Instance) -> List[Violation]:
    """Check sum Y1(S ⊆ U) <= sum Y2(S ⊆ U) for every subset U of targets.

    Args:
        history (DualHistory): Dual values of a finished run.
        instance (Instance): The solved instance, at most 10 targets.

    Returns:
        `list` of Violation: One ``bound`` violation per failing subset.

    Raises:
        OracleSizeError: If the instance has more than 10 targets.
    """
    n = instance.n_targets
    if not DUAL_GUARD.accepts(n):
        raise OracleSizeError(f"The exhaustive dual check handles at most {DUAL_GUARD.max - 1} targets, got {n}")

    tolerance = Arithmetic(history.exact).certificate_tolerance
    masks = {}
    for forest in (1, 2):
        masks[forest] = [(sum(1 << (v - 1) for v in record.vertices), record.y)
                         for record in history.records(forest)
                         if record.y != 0 and 0 not in record.vertices]

    violations = []
    for subset in range(1, 1 << n):
        mass = {forest: sum((y for mask, y in masks[forest] if mask & subset == mask), 0)
                for forest in (1, 2)}
        if mass[1] > mass[2] + tolerance:
            vertices = tuple(i + 1 for i in range(n) if subset >> i & 1)
            violations.append(Violation("bound", vertices, mass[2] - mass[1]))

    return violations
