# -*- coding: utf-8 -*-
"""Utils for package modules.

This module contains code that ensures the functionality
of the package in the sustainable way: object assertions,
instance builders and brute-force reference solutions.
"""


import itertools

from typing import Any
from typing import List
from typing import Tuple
from typing import Union

import networkx as nx
import numpy as np

from pydhtsp.core.instance import Instance
from pydhtsp.core.instance import generate


def assert_obj_attr(obj: object, attr: str, target: object):
    """Assert a objects attribute.

    First the code will assert if the given object has the
    attribute that is to be checked. Secondly it the code
    will assert of the attributes value is the target.

    Args:
        obj (:obj:): The object whose attribute is to be checked.
        attr (str): The name of the attribute which is to be checked.
        target (:obj:): The target value of the attribute in question.
    """
    assert attr in dir(obj)
    assert getattr(obj, attr) == target


def assert_obj_func(obj: object, func: str, param: Union[List[Any], None], target: object):
    """Assert a objects function.

    First the code will assert if the given object has the
    function that is to be checked. Secondly it the code
    will assert of the functions return value is the target.

    Args:
        obj (:obj:): The object whose attribute is to be checked.
        func (str): The name of the function which is to be checked.
        param (:obj:, optional): Parameters for the function call.
        target (:obj:): The target value of the attribute in question.
    """
    assert func in dir(type(obj))

    if param:
        assert getattr(obj, func)(*param) == target
    else:
        assert getattr(obj, func)() == target


def single_target(cost1: float, cost2: float, exact: bool = False) -> Instance:
    """Return the instance with one target at the given depot distances."""
    return Instance([[0, cost1], [cost1, 0]], [[0, cost2], [cost2, 0]], exact=exact)


def integer_instance(n: int, seed: int, factor: int = 1) -> Instance:
    """Return a metric instance with integer costs.

    Random integer weights on n + 2 points are closed under shortest
    paths; vehicle 1 uses d1 and the targets, vehicle 2 uses d2 and the
    targets with all costs multiplied by ``factor``.
    """
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, 20, size=(n + 2, n + 2))
    metric = np.minimum(weights, weights.T)
    np.fill_diagonal(metric, 0)

    for k in range(n + 2):
        metric = np.minimum(metric, metric[:, k, None] + metric[None, k, :])

    targets = list(range(2, n + 2))
    first = [0] + targets
    second = [1] + targets

    return Instance(metric[np.ix_(first, first)].tolist(),
                    (factor * metric[np.ix_(second, second)]).tolist(),
                    exact=True)


def random_instances(count: int, sizes: List[int], alphas: List[float], seed: int = 0) -> List[Instance]:
    """Return ``count`` generated instances cycling through sizes and alphas."""
    rng = np.random.default_rng(seed)
    instances = []

    for i in range(count):
        n = int(rng.choice(sizes))
        alpha = float(alphas[i % len(alphas)])
        instances.append(generate(n, alpha=alpha, seed=seed * 10007 + i))

    return instances


def brute_force_optimum(instance: Instance) -> float:
    """Return the optimum by trying every split and every visiting order."""
    n = instance.n_targets
    best = None

    for split in range(1 << n):
        second = [t for t in range(1, n + 1) if split >> (t - 1) & 1]
        first = [t for t in range(1, n + 1) if not split >> (t - 1) & 1]
        value = _best_order(instance.cost1, first) + _best_order(instance.cost2, second)
        if best is None or value < best:
            best = value

    return best


def euler_shortcut(edges: List[Tuple[int, int]], root: int, cost: np.ndarray) -> Tuple[List[int], float]:
    """Double the tree, walk an Euler circuit and skip repeated vertices."""
    if not edges:
        return [root], 0

    doubled = nx.MultiGraph()
    doubled.add_edges_from(edges)
    doubled.add_edges_from(edges)

    tour = [root]
    for u, v in nx.eulerian_circuit(doubled, source=root):
        if v not in tour:
            tour.append(v)
    tour.append(root)

    return tour, sum(cost[a, b] for a, b in zip(tour, tour[1:]))


def _best_order(cost: np.ndarray, targets: List[int]):
    if not targets:
        return 0

    best = None
    for order in itertools.permutations(targets):
        tour = (0,) + order + (0,)
        value = sum(cost[a, b] for a, b in zip(tour, tour[1:]))
        if best is None or value < best:
            best = value
    return best
