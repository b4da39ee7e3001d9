# -*- coding: utf-8 -*-
"""Pruning of the grown forests into a heterogeneous spanning forest.

This module contains code that removes every edge of F1 and F2 which
is not needed to keep the following two properties:

1. Every unmarked vertex is connected to d1 in F1'.
2. If a vertex with label C is connected to d1, every vertex with a
   label C' ⊇ C is connected as well.

The targets dropped from F1' are served by vehicle 2 through the
part of F2 spanning them.
"""


import logging

from dataclasses import dataclass
from dataclasses import field
from typing import FrozenSet
from typing import Iterable
from typing import List
from typing import Sequence
from typing import Tuple

import networkx as nx
import numpy as np

from pydhtsp.core.components import DEPOT
from pydhtsp.core.components import GrowthState
from pydhtsp.core.error import InvariantViolationError
from pydhtsp.core.utils import Edge
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import edges_to_list
from pydhtsp.core.utils import list_to_edges
from pydhtsp.core.utils import to_json_number


logger = logging.getLogger(__name__)


@dataclass
class HsfSolution:
    """Two trees, one per depot, jointly spanning all targets.

    Attributes:
        edges1 (`list` of `tuple`): Edges of F1', a tree containing d1.
        edges2 (`list` of `tuple`): Edges of F2', a tree containing d2.
        targets1 (`list` of int): Targets spanned by F1'.
        targets2 (`list` of int): Targets spanned by F2'.
        partition (`list` of frozenset): Deactivated sets partitioning targets2.
        cost1 (Number): Cost of F1' for vehicle 1.
        cost2 (Number): Cost of F2' for vehicle 2.
    """
    edges1: List[Edge]
    edges2: List[Edge]
    targets1: List[int]
    targets2: List[int]
    partition: List[FrozenSet[int]] = field(default_factory=list)
    cost1: Number = 0
    cost2: Number = 0

    @property
    def cost(self) -> Number:
        return self.cost1 + self.cost2

    def to_dict(self) -> dict:
        return {
            "edges1": edges_to_list(self.edges1),
            "edges2": edges_to_list(self.edges2),
            "targets2": list(self.targets2),
            "partition": [sorted(part) for part in self.partition],
            "cost1": to_json_number(self.cost1),
            "cost2": to_json_number(self.cost2),
        }


def prune_forests(edges1: Iterable[Edge],
                  edges2: Iterable[Edge],
                  labels: Iterable[Iterable[int]],
                  n_targets: int) -> Tuple[List[Edge], List[Edge], List[int], List[FrozenSet[int]]]:
    """Remove every removable edge from a pair of grown forests.

    Starting from the tree of F1 containing d1, a region ``L ∩ tree`` of
    a deactivated set L is cut off whenever a single edge connects it to
    the rest. Sets are tried innermost first until nothing changes.
    F2' is F2 restricted to the dropped targets and d2.

    Args:
        edges1 (`list` of `tuple`): Edges of F1.
        edges2 (`list` of `tuple`): Edges of F2.
        labels (`list` of sets): Every vertex set deactivated by the loop.
        n_targets (int): Number of targets.

    Returns:
        tuple: Edges of F1', edges of F2', the targets served by
            vehicle 2 and the deactivated sets partitioning them.

    Raises:
        InvariantViolationError: If the pruned pair is not a valid
            heterogeneous spanning forest.

    Example:
        >>> prune_forests([], [(0, 1)], [[1]], 1)
        ([], [(0, 1)], [1], [frozenset({1})])
    """
    family = sorted({frozenset(label) for label in labels}, key=lambda label: (len(label), min(label)))
    marked = frozenset().union(*family)

    forest = nx.Graph()
    forest.add_nodes_from(range(n_targets + 1))
    forest.add_edges_from(edges1)
    tree = forest.subgraph(nx.node_connected_component(forest, DEPOT)).copy()

    removed = True
    while removed:
        removed = False
        for label in family:
            region = [vertex for vertex in label if tree.has_node(vertex)]
            if region and nx.cut_size(tree, region) == 1:
                tree.remove_nodes_from(region)
                removed = True

    dropped = sorted(set(range(1, n_targets + 1)) - set(tree.nodes))
    _check_first(tree, family, marked, n_targets)

    partition = _partition(family, dropped)
    kept = frozenset(dropped) | {DEPOT}
    pruned2 = [edge for edge in edges2 if edge[0] in kept and edge[1] in kept]
    _check_second(pruned2, kept, partition)

    logger.debug("pruned F1 to %d edges, %d targets moved to vehicle 2", tree.number_of_edges(), len(dropped))
    return list_to_edges(tree.edges), list_to_edges(pruned2), dropped, partition


def prune(state: GrowthState) -> HsfSolution:
    """Turn the terminal state of the growth loop into an HsfSolution.

    Args:
        state (GrowthState): State after the loop ended.

    Returns:
        HsfSolution: The pruned trees, partition and costs.
    """
    if state.has_active(1):
        raise InvariantViolationError("Pruning needs a state without active F1 components.")

    edges1, edges2, dropped, partition = prune_forests(
        state.forests[1].edges, state.forests[2].edges, state.deactivated, state.n_targets)
    targets1 = sorted(set(range(1, state.n_targets + 1)) - set(dropped))

    return HsfSolution(
        edges1=edges1,
        edges2=edges2,
        targets1=targets1,
        targets2=dropped,
        partition=partition,
        cost1=tree_cost(edges1, state.forests[1].cost, state.arithmetic.zero),
        cost2=tree_cost(edges2, state.forests[2].cost, state.arithmetic.zero),
    )


def tree_cost(edges: Iterable[Edge], cost: np.ndarray, zero: Number = 0) -> Number:
    """Sum the costs of a set of edges."""
    return sum((cost[u, v] for u, v in edges), zero)


def _check_first(tree: nx.Graph, family: Sequence[FrozenSet[int]], marked: FrozenSet[int], n_targets: int) -> None:
    missing = [vertex for vertex in range(1, n_targets + 1) if vertex not in marked and not tree.has_node(vertex)]
    if missing:
        raise InvariantViolationError(f"Unmarked targets {missing} lost their connection to d1.")

    for label in family:
        region = [vertex for vertex in label if tree.has_node(vertex)]
        if region and nx.cut_size(tree, region) < 2:
            raise InvariantViolationError(f"Deactivated set {sorted(label)} is a leaf of F1'.")


def _partition(family: Sequence[FrozenSet[int]], dropped: List[int]) -> List[FrozenSet[int]]:
    served = frozenset(dropped)
    inside = [label for label in family if label <= served]
    maximal = [label for label in inside if not any(label < other for other in inside)]

    if frozenset().union(*maximal) != served:
        raise InvariantViolationError(f"Targets {dropped} do not split into deactivated sets.")

    return sorted(maximal, key=min)


def _check_second(edges: List[Edge], kept: FrozenSet[int], partition: List[FrozenSet[int]]) -> None:
    graph = nx.Graph()
    graph.add_nodes_from(kept)
    graph.add_edges_from(edges)

    if not nx.is_tree(graph):
        raise InvariantViolationError("F2 restricted to the dropped targets is not a tree through d2.")

    graph.remove_node(DEPOT)
    for piece in nx.connected_components(graph):
        if not any(piece <= part for part in partition):
            raise InvariantViolationError(f"F2' piece {sorted(piece)} spans several deactivated sets.")
