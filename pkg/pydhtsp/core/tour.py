# -*- coding: utf-8 -*-
"""Tours from the trees of a heterogeneous spanning forest.

This module contains code that turns each tree into a closed tour of
its vehicle. Doubling every tree edge gives an Eulerian multigraph;
walking its Euler circuit and skipping repeated vertices yields the
depth-first preorder of the tree, which is what is built here.
"""


from dataclasses import dataclass
from typing import Iterable
from typing import List
from typing import Tuple

import networkx as nx
import numpy as np

from pydhtsp.core.components import DEPOT
from pydhtsp.core.error import TourError
from pydhtsp.core.instance import Instance
from pydhtsp.core.prune import HsfSolution
from pydhtsp.core.utils import Edge
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import for_matrix
from pydhtsp.core.utils import to_json_number


@dataclass
class TourPair:
    """One closed tour per vehicle.

    A tour is the vertex sequence starting and ending at the vehicle's
    depot; the trivial tour is ``[0]``.
    """
    tour1: List[int]
    tour2: List[int]
    cost1: Number
    cost2: Number

    @property
    def total(self) -> Number:
        return self.cost1 + self.cost2

    def get_tour(self, vehicle: int) -> List[int]:
        """Get the tour of a vehicle (1 or 2)."""
        return self.tour1 if vehicle == 1 else self.tour2

    def to_dict(self) -> dict:
        return {
            "tour1": list(self.tour1),
            "tour2": list(self.tour2),
            "cost1": to_json_number(self.cost1),
            "cost2": to_json_number(self.cost2),
        }


def tree_to_tour(edges: Iterable[Edge], root: int, cost: np.ndarray) -> Tuple[List[int], Number]:
    """Shortcut the doubled tree into a tour through every tree vertex.

    Children are visited in ascending vertex order.

    Args:
        edges (`list` of `tuple`): Edges of a tree containing the root.
        root (int): The depot.
        cost (`array`): Cost matrix of the vehicle.

    Returns:
        (`list` of int, Number): The closed tour and its cost.

    Raises:
        TourError: If the edges contain a cycle or miss the root.

    Example:
        >>> tree_to_tour([(0, 1), (1, 2)], 0, cost)
        ([0, 1, 2, 0], 4.0)
    """
    tree = nx.Graph()
    tree.add_node(root)
    tree.add_edges_from(edges)

    if not nx.is_tree(tree):
        raise TourError(f"Edges {sorted(tree.edges)} do not form a tree containing {root}.")

    zero = for_matrix(cost).zero
    if tree.number_of_nodes() == 1:
        return [root], zero

    tour = list(nx.dfs_preorder_nodes(tree, root, sort_neighbors=sorted)) + [root]
    return tour, sum((cost[a, b] for a, b in zip(tour, tour[1:])), zero)


def build_tours(hsf: HsfSolution, instance: Instance) -> TourPair:
    """Build both vehicle tours of a pruned solution.

    Args:
        hsf (HsfSolution): The pruned trees.
        instance (Instance): The instance they were grown on.

    Returns:
        TourPair: Both tours, each target visited exactly once.
    """
    tour1, cost1 = tree_to_tour(hsf.edges1, DEPOT, instance.cost1)
    tour2, cost2 = tree_to_tour(hsf.edges2, DEPOT, instance.cost2)

    visited = tour1[1:-1] + tour2[1:-1]
    if sorted(visited) != list(range(1, instance.n_targets + 1)):
        raise TourError(f"The tours {tour1} and {tour2} do not visit every target exactly once.")

    return TourPair(tour1, tour2, cost1, cost2)
