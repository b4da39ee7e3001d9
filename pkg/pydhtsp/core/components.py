# -*- coding: utf-8 -*-
"""Component structure of the two growing forests.

This module contains code that keeps track of the connected
components of F1 (vehicle 1) and F2 (vehicle 2) while the duals
grow: activity, the accumulated dual mass ``w`` and its cap
``bound``, the parent/child links between the forests, vertex
labels and the laminar history of all dual variables.

Dual values are settled lazily. Every component remembers the clock
value of its last update and catches up on the next touch, so a
uniform increase costs O(|T|) instead of one update per component.

Example:
    >>> state = init(instance)
    >>> state.bump_duals(2.0)
    >>> t1 = state.forests[1].component_of(1)
    >>> state.get_w(t1), state.get_bound(t1)
    (2.0, 2.0)
"""


from __future__ import annotations

import copy

from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import FrozenSet
from typing import List
from typing import Optional
from typing import Set

import numpy as np

from pydhtsp.core.error import ComponentError
from pydhtsp.core.error import InvariantViolationError
from pydhtsp.core.instance import Instance
from pydhtsp.core.utils import Arithmetic
from pydhtsp.core.utils import Edge
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import edge_key
from pydhtsp.core.utils import to_json_number


DEPOT = 0


@dataclass(eq=False)
class DualRecord:
    """The dual variable Y_i(S) of one component that ever existed.

    Attributes:
        cid (int): Id of the component the record belongs to.
        forest (int): 1 or 2.
        vertices (frozenset): The vertex set S.
        y (Number): Accumulated dual value.
    """
    cid: int
    forest: int
    vertices: FrozenSet[int]
    y: Number

    def to_dict(self) -> dict:
        return {"id": self.cid, "vertices": sorted(self.vertices), "y": to_json_number(self.y)}


class DualHistory:
    """Laminar families of dual records, one per forest.

    Args:
        exact (bool): States if the dual values are rationals.
    """
    def __init__(self, exact: bool = False):
        self.exact = exact
        self.__records = {1: [], 2: []}

    def add(self, record: DualRecord) -> None:
        self.__records[record.forest].append(record)

    def records(self, forest: int) -> List[DualRecord]:
        """Get the records of a forest in creation order."""
        return self.__records[forest]

    def total(self, forest: int) -> Number:
        """Return the sum of all dual values of a forest."""
        return sum((record.y for record in self.__records[forest]), 0)

    def y_within(self, forest: int, vertices: FrozenSet[int]) -> Number:
        """Return the sum of Y_forest(S) over all recorded S ⊆ vertices."""
        return sum((record.y for record in self.__records[forest]
                    if record.vertices <= vertices), 0)

    def is_laminar(self, forest: int) -> bool:
        """Check that any two sets of a forest are nested or disjoint."""
        masks = [_mask(record.vertices) for record in self.__records[forest]]

        for i, a in enumerate(masks):
            for b in masks[i + 1:]:
                common = a & b
                if common and common != a and common != b:
                    return False
        return True

    def copy(self) -> DualHistory:
        """Return an independent deep copy."""
        return copy.deepcopy(self)

    def to_dict(self) -> dict:
        return {f"forest{forest}": [record.to_dict() for record in self.__records[forest]]
                for forest in (1, 2)}


@dataclass(eq=False)
class ComponentRecord:
    """A current component of F1 or F2.

    ``w``, ``bound`` and ``children`` are only used in forest 1,
    ``parent`` only in forest 2. Values are exact as of ``stamp``.
    """
    cid: int
    forest: int
    vertices: FrozenSet[int]
    active: bool
    dual: DualRecord
    w: Number = 0
    bound: Number = 0
    children: Set[int] = field(default_factory=set)
    parent: Optional[int] = None
    stamp: Number = 0

    @property
    def members(self) -> np.ndarray:
        """The vertices as an index array."""
        return np.fromiter(self.vertices, dtype=np.int64, count=len(self.vertices))


class Forest:
    """The forest and component partition of one vehicle.

    Attributes:
        index (int): 1 or 2.
        cost (`array`): The vehicle's cost matrix in the solve's number system.
        component (`array` of int): Component id of every vertex.
        active (`array` of bool): Activity of the component of every vertex.
        potential (`array`): p_i(v), the dual mass of all sets containing v.
        edges (`list` of `tuple`): Edges added to the forest so far.
    """
    def __init__(self, index: int, cost: np.ndarray, arithmetic: Arithmetic):
        self.index = index
        self.cost = cost
        self.size = cost.shape[0]

        self.component = np.full(self.size, -1, dtype=np.int64)
        self.active = np.zeros(self.size, dtype=bool)
        self.potential = arithmetic.zeros(self.size)

        self.records: Dict[int, ComponentRecord] = {}
        self.edges: List[Edge] = []
        self.n_active = 0

    def get_record(self, cid: int) -> ComponentRecord:
        """Get a current component.

        Raises:
            ComponentError: If the id is stale or unknown.
        """
        record = self.records.get(cid)
        if record is None:
            raise ComponentError(f"Component {cid} is not a current component of forest {self.index}.")
        return record

    def component_of(self, vertex: int) -> int:
        """Get the id of the component containing a vertex."""
        return int(self.component[vertex])

    def add(self, record: ComponentRecord) -> None:
        members = record.members
        self.records[record.cid] = record
        self.component[members] = record.cid
        self.active[members] = record.active
        if record.active:
            self.n_active += 1

    def remove(self, record: ComponentRecord) -> None:
        del self.records[record.cid]
        if record.active:
            self.n_active -= 1

    def deactivate(self, record: ComponentRecord) -> None:
        if record.active:
            record.active = False
            self.active[record.members] = False
            self.n_active -= 1


@dataclass
class Changes:
    """Vertices whose pairwise reduced costs changed since the last look.

    Attributes:
        activity (set): Vertices whose component changed activity.
        merged (set): Vertices whose component was merged.
    """
    activity: Set[int] = field(default_factory=set)
    merged: Set[int] = field(default_factory=set)


class GrowthState:
    """Both forests, the potentials, labels and the dual history.

    Use ``init`` to build the starting state.

    Args:
        instance (Instance): The (validated) instance.
        arithmetic (Arithmetic): Number system of the solve.

    Attributes:
        clock (Number): Sum of all dual increases so far.
        iteration (int): Number of ``bump_duals`` calls.
        labels (`list`): Label (frozenset) of every forest-1 vertex, or None.
        deactivated (`list` of frozenset): Label sets in deactivation order.
        history (DualHistory): All dual records of both forests.
    """
    def __init__(self, instance: Instance, arithmetic: Arithmetic):
        self.instance = instance
        self.arithmetic = arithmetic
        self.n_targets = instance.n_targets

        self.clock = arithmetic.zero
        self.iteration = 0
        self.forests = {
            1: Forest(1, arithmetic.matrix(instance.cost1), arithmetic),
            2: Forest(2, arithmetic.matrix(instance.cost2), arithmetic),
        }
        self.labels: List[Optional[FrozenSet[int]]] = [None] * instance.size
        self.deactivated: List[FrozenSet[int]] = []
        self.history = DualHistory(arithmetic.exact)

        self.__next_id = 0
        self.__childless: Set[int] = set()
        self.__changes = {1: Changes(), 2: Changes()}

    def get_record(self, forest: int, cid: int) -> ComponentRecord:
        """Get a settled component record."""
        record = self.forests[forest].get_record(cid)
        self._settle(record)
        return record

    def get_w(self, cid: int) -> Number:
        """Get w(C) of a forest-1 component."""
        return self.get_record(1, cid).w

    def get_bound(self, cid: int) -> Number:
        """Get Bound(C) of a forest-1 component."""
        return self.get_record(1, cid).bound

    def get_slack(self, cid: int) -> Number:
        """Get Bound(C) - w(C) of a forest-1 component."""
        record = self.get_record(1, cid)
        return record.bound - record.w

    def childless(self) -> List[int]:
        """Get the active forest-1 components without children, sorted by id."""
        return sorted(self.__childless)

    def has_active(self, forest: int = 1) -> bool:
        """Return if a forest still has an active component."""
        return self.forests[forest].n_active > 0

    def take_changes(self, forest: int) -> Changes:
        """Return and reset the changes recorded for a forest."""
        changes = self.__changes[forest]
        self.__changes[forest] = Changes()
        return changes

    def progress_measure(self) -> int:
        """Return #C1 + #active C1 + #C2, which every iteration decreases."""
        forest1, forest2 = self.forests[1], self.forests[2]
        return len(forest1.records) + forest1.n_active + len(forest2.records)

    def bump_duals(self, epsilon: Number) -> None:
        """Increase the dual of every active component by epsilon.

        Potentials are updated right away; ``w``, ``bound`` and the
        history records catch up lazily when a component is touched.

        Raises:
            ComponentError: If epsilon is negative.
        """
        if epsilon < 0:
            raise ComponentError(f"The dual increase must be non-negative, got {epsilon}")

        self.iteration += 1
        if epsilon == 0:
            return

        self.clock = self.clock + epsilon
        for forest in self.forests.values():
            forest.potential[forest.active] += epsilon

    def merge(self, forest: int, a: int, b: int, edge: Edge) -> int:
        """Add an edge to a forest and merge the two components it joins.

        Args:
            forest (int): 1 or 2.
            a (int): Id of the first component.
            b (int): Id of the second component.
            edge (`tuple` of int): The edge, one endpoint in each component.

        Returns:
            int: Id of the merged component.

        Raises:
            ComponentError: On self merges, stale ids or a misplaced edge.
            InvariantViolationError: If two forest-2 components without the
                depot merge without sharing an active parent.
        """
        if a == b:
            raise ComponentError(f"Component {a} can't be merged with itself.")

        graph = self.forests[forest]
        first, second = graph.get_record(a), graph.get_record(b)

        u, v = edge
        if {graph.component_of(u), graph.component_of(v)} != {a, b}:
            raise ComponentError(f"Edge {edge} does not join components {a} and {b}.")

        siblings = first.active and second.active and first.parent is not None and first.parent == second.parent
        if forest == 2 and DEPOT not in first.vertices | second.vertices and not siblings:
            raise InvariantViolationError(
                f"F2 components {sorted(first.vertices)} and {sorted(second.vertices)} "
                f"merge without being active children of the same parent.")

        self._settle(first)
        self._settle(second)
        graph.edges.append(edge_key(int(u), int(v)))

        if forest == 1:
            return self._merge_first(first, second)
        return self._merge_second(first, second)

    def deactivate_with_label(self, cid: int) -> None:
        """Deactivate a childless forest-1 component whose w reached its bound.

        Every unlabeled vertex of the component is labeled with the
        component's vertex set. Existing labels never change.

        Raises:
            ComponentError: If the component is inactive, has children
                or w is not equal to bound.
        """
        record = self.get_record(1, cid)

        if not record.active:
            raise ComponentError(f"Component {sorted(record.vertices)} is already inactive.")
        if record.children:
            raise ComponentError(f"Component {sorted(record.vertices)} still has children.")
        if abs(record.bound - record.w) > self.arithmetic.tolerance:
            raise ComponentError(
                f"Component {sorted(record.vertices)} has w={record.w} but bound={record.bound}.")

        self.forests[1].deactivate(record)
        self.__childless.discard(cid)
        self.__changes[1].activity |= record.vertices

        label = record.vertices
        for vertex in sorted(label):
            if self.labels[vertex] is None:
                self.labels[vertex] = label
        self.deactivated.append(label)

    def settle(self) -> None:
        """Bring every current component up to the clock."""
        for forest in self.forests.values():
            for record in forest.records.values():
                self._settle(record)

    def check_invariants(self) -> None:
        """Check the forest nesting, the link consistency and w <= bound.

        Raises:
            InvariantViolationError: Naming the first property that fails.
        """
        forest1, forest2 = self.forests[1], self.forests[2]
        tolerance = self.arithmetic.tolerance

        for cid, record in forest2.records.items():
            if DEPOT in record.vertices:
                if record.parent is not None:
                    raise InvariantViolationError(f"Depot component {cid} of F2 has a parent.")
                continue

            owners = set(forest1.component[record.members].tolist())
            if len(owners) != 1:
                raise InvariantViolationError(
                    f"F2 component {sorted(record.vertices)} spans several F1 components.")

            owner = owners.pop()
            if record.parent != owner or cid not in forest1.records[owner].children:
                raise InvariantViolationError(
                    f"F2 component {sorted(record.vertices)} is not a child of its F1 component.")

        for cid, record in forest1.records.items():
            for child in record.children:
                if forest2.get_record(child).parent != cid:
                    raise InvariantViolationError(f"Child {child} of {cid} points to another parent.")

            self._settle(record)
            if record.w > record.bound + tolerance:
                raise InvariantViolationError(
                    f"w={record.w} exceeds bound={record.bound} on {sorted(record.vertices)}.")

        if np.any(forest2.active[1:] & ~forest1.active[1:]):
            raise InvariantViolationError("An active F2 component has an inactive F1 component.")

        if np.any(np.asarray(forest1.potential[1:] < forest2.potential[1:] - tolerance, dtype=bool)):
            raise InvariantViolationError("p1(u) < p2(u) for some target u.")

    def _new_component(self, forest: int, vertices: FrozenSet[int], active: bool) -> ComponentRecord:
        cid = self.__next_id
        self.__next_id += 1

        dual = DualRecord(cid, forest, vertices, self.arithmetic.zero)
        self.history.add(dual)

        record = ComponentRecord(cid, forest, vertices, active, dual,
                                 w=self.arithmetic.zero, bound=self.arithmetic.zero,
                                 stamp=self.clock)
        self.forests[forest].add(record)
        return record

    def _settle(self, record: ComponentRecord) -> None:
        if record.active:
            elapsed = self.clock - record.stamp
            if elapsed:
                record.dual.y += elapsed
                if record.forest == 1:
                    record.w += elapsed
                    record.bound += elapsed * len(record.children)
        record.stamp = self.clock

    def _merge_first(self, first: ComponentRecord, second: ComponentRecord) -> int:
        forest1, forest2 = self.forests[1], self.forests[2]
        vertices = first.vertices | second.vertices
        depot = DEPOT in vertices

        for part in (first, second):
            forest1.remove(part)
            self.__childless.discard(part.cid)
            if part.active == depot:
                self.__changes[1].activity |= part.vertices

        merged = self._new_component(1, vertices, not depot)
        merged.w = first.w + second.w
        merged.bound = first.bound + second.bound
        merged.children = first.children | second.children
        self.__changes[1].merged |= vertices

        for child in merged.children:
            record = forest2.get_record(child)
            record.parent = merged.cid
            if depot and record.active:
                self._settle(record)
                forest2.deactivate(record)
                self.__changes[2].activity |= record.vertices

        if not depot and not merged.children:
            self.__childless.add(merged.cid)

        return merged.cid

    def _merge_second(self, first: ComponentRecord, second: ComponentRecord) -> int:
        forest1, forest2 = self.forests[1], self.forests[2]
        vertices = first.vertices | second.vertices

        if DEPOT in vertices:
            side = second if DEPOT in first.vertices else first

            if side.parent is not None:
                parent = forest1.get_record(side.parent)
                self._settle(parent)
                parent.children.discard(side.cid)
                if parent.active and not parent.children:
                    self.__childless.add(parent.cid)

            if side.active:
                self.__changes[2].activity |= side.vertices

            forest2.remove(first)
            forest2.remove(second)
            merged = self._new_component(2, vertices, False)
            self.__changes[2].merged |= vertices
            return merged.cid

        parent = forest1.get_record(first.parent)
        self._settle(parent)

        forest2.remove(first)
        forest2.remove(second)
        merged = self._new_component(2, vertices, True)
        merged.parent = parent.cid
        self.__changes[2].merged |= vertices

        parent.children -= {first.cid, second.cid}
        parent.children.add(merged.cid)

        return merged.cid


def init(instance: Instance, arithmetic: Optional[Arithmetic] = None) -> GrowthState:
    """Build the initial state of the growth loop.

    Every vertex is a singleton component. Depot components are
    inactive, all target components are active. Each target singleton
    of F1 has the matching singleton of F2 as its only child.

    Args:
        instance (Instance): The instance to solve.
        arithmetic (Arithmetic, optional): Defaults to the instance's own.

    Returns:
        GrowthState: The state before the first iteration.
    """
    if arithmetic is None:
        arithmetic = Arithmetic(instance.exact)

    state = GrowthState(instance, arithmetic)
    singletons = {}

    for forest in (1, 2):
        for vertex in range(instance.size):
            record = state._new_component(forest, frozenset([vertex]), vertex != DEPOT)
            singletons[forest, vertex] = record

    for vertex in range(1, instance.size):
        first, second = singletons[1, vertex], singletons[2, vertex]
        first.children = {second.cid}
        second.parent = first.cid

    state.take_changes(1)
    state.take_changes(2)
    return state


def _mask(vertices: FrozenSet[int]) -> int:
    mask = 0
    for vertex in vertices:
        mask |= 1 << vertex
    return mask
