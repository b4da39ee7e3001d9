# -*- coding: utf-8 -*-
"""The primal-dual moat growing loop.

This module contains code that grows the duals of both forests until
every forest-1 component is inactive. Each iteration computes the
three candidate increases

    eps1: an edge of E1 becomes tight,
    eps2: an edge of E2 becomes tight,
    eps3: a childless forest-1 component reaches its bound,

raises all active duals by the smallest one and applies exactly one
event. Ties go to eps1 first, then eps2, then eps3. Within a case the
edge with the lexicographically smallest (min endpoint, max endpoint)
wins.

Two search strategies exist. ``full`` scans the whole cost matrix
every iteration. ``incremental`` keeps, for every vertex, the time at
which its cheapest edge becomes tight; these times only change for
vertices touched by the last event.

Example:
    >>> result = run(instance)
    >>> result.iterations
    2
    >>> result.events[0].to_dict()
    {'iter': 1, 'eps': [3, 1, None], 'case': 'E2', 'edge': [0, 1], 'forest': 2}
"""


import json
import logging

from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import IO
from typing import Iterable
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np

from pydhtsp.core.components import DualHistory
from pydhtsp.core.components import GrowthState
from pydhtsp.core.components import init
from pydhtsp.core.error import InvariantViolationError
from pydhtsp.core.instance import Instance
from pydhtsp.core.utils import Arithmetic
from pydhtsp.core.utils import Edge
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import edge_key
from pydhtsp.core.utils import list_to_edges
from pydhtsp.core.utils import to_json_number


logger = logging.getLogger(__name__)


CASES = ("E1", "E2", "E3")
SCANS = ("incremental", "full")
CHUNK = 256


@dataclass
class IterationEvent:
    """One iteration of the growth loop.

    Undefined candidate increases are stored as ``None``.

    Attributes:
        iteration (int): 1-based iteration index.
        eps1 (Number): Smallest increase making an E1 edge tight.
        eps2 (Number): Smallest increase making an E2 edge tight.
        eps3 (Number): Smallest increase making a childless component tight.
        eps_min (Number): The increase that was applied.
        case (str): "E1", "E2" or "E3".
        edge (`tuple` of int): The added edge for E1 and E2.
        forest (int): The forest the edge was added to.
        deactivated (`list` of int): The deactivated vertex set for E3.
    """
    iteration: int
    eps1: Optional[Number]
    eps2: Optional[Number]
    eps3: Optional[Number]
    eps_min: Number
    case: str
    edge: Optional[Edge] = None
    forest: Optional[int] = None
    deactivated: Optional[List[int]] = None

    def to_dict(self) -> dict:
        """Get the JSONL representation of the event."""
        json = {
            "iter": self.iteration,
            "eps": [to_json_number(eps) for eps in (self.eps1, self.eps2, self.eps3)],
            "case": self.case,
        }

        if self.case == "E3":
            json["deactivated"] = list(self.deactivated)
        else:
            json["edge"] = list(self.edge)
            json["forest"] = self.forest

        return json

    @classmethod
    def from_dict(cls, json: dict) -> "IterationEvent":
        """Rebuild an event from its JSONL representation.

        Raises:
            ValueError: If the event names an unknown case.
        """
        if json["case"] not in CASES:
            raise ValueError(f"Unknown case {json['case']!r}, expected one of {CASES}")

        eps1, eps2, eps3 = json["eps"]
        defined = [eps for eps in (eps1, eps2, eps3) if eps is not None]
        edge = json.get("edge")

        return cls(
            iteration=json["iter"],
            eps1=eps1,
            eps2=eps2,
            eps3=eps3,
            eps_min=min(defined) if defined else 0,
            case=json["case"],
            edge=edge_key(*edge) if edge is not None else None,
            forest=json.get("forest"),
            deactivated=json.get("deactivated"),
        )


@dataclass
class GrowthResult:
    """The terminal state of a run together with its trace."""
    state: GrowthState
    history: DualHistory
    events: List[IterationEvent] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.events)


@dataclass
class Snapshot:
    """Both forests and the deactivated sets after one iteration."""
    iteration: int
    edges1: List[Edge]
    edges2: List[Edge]
    deactivated: List[List[int]]


class JsonlTraceSink:
    """Write iteration events as JSON lines.

    Args:
        stream (IO): A text stream opened for writing.

    Example:
        >>> with open("trace.jsonl", "w") as stream:
        ...     run(instance, trace=JsonlTraceSink(stream))
    """
    def __init__(self, stream: IO[str]):
        self.stream = stream

    def write(self, event: IterationEvent) -> None:
        self.stream.write(json.dumps(event.to_dict()) + "\n")


class EdgeFrontier:
    """Tight times of the cheapest edge of every vertex in one forest.

    For a pair (i, j) in distinct components the reduced cost
    ``cost - p(i) - p(j)`` shrinks at rate ``active(i) + active(j)``,
    so the clock value at which the pair becomes tight stays fixed
    until one of the two vertices changes activity or component.
    ``sync`` repairs only the rows affected by the changes recorded
    in the growth state since the previous call.

    Args:
        state (GrowthState): The state to follow.
        forest (int): 1 or 2.
    """
    def __init__(self, state: GrowthState, forest: int):
        self.state = state
        self.forest = forest
        self.graph = state.forests[forest]
        self.size = self.graph.size

        self.best = state.arithmetic.full(self.size, state.arithmetic.inf)
        self.partner = np.full(self.size, -1, dtype=np.int64)

        state.take_changes(forest)
        self._recompute(np.arange(self.size))

    def sync(self) -> None:
        """Bring the cached tight times up to date with the state."""
        changes = self.state.take_changes(self.forest)
        if not changes.activity and not changes.merged:
            return

        component = self.graph.component
        changed = np.array(sorted(changes.activity), dtype=np.int64)
        merged = np.array(sorted(changes.merged), dtype=np.int64)

        stale = np.zeros(self.size, dtype=bool)
        stale[changed] = True
        if changed.size:
            stale |= np.isin(self.partner, changed)
        if merged.size:
            partners = self.partner[merged]
            has_partner = partners >= 0
            joined = merged[has_partner][component[partners[has_partner]] == component[merged[has_partner]]]
            stale[joined] = True

        if (np.count_nonzero(stale) + changed.size) * 2 > self.size:
            self._recompute(np.arange(self.size))
            return

        if changed.size:
            self._update_columns(np.flatnonzero(~stale), changed)
        self._recompute(np.flatnonzero(stale))

    def pick(self) -> Optional[Tuple[Number, Edge]]:
        """Return the smallest increase making an edge tight, and the edge."""
        self.sync()

        time = self.best.min() if self.size else self.state.arithmetic.inf
        if time == self.state.arithmetic.inf:
            return None

        rows = np.flatnonzero(self.best == time)
        edge = min(edge_key(int(row), int(self.partner[row])) for row in rows)
        return max(time - self.state.clock, self.state.arithmetic.zero), edge

    def _times(self, rows: np.ndarray, columns: np.ndarray) -> np.ndarray:
        graph, arithmetic = self.graph, self.state.arithmetic
        activity = graph.active.astype(np.int64)

        slack = graph.cost[np.ix_(rows, columns)] - graph.potential[rows, None] - graph.potential[None, columns]
        rate = activity[rows, None] + activity[None, columns]
        valid = (graph.component[rows, None] != graph.component[None, columns]) & (rate > 0)

        return np.where(valid, self.state.clock + slack / np.where(valid, rate, 1), arithmetic.inf)

    def _recompute(self, rows: np.ndarray) -> None:
        columns = np.arange(self.size)

        for start in range(0, rows.size, CHUNK):
            chunk = rows[start:start + CHUNK]
            times = self._times(chunk, columns)
            best = np.argmin(times, axis=1)

            self.best[chunk] = times[np.arange(chunk.size), best]
            self.partner[chunk] = np.where(self.best[chunk] == self.state.arithmetic.inf, -1, best)

    def _update_columns(self, rows: np.ndarray, columns: np.ndarray) -> None:
        for start in range(0, rows.size, CHUNK):
            chunk = rows[start:start + CHUNK]
            times = self._times(chunk, columns)
            best = np.argmin(times, axis=1)

            candidate = times[np.arange(chunk.size), best]
            partner = columns[best]
            current, current_partner = self.best[chunk], self.partner[chunk]

            better = np.asarray(candidate < current, dtype=bool)
            better |= np.asarray(candidate == current, dtype=bool) & (partner < current_partner)
            better &= np.asarray(candidate != self.state.arithmetic.inf, dtype=bool)

            self.best[chunk[better]] = candidate[better]
            self.partner[chunk[better]] = partner[better]


def _scan(state: GrowthState, forest: int) -> Optional[Tuple[Number, Edge]]:
    graph, arithmetic = state.forests[forest], state.arithmetic
    activity = graph.active.astype(np.int64)

    rate = activity[:, None] + activity[None, :]
    valid = (graph.component[:, None] != graph.component[None, :]) & (rate > 0)
    valid = np.triu(valid, 1)
    if not valid.any():
        return None

    slack = graph.cost - graph.potential[:, None] - graph.potential[None, :]
    ratio = np.where(valid, slack / np.where(valid, rate, 1), arithmetic.inf)

    value = ratio[valid].min()
    u, v = np.argwhere(ratio == value)[0]
    return max(value, arithmetic.zero), edge_key(int(u), int(v))


def epsilon1(state: GrowthState) -> Optional[Tuple[Number, Edge]]:
    """Find the E1 edge that becomes tight first by a full scan.

    Args:
        state (GrowthState): A live growth state.

    Returns:
        (Number, tuple): The increase and the edge, or None if no edge
            joins two distinct components with an active side.
    """
    return _scan(state, 1)


def epsilon2(state: GrowthState) -> Optional[Tuple[Number, Edge]]:
    """Find the E2 edge that becomes tight first by a full scan."""
    return _scan(state, 2)


def epsilon3(state: GrowthState) -> Optional[Tuple[Number, int]]:
    """Find the childless active forest-1 component closest to its bound.

    Returns:
        (Number, int): ``bound - w`` and the component id, or None.
    """
    best = None

    for cid in state.childless():
        slack = state.get_slack(cid)
        if best is None or slack < best[0]:
            best = (slack, cid)

    if best is None:
        return None
    return max(best[0], state.arithmetic.zero), best[1]


def check_dual_feasibility(state: GrowthState) -> None:
    """Check p(i) + p(j) <= cost(i, j) across distinct components.

    Raises:
        InvariantViolationError: If a crossing edge is over-packed.
    """
    tolerance = state.arithmetic.tolerance

    for index, graph in state.forests.items():
        potential = graph.potential
        crossing = graph.component[:, None] != graph.component[None, :]
        excess = potential[:, None] + potential[None, :] - graph.cost

        over = crossing & np.asarray(excess > tolerance, dtype=bool)
        if over.any():
            u, v = np.argwhere(over)[0]
            raise InvariantViolationError(
                f"Dual infeasible on edge ({u}, {v}) of forest {index}: excess {excess[u, v]}.")


def run(instance: Instance,
        trace=None,
        arithmetic: Optional[Arithmetic] = None,
        scan: str = "incremental",
        check_invariants: bool = False) -> GrowthResult:
    """Grow both forests until every forest-1 component is inactive.

    Args:
        instance (Instance): A validated instance.
        trace (optional): Anything with a ``write(event)`` method.
        arithmetic (Arithmetic, optional): Defaults to the instance's own.
        scan (str): "incremental" or "full".
        check_invariants (bool): Check the parent links, dual feasibility and the
            progress measure after every iteration.

    Returns:
        GrowthResult: The terminal state, its dual history and the events.

    Raises:
        ValueError: On an unknown scan strategy.
        InvariantViolationError: If an internal property fails.
    """
    if scan not in SCANS:
        raise ValueError(f"Unknown scan strategy {scan!r}, expected one of {SCANS}")

    state = init(instance, arithmetic)
    frontiers = {forest: EdgeFrontier(state, forest) for forest in (1, 2)} if scan == "incremental" else None
    limit = 3 * instance.n_targets + 2
    events = []

    while state.has_active(1):
        measure = state.progress_measure()
        event = _step(state, frontiers)
        events.append(event)

        if trace is not None:
            trace.write(event)

        if check_invariants:
            state.check_invariants()
            check_dual_feasibility(state)
            if state.progress_measure() >= measure:
                raise InvariantViolationError(f"No progress in iteration {event.iteration}.")

        if state.iteration > limit:
            raise InvariantViolationError(f"More than {limit} iterations.")

    if state.has_active(2):
        raise InvariantViolationError("An F2 component is still active after the loop.")

    state.settle()
    if check_invariants:
        _check_history(state)

    logger.info("grew %d targets in %d iterations", instance.n_targets, len(events))
    return GrowthResult(state, state.history, events)


def replay(events: Iterable[Union[IterationEvent, dict]], n_targets: int) -> List[Snapshot]:
    """Rebuild the forests after every iteration from a trace.

    Args:
        events: Iteration events or their JSONL dictionaries.
        n_targets (int): Number of targets of the traced instance.

    Returns:
        `list` of Snapshot: One snapshot per event.

    Raises:
        ValueError: If an event references a vertex outside the instance.
    """
    edges: Dict[int, List[Edge]] = {1: [], 2: []}
    deactivated = []
    snapshots = []

    for event in events:
        if isinstance(event, dict):
            event = IterationEvent.from_dict(event)

        touched = event.deactivated if event.case == "E3" else event.edge
        if any(not 0 <= vertex <= n_targets for vertex in touched):
            raise ValueError(f"Event {event.iteration} leaves the {n_targets} target instance.")

        if event.case == "E3":
            deactivated.append(sorted(event.deactivated))
        else:
            edges[event.forest].append(edge_key(*event.edge))

        snapshots.append(Snapshot(event.iteration,
                                  list_to_edges(edges[1]),
                                  list_to_edges(edges[2]),
                                  [list(vertices) for vertices in deactivated]))

    return snapshots


def _pick(state: GrowthState, forest: int, frontiers) -> Optional[Tuple[Number, Edge]]:
    if frontiers is None:
        state.take_changes(forest)
        return _scan(state, forest)
    return frontiers[forest].pick()


def _step(state: GrowthState, frontiers: Optional[Dict[int, EdgeFrontier]]) -> IterationEvent:
    first = _pick(state, 1, frontiers)
    second = _pick(state, 2, frontiers)
    third = epsilon3(state)

    values = [candidate[0] if candidate is not None else None for candidate in (first, second, third)]
    defined = [value for value in values if value is not None]
    if not defined:
        raise InvariantViolationError("No candidate event while active components remain.")

    eps_min = min(defined)
    state.bump_duals(eps_min)
    tolerance = state.arithmetic.tolerance

    if first is not None and first[0] <= eps_min + tolerance:
        case, forest = "E1", 1
    elif second is not None and second[0] <= eps_min + tolerance:
        case, forest = "E2", 2
    else:
        case, forest = "E3", None

    event = IterationEvent(state.iteration, *values, eps_min, case)

    if case == "E3":
        label = state.get_record(1, third[1]).vertices
        state.deactivate_with_label(third[1])
        event.deactivated = sorted(label)
    else:
        u, v = (first if forest == 1 else second)[1]
        graph = state.forests[forest]
        state.merge(forest, graph.component_of(u), graph.component_of(v), (u, v))
        event.edge, event.forest = (u, v), forest

    logger.debug("iteration %d: %s eps=%s", event.iteration, case, values)
    return event


def _check_history(state: GrowthState) -> None:
    tolerance = state.arithmetic.tolerance

    for forest in (1, 2):
        if not state.history.is_laminar(forest):
            raise InvariantViolationError(f"Dual history of forest {forest} is not laminar.")

    for record in state.forests[1].records.values():
        mass = state.history.y_within(1, record.vertices)
        if abs(mass - record.w) > tolerance * max(1, state.iteration):
            raise InvariantViolationError(
                f"w={record.w} differs from the recorded mass {mass} of {sorted(record.vertices)}.")
