# -*- coding: utf-8 -*-
"""The complete solve of an instance.

This module contains code that chains validation, growth, pruning,
tour construction and the certificate into one call.

Example:
    >>> result = solve(generate(20, alpha=1.5, seed=3))
    >>> result.feasible
    True
    >>> result.total <= 2 * result.hsf.cost
    True
"""


import logging
import time

from dataclasses import dataclass
from dataclasses import field
from typing import List
from typing import Optional

from pydhtsp.core.certificate import Certificate
from pydhtsp.core.certificate import certify
from pydhtsp.core.certificate import dual_objective
from pydhtsp.core.growth import SCANS
from pydhtsp.core.growth import IterationEvent
from pydhtsp.core.growth import run
from pydhtsp.core.instance import Instance
from pydhtsp.core.instance import require_valid
from pydhtsp.core.prune import HsfSolution
from pydhtsp.core.prune import prune
from pydhtsp.core.tour import TourPair
from pydhtsp.core.tour import build_tours
from pydhtsp.core.utils import Number
from pydhtsp.core.utils import edges_to_list
from pydhtsp.core.utils import to_json_number


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Options of a solve.

    Attributes:
        exact (bool): Use rational arithmetic with zero tolerances.
        check_invariants (bool): Check the growth invariants every iteration.
        certificate (bool): Build and check the dual certificate.
        scan (str): "incremental" or "full" search for tight edges.
        validate (bool): Validate the instance before solving.
    """
    exact: bool = False
    check_invariants: bool = False
    certificate: bool = True
    scan: str = "incremental"
    validate: bool = True

    def __post_init__(self):
        if self.scan not in SCANS:
            raise ValueError(f"Unknown scan strategy {self.scan!r}, expected one of {SCANS}")


@dataclass
class SolveResult:
    """Tours, trees and the certificate of a solve.

    ``certificate`` is None when it was switched off; ``feasible`` is
    None then as well.
    """
    tours: TourPair
    hsf: HsfSolution
    certificate: Optional[Certificate]
    dual_objective: Number
    iterations: int
    wall_time: float
    events: List[IterationEvent] = field(default_factory=list)

    @property
    def total(self) -> Number:
        return self.tours.total

    @property
    def feasible(self) -> Optional[bool]:
        if self.certificate is None:
            return None
        return self.certificate.feasible

    @property
    def ratio_vs_dual(self) -> Optional[Number]:
        if self.dual_objective > 0:
            return self.total / self.dual_objective
        return None

    @property
    def assigned_to_v2(self) -> List[int]:
        """0-based positions of the targets served by vehicle 2."""
        return [target - 1 for target in self.hsf.targets2]

    def to_dict(self) -> dict:
        """Get the JSON document of the solve.

        The wall time is left out so the same solve always prints the
        same document.
        """
        violations = self.certificate.violations if self.certificate is not None else []

        return {
            "total": to_json_number(self.total),
            "cost1": to_json_number(self.tours.cost1),
            "cost2": to_json_number(self.tours.cost2),
            "tour1": list(self.tours.tour1),
            "tour2": list(self.tours.tour2),
            "edges1": edges_to_list(self.hsf.edges1),
            "edges2": edges_to_list(self.hsf.edges2),
            "hsf_cost": to_json_number(self.hsf.cost),
            "dual_objective": to_json_number(self.dual_objective),
            "ratio_vs_dual": to_json_number(self.ratio_vs_dual),
            "iterations": self.iterations,
            "feasible": self.feasible,
            "assigned_to_v2": self.assigned_to_v2,
            "violations": [violation.to_dict() for violation in violations],
        }


def solve(instance: Instance, config: Optional[SolverConfig] = None, trace=None) -> SolveResult:
    """Solve an instance and certify the result.

    Args:
        instance (Instance): The instance.
        config (SolverConfig, optional): Defaults to ``SolverConfig()``.
        trace (optional): Sink receiving every iteration event.

    Returns:
        SolveResult: The tours with their certificate.

    Raises:
        InstanceValidationError: If validation is on and the instance fails it.
        InvariantViolationError: If an internal property fails.
    """
    if config is None:
        config = SolverConfig()

    start = time.perf_counter()
    if config.exact:
        instance = instance.as_exact()
    if config.validate:
        require_valid(instance)

    growth = run(instance, trace=trace, scan=config.scan, check_invariants=config.check_invariants)
    hsf = prune(growth.state)
    tours = build_tours(hsf, instance)

    certificate = None
    if config.certificate:
        certificate = certify(hsf, tours, growth.history, instance)

    result = SolveResult(
        tours=tours,
        hsf=hsf,
        certificate=certificate,
        dual_objective=dual_objective(growth.history),
        iterations=growth.iterations,
        wall_time=time.perf_counter() - start,
        events=growth.events,
    )

    logger.info("solved %d targets: total=%s dual=%s in %.3fs", instance.n_targets,
                result.total, result.dual_objective, result.wall_time)
    return result
