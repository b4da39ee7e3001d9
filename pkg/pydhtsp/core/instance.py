# -*- coding: utf-8 -*-
"""Problem instances of the two-depot heterogeneous TSP.

This module contains code that defines, validates, generates
and serializes instances. An instance holds one dense cost matrix
per vehicle. Row and column 0 of a matrix is the depot of that
vehicle, rows 1..n are the targets in an order shared by both.

Example:
    >>> instance = generate(5, alpha=1.5, seed=42)
    >>> validate(instance).passed
    True
    >>> write_json(instance, "five.json")
    >>> read_json("five.json") == instance
    True
"""


from __future__ import annotations

import json
import logging

from dataclasses import dataclass
from dataclasses import field
from decimal import Decimal
from fractions import Fraction
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np

from pydhtsp.core.error import DimensionMismatchError
from pydhtsp.core.error import GenerationError
from pydhtsp.core.error import InstanceFormatError
from pydhtsp.core.error import InstanceValidationError
from pydhtsp.core.utils import Arithmetic
from pydhtsp.core.utils import for_matrix


logger = logging.getLogger(__name__)

RULES = ("finite", "negative", "diagonal", "symmetry",
         "triangle-1", "triangle-2", "dominance")

# Exact costs at or above this bound are never written as floats.
_FLOAT_LIMIT = 2 ** 1023


class Instance:
    """A 2DHTSP instance.

    Instances are immutable after construction: both matrices are
    stored as read-only arrays.

    Args:
        cost1 (`array`): Costs of vehicle 1 over {d1} ∪ T, index 0 = d1.
        cost2 (`array`): Costs of vehicle 2 over {d2} ∪ T, index 0 = d2.
        names (`list` of `str`, optional): Target labels.
        coords (dict, optional): Coordinates the costs were derived from.
        exact (bool): Store costs as ``Fraction`` instead of ``float``.

    Attributes:
        n_targets (int): Number of targets |T|.

    Raises:
        DimensionMismatchError: A matrix is not square, the two matrices
            differ in size or ``names`` has the wrong length.
    """
    def __init__(self, cost1, cost2, names: Optional[Sequence[str]] = None,
                 coords: Optional[dict] = None, exact: bool = False):
        arithmetic = Arithmetic(exact)

        self.cost1 = _readonly(arithmetic.matrix(cost1))
        self.cost2 = _readonly(arithmetic.matrix(cost2))
        self.names = list(names) if names is not None else None
        self.coords = coords

        check_structure(self.cost1, self.cost2, self.names)
        self.n_targets = self.cost1.shape[0] - 1

    @property
    def size(self) -> int:
        """Number of vertices per vehicle graph (targets plus one depot)."""
        return self.n_targets + 1

    @property
    def exact(self) -> bool:
        """States if the costs are stored as rationals."""
        return self.cost1.dtype == object

    def cost(self, vehicle: int) -> np.ndarray:
        """Get the cost matrix of a vehicle (1 or 2)."""
        if vehicle == 1:
            return self.cost1
        if vehicle == 2:
            return self.cost2
        raise ValueError(f"There are only two vehicles: {vehicle}")

    def as_exact(self) -> Instance:
        """Return this instance with rational costs."""
        if self.exact:
            return self
        return Instance(self.cost1, self.cost2, self.names, self.coords, exact=True)

    def restrict(self, targets: Sequence[int]) -> Instance:
        """Return the sub-instance on the given targets (matrix indices 1..n)."""
        index = [0] + list(targets)
        names = None
        if self.names is not None:
            names = [self.names[t - 1] for t in targets]

        coords = None
        if self.coords is not None:
            coords = dict(self.coords)
            coords["targets"] = [self.coords["targets"][t - 1] for t in targets]

        return Instance(
            self.cost1[np.ix_(index, index)],
            self.cost2[np.ix_(index, index)],
            names, coords, exact=self.exact)

    def to_dict(self) -> dict:
        """Return a JSON representation of the instance.

        Exact costs come back as ``int``, as ``float`` when the shortest
        float text reads back to the same rational, and as ``Decimal``
        otherwise. ``dumps`` writes all three digit for digit.

        Raises:
            InstanceFormatError: An exact cost has no finite decimal expansion.
        """
        json = {
            "n_targets": self.n_targets,
            "cost1": _matrix_to_json(self.cost1),
            "cost2": _matrix_to_json(self.cost2),
        }
        if self.names is not None:
            json["names"] = list(self.names)
        if self.coords is not None:
            json["coords"] = self.coords
        return json

    @classmethod
    def from_dict(cls, json: dict, exact: bool = False) -> Instance:
        """Reconstruct an instance from JSON.

        Raises:
            InstanceFormatError: A field is missing or holds a non-number.
            DimensionMismatchError: The matrices do not fit together.
        """
        if not isinstance(json, dict):
            raise InstanceFormatError("The instance document must be a JSON object.")

        for key in ("cost1", "cost2"):
            if key not in json:
                raise InstanceFormatError(f"missing field '{key}'")

        arithmetic = Arithmetic(exact)
        cost1 = _matrix_from_json(json["cost1"], "cost1", arithmetic)
        cost2 = _matrix_from_json(json["cost2"], "cost2", arithmetic)

        names = json.get("names")
        if names is not None and (not isinstance(names, list)
                                  or not all(isinstance(name, str) for name in names)):
            raise InstanceFormatError("field 'names' must be a list of strings")

        instance = cls(cost1, cost2, names, json.get("coords"), exact=exact)

        n_targets = json.get("n_targets", instance.n_targets)
        if n_targets != instance.n_targets:
            raise DimensionMismatchError(
                f"n_targets is {n_targets} but the matrices have "
                f"{instance.n_targets} target rows")

        return instance

    def __eq__(self, other: object) -> bool:
        """Check two instances for field-for-field equality."""
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.n_targets == other.n_targets
                and np.array_equal(self.cost1, other.cost1)
                and np.array_equal(self.cost2, other.cost2)
                and self.names == other.names
                and self.coords == other.coords)

    def __repr__(self) -> str:
        return "Instance(n_targets={}, exact={})".format(self.n_targets, self.exact)


@dataclass(frozen=True)
class Violation:
    """One broken rule of an instance.

    Attributes:
        rule (str): One of ``RULES``.
        vehicle (int): The matrix the rule was checked on (0 for dominance).
        indices (`tuple` of `int`): Offending indices. ``(a, b, c)`` for the
            triangle rules means ``cost(a, c) > cost(a, b) + cost(b, c)``.
    """
    rule: str
    vehicle: int
    indices: Tuple[int, ...]

    def __str__(self) -> str:
        where = "({})".format(", ".join(str(i) for i in self.indices))
        matrix = f" in cost{self.vehicle}" if self.vehicle else ""
        switch = {
            "finite": f"non-finite cost at {where}{matrix}",
            "negative": f"negative cost at {where}{matrix}",
            "diagonal": f"non-zero diagonal at {where}{matrix}",
            "symmetry": f"asymmetric cost at {where}{matrix}",
            "dominance": f"dominance violated at {where}: cost1 > cost2",
        }
        return switch.get(self.rule, f"{self.rule} violated at {where}{matrix}")

    def to_dict(self) -> dict:
        return {"rule": self.rule, "vehicle": self.vehicle,
                "indices": [int(i) for i in self.indices]}


@dataclass
class ValidationReport:
    """The outcome of ``validate``."""
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def rules(self) -> set:
        """Return the names of all broken rules."""
        return {violation.rule for violation in self.violations}

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "violations": [violation.to_dict() for violation in self.violations]}

    def __str__(self) -> str:
        if self.passed:
            return "pass"
        return "; ".join(str(violation) for violation in self.violations)


def check_structure(cost1: np.ndarray, cost2: np.ndarray,
                    names: Optional[Sequence[str]] = None) -> None:
    """Check that both matrices are square, non-empty and of equal size.

    Raises:
        DimensionMismatchError: If the shapes do not fit together.
    """
    for key, matrix in (("cost1", cost1), ("cost2", cost2)):
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"{key} must be a square matrix, got shape {matrix.shape}")
        if matrix.shape[0] < 1:
            raise DimensionMismatchError(f"{key} must contain at least the depot row")

    if cost1.shape != cost2.shape:
        raise DimensionMismatchError(
            f"cost1 has shape {cost1.shape} but cost2 has shape {cost2.shape}")

    if names is not None and len(names) != cost1.shape[0] - 1:
        raise DimensionMismatchError(
            f"names has {len(names)} entries for {cost1.shape[0] - 1} targets")


def validate(instance: Instance) -> ValidationReport:
    """Check every modelling rule of an instance.

    The check is pure. Float costs are compared with a relative
    tolerance of 1e-9 on the triangle and dominance rules, rational
    costs are compared exactly.

    Returns:
        ValidationReport: Empty if the instance passes.

    Raises:
        DimensionMismatchError: If the matrices do not fit together.
    """
    check_structure(instance.cost1, instance.cost2, instance.names)

    arithmetic = for_matrix(instance.cost1)
    scale = 1 + arithmetic.relative_tolerance
    violations = []

    for vehicle in (1, 2):
        matrix = instance.cost(vehicle)
        violations.extend(_matrix_violations(matrix, vehicle, scale))

    targets1 = instance.cost1[1:, 1:]
    targets2 = instance.cost2[1:, 1:]
    dominated = np.asarray(targets1 > targets2 * scale, dtype=bool)
    for u, v in np.argwhere(np.triu(dominated, 1)):
        violations.append(Violation("dominance", 0, (int(u) + 1, int(v) + 1)))

    report = ValidationReport(violations)
    if not report.passed:
        logger.info("Instance with %d targets breaks %s", instance.n_targets, sorted(report.rules()))
    return report


def require_valid(instance: Instance) -> Instance:
    """Return the instance if it passes ``validate``.

    Raises:
        InstanceValidationError: Carrying the report otherwise.
    """
    report = validate(instance)
    if not report.passed:
        raise InstanceValidationError(report)
    return instance


def generate(n: int, alpha: float = 1.0, seed: int = 0, box: float = 100.0) -> Instance:
    """Generate a random Euclidean instance.

    Both depots and the targets are placed uniformly at random in a
    square of side ``box``. Vehicle 1 pays Euclidean distances and
    vehicle 2 pays ``alpha`` times Euclidean distances, so ``alpha >= 1``
    keeps vehicle 1 cheaper between any two targets.

    Raises:
        GenerationError: If ``alpha < 1`` or ``n < 0``.
    """
    if alpha < 1:
        raise GenerationError(f"alpha must be ≥ 1, got {alpha}")
    if n < 0:
        raise GenerationError(f"The number of targets must be ≥ 0, got {n}")
    if box <= 0:
        raise GenerationError(f"The box side must be positive, got {box}")

    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, box, size=(n + 2, 2))
    depot1, depot2, targets = points[0], points[1], points[2:]

    cost1 = euclidean(np.vstack([depot1, targets]))
    cost2 = alpha * euclidean(np.vstack([depot2, targets]))

    coords = {
        "depot1": depot1.tolist(),
        "depot2": depot2.tolist(),
        "targets": targets.tolist(),
    }
    names = [f"t{i}" for i in range(1, n + 1)]

    return Instance(cost1, cost2, names, coords)


def euclidean(points: np.ndarray) -> np.ndarray:
    """Return the matrix of pairwise Euclidean distances."""
    difference = points[:, np.newaxis, :] - points[np.newaxis, :, :]
    return np.sqrt(np.sum(difference ** 2, axis=2))


def read_json(path: str, exact: bool = False) -> Instance:
    """Read an instance from a JSON file.

    Args:
        path (str): File to read.
        exact (bool): Parse numbers from their decimal text into ``Fraction``.

    Raises:
        InstanceFormatError: If the document is malformed or holds a
            number the chosen arithmetic cannot represent.
    """
    parse_float = Fraction if exact else float

    with open(path, "r", encoding="utf-8") as file:
        try:
            json_ = json.load(file, parse_float=parse_float, parse_constant=_reject_constant)
        except json.JSONDecodeError as error:
            raise InstanceFormatError(
                f"{path}: malformed JSON at line {error.lineno} "
                f"column {error.colno}: {error.msg}") from error

    return Instance.from_dict(json_, exact=exact)


def write_json(instance: Instance, path: str) -> None:
    """Write an instance to a JSON file."""
    with open(path, "w", encoding="utf-8") as file:
        file.write(dumps(instance))
        file.write("\n")


def dumps(instance: Instance) -> str:
    """Encode an instance as one line of JSON text.

    Matrix entries are written number by number so that ``Decimal``
    entries of exact instances keep every digit.
    """
    items = []
    for key, value in instance.to_dict().items():
        if key in ("cost1", "cost2"):
            text = "[{}]".format(", ".join(
                "[{}]".format(", ".join(_number_text(entry) for entry in row)) for row in value))
        else:
            text = json.dumps(value)
        items.append(f"{json.dumps(key)}: {text}")
    return "{{{}}}".format(", ".join(items))


def _matrix_violations(matrix: np.ndarray, vehicle: int, scale) -> List[Violation]:
    """Collect the single-matrix rule violations of one vehicle."""
    violations = []
    size = matrix.shape[0]

    if matrix.dtype != object:
        for i, j in np.argwhere(~np.isfinite(matrix)):
            violations.append(Violation("finite", vehicle, (int(i), int(j))))

    for i, j in np.argwhere(np.asarray(matrix < 0, dtype=bool)):
        violations.append(Violation("negative", vehicle, (int(i), int(j))))

    for i in np.flatnonzero(np.asarray(np.diagonal(matrix) != 0, dtype=bool)):
        violations.append(Violation("diagonal", vehicle, (int(i), int(i))))

    asymmetric = np.asarray(matrix != matrix.T, dtype=bool)
    for i, j in np.argwhere(np.triu(asymmetric, 1)):
        violations.append(Violation("symmetry", vehicle, (int(i), int(j))))

    for b in range(size):
        through = matrix[:, b][:, np.newaxis] + matrix[b, :][np.newaxis, :]
        shortcut = np.asarray(matrix > through * scale, dtype=bool)
        shortcut[b, :] = False
        shortcut[:, b] = False
        for a, c in np.argwhere(np.triu(shortcut, 1)):
            violations.append(Violation(f"triangle-{vehicle}", vehicle, (int(a), b, int(c))))

    return violations


def _matrix_to_json(matrix: np.ndarray) -> list:
    if matrix.dtype != object:
        return matrix.tolist()
    return [[_exact_to_json(value) for value in row] for row in matrix]


def _exact_to_json(value: Fraction):
    if value.denominator == 1:
        return int(value.numerator)

    shortest = float(value) if abs(value) < _FLOAT_LIMIT else None
    if shortest is not None and Fraction(repr(shortest)) == value:
        return shortest

    digits = _decimal_digits(value.denominator)
    if digits is None:
        raise InstanceFormatError(f"exact cost {value} has no finite decimal expansion")
    scaled = value.numerator * 10 ** digits // value.denominator
    return Decimal(f"{scaled}E-{digits}")


def _decimal_digits(denominator: int) -> Optional[int]:
    """Return the digits after the point of 1/denominator, None if it repeats."""
    digits = 0
    for prime in (2, 5):
        count = 0
        while denominator % prime == 0:
            denominator //= prime
            count += 1
        digits = max(digits, count)
    return digits if denominator == 1 else None


def _number_text(value) -> str:
    if isinstance(value, Decimal):
        return str(value)
    return json.dumps(value)


def _matrix_from_json(json: object, key: str, arithmetic: Arithmetic) -> list:
    """Check a matrix field entry by entry and convert it into nested lists."""
    if not isinstance(json, list) or not all(isinstance(row, list) for row in json):
        raise InstanceFormatError(f"field '{key}' must be a list of rows")

    matrix = []
    for i, row in enumerate(json):
        if len(row) != len(json):
            raise DimensionMismatchError(
                f"{key} row {i} has {len(row)} entries, expected {len(json)}")
        for j, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
                raise InstanceFormatError(f"non-numeric entry at {key}[{i}][{j}]: {value!r}")
        try:
            matrix.append([arithmetic.number(value) for value in row])
        except (OverflowError, ValueError) as error:
            j = next(j for j, value in enumerate(row) if not _converts(arithmetic, value))
            raise InstanceFormatError(
                f"entry at {key}[{i}][{j}] is not representable: {row[j]!r}") from error

    return matrix


def _converts(arithmetic: Arithmetic, value) -> bool:
    try:
        arithmetic.number(value)
    except (OverflowError, ValueError):
        return False
    return True


def _reject_constant(name: str):
    raise InstanceFormatError(f"non-finite constant {name} is not a cost")


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array
