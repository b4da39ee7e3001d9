# -*- coding: utf-8 -*-
"""Utils for package modules.

This module contains code that ensures the functionality
of the package in the sustainable way: range guards, the two
number systems the solver runs in, and JSON conversion helpers.
"""


import math

from fractions import Fraction
from typing import Iterable
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np


Number = Union[int, float, Fraction]
Edge = Tuple[int, int]


class Boundary:
    """Class that is used to check if a value is in a boundary.

    Args:
        min (int): Minimal value inside boundary.
        max (int): Exclusive max value inside boundary.

    Example:
        >>> boundary = Boundary(0, 13)
        >>> boundary.accepts(12)
        True
        >>> boundary.accepts(13)
        False
    """
    def __init__(self, min: int, max: int):
        self.min = min
        self.max = max

        if min == max:
            self.max += 1

    def accepts(self, value: Union[int, List[int]]) -> bool:
        """Check if the value is inside the boundary.

        Args:
            value (int): value that shall be checked

        Returns:
            boolean: True if value is in boundary, False otherwise.
        """
        if isinstance(value, (int, np.integer)):
            value = [value]

        return all(self.min <= v < self.max for v in value)


class Arithmetic:
    """The number system a solve runs in.

    Float mode works on ``float64`` arrays and compares with absolute
    tolerances. Exact mode promotes every cost to ``Fraction`` and stores
    arrays with ``dtype=object``; all tolerances are zero.

    Args:
        exact (bool): Use rational arithmetic.

    Attributes:
        tolerance (Number): Tightness slack for the growth loop.
        certificate_tolerance (Number): Slack for certificate inequalities.
        relative_tolerance (Number): Relative slack for instance validation.
    """
    def __init__(self, exact: bool = False):
        self.exact = exact
        self.dtype = object if exact else np.float64
        self.zero = Fraction(0) if exact else 0.0
        self.inf = math.inf

        self.tolerance = 0 if exact else 1e-9
        self.certificate_tolerance = 0 if exact else 1e-6
        self.relative_tolerance = 0 if exact else 1e-9

    def number(self, value: Number) -> Number:
        """Convert a scalar into this number system."""
        if self.exact:
            if isinstance(value, Fraction):
                return value
            return Fraction(value)
        return float(value)

    def matrix(self, values) -> np.ndarray:
        """Convert a (nested) sequence into an array of this number system."""
        if not self.exact:
            return np.array(values, dtype=np.float64)

        array = np.asarray(values, dtype=object)
        converted = np.empty(array.shape, dtype=object)
        for index, value in np.ndenumerate(array):
            converted[index] = self.number(value)
        return converted

    def zeros(self, size: int) -> np.ndarray:
        """Return a vector of zeros."""
        if self.exact:
            array = np.empty(size, dtype=object)
            array.fill(Fraction(0))
            return array
        return np.zeros(size, dtype=np.float64)

    def full(self, size: int, value: Number) -> np.ndarray:
        """Return a vector filled with one value (``inf`` allowed)."""
        array = np.empty(size, dtype=self.dtype)
        array.fill(value)
        return array

    def leq(self, a: Number, b: Number, tolerance: Optional[Number] = None) -> bool:
        """Return ``a <= b`` up to the growth tolerance."""
        if tolerance is None:
            tolerance = self.tolerance
        return a <= b + tolerance

    def __repr__(self) -> str:
        return "Arithmetic(exact={})".format(self.exact)


def for_matrix(matrix: np.ndarray) -> Arithmetic:
    """Return the number system an existing array lives in."""
    return Arithmetic(exact=matrix.dtype == object)


def to_json_number(value) -> Optional[Union[int, float]]:
    """Convert a number into its JSON representation.

    Integral values become ``int``, undefined and infinite values
    become ``None`` and everything else a shortest round-trip float.
    """
    if value is None:
        return None
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value.numerator)
        return float(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)

    value = float(value)
    if not math.isfinite(value):
        return None
    if value.is_integer():
        return int(value)
    return value


def edge_key(u: int, v: int) -> Edge:
    """Return the edge with its endpoints in ascending order."""
    return (u, v) if u <= v else (v, u)


def edges_to_list(edges: Iterable[Edge]) -> List[List[int]]:
    """Convert edges into their sorted JSON representation."""
    return [list(edge) for edge in sorted(edge_key(int(u), int(v)) for u, v in edges)]


def list_to_edges(json: Iterable[Iterable[int]]) -> List[Edge]:
    """Convert edges in JSON representation into the internal one."""
    edges = []

    for pair in json:
        u, v = pair
        edges.append(edge_key(int(u), int(v)))

    return sorted(edges)
