# -*- coding: utf-8 -*-
"""Custom errors.

This module contains code to be able to raise custom
errors and exceptions by the package in the sustainable way.
"""


class PyDhtspException(Exception):
    pass


class InstanceFormatError(PyDhtspException):
    pass


class DimensionMismatchError(InstanceFormatError):
    pass


class InstanceValidationError(PyDhtspException):
    """The instance breaks one of the modelling rules.

    Args:
        report (ValidationReport): The report listing every violation.
    """
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class GenerationError(PyDhtspException):
    pass


class ComponentError(PyDhtspException):
    pass


class InvariantViolationError(PyDhtspException):
    pass


class TourError(PyDhtspException):
    pass


class OracleSizeError(PyDhtspException):
    pass
