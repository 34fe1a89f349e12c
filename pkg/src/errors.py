#!/usr/bin/env python3

"""Exception hierarchy shared by every SimpleChain module.

All errors derive from ValueError so callers that only know about bad
values still catch them. The CLI maps each class to an exit status.
"""


class SimpleChainError(ValueError):
    """Base class for all SimpleChain errors"""
    exit_code = 3


class ValidationError(SimpleChainError):
    """Malformed input: shapes, d∘d ≠ 0, non-commuting squares, parse errors"""
    exit_code = 1

    def __init__(self, message, *, line=None, section=None, label=None, degree=None):
        self.line = line
        self.section = section
        self.label = label
        self.degree = degree
        where = []
        if section is not None:
            where.append(f"section {section}")
        if line is not None:
            where.append(f"line {line}")
        if label is not None:
            where.append(f"object {label}")
        if degree is not None:
            where.append(f"degree {degree}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class PreconditionError(ValidationError):
    """An operation was called outside its domain"""


class CertificationError(SimpleChainError):
    """A verification report did not certify"""
    exit_code = 2

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class InvariantBreach(SimpleChainError):
    """An internal check that must always hold failed"""
    exit_code = 3


class DerivedError(PreconditionError):
    """A class handed to a derived-diagram operation does not lie in its kernel"""


class ExpansionError(InvariantBreach):
    """The inductive splitting of an expansion or minimal model is obstructed"""


class SpectralError(PreconditionError):
    """Spectral-sequence request outside the available cube depth or cycle range"""
