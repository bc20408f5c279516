"""Exception hierarchy shared by every module.

Each class carries a stable ``kind`` string so the CLI can report the failure
category without parsing messages.
"""

from __future__ import annotations


class DqcError(Exception):
    kind = "error"


class InvalidInput(DqcError, ValueError):
    kind = "invalid-input"


class PrecisionFailure(DqcError):
    kind = "precision-failure"


class NotInvertible(DqcError, ValueError):
    kind = "not-invertible"


class TooLarge(DqcError):
    kind = "too-large"


class InvalidCircuit(DqcError, ValueError):
    kind = "invalid-circuit"


class MustLowerFirst(DqcError):
    kind = "must-lower-first"


class ParseError(DqcError, ValueError):
    kind = "parse-error"

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        full = f"{message} ({', '.join(where)})" if where else message
        super().__init__(full)
        self.line = line
        self.field = field


class InvalidTopology(DqcError, ValueError):
    kind = "invalid-topology"


class InsufficientAncilla(DqcError):
    kind = "insufficient-ancilla"


class InvalidPeel(DqcError, ValueError):
    kind = "invalid-peel"


class InvalidLayout(DqcError, ValueError):
    kind = "invalid-layout"


class InvalidDag(DqcError, ValueError):
    kind = "invalid-dag"


class NotFound(DqcError):
    kind = "not-found"


class InvalidTol(DqcError, ValueError):
    kind = "invalid-tol"


class CertificateViolation(DqcError, AssertionError):
    """A measured count exceeded its declared bound."""

    kind = "certificate-violation"
