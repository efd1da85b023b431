"""Exception types shared across the engine."""

from __future__ import annotations


class MobeqError(Exception):
    """Base class for all engine errors."""


class SchemaError(MobeqError):
    """A document failed strict schema validation (syntax or structure)."""

    def __init__(self, message: str, field_path: str | None = None):
        super().__init__(message)
        self.field_path = field_path


class CityValidationError(MobeqError):
    """A city model violates semantic invariants; carries the full report."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(str(v) for v in report)
        super().__init__(f"invalid city: {lines}")


class InvalidControlsError(MobeqError):
    """Scenario controls are malformed or reference unknown zones/modes."""


class InfeasibleInstanceError(MobeqError):
    """The assembled optimization problem has no feasible point."""


class OracleSizeError(MobeqError):
    """Instance exceeds the size cap of the dense cross-check solver."""


class SolverVerifierDisagreement(MobeqError):
    """The solver produced a split the verifier rejects.

    Always an engine defect, never a data problem; the offending
    witnesses or feasibility violations are attached for diagnosis.
    """

    def __init__(self, message: str, witnesses=()):
        self.witnesses = tuple(witnesses)
        super().__init__(f"{message} ({len(self.witnesses)} witnesses)")


class SessionError(MobeqError):
    """Session-level failures: unknown iteration indices, bad files."""
