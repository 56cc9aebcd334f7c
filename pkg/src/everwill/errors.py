"""Exception types shared across the package."""

from __future__ import annotations


class EverwillError(Exception):
    """Base class for errors raised by this package."""


class StructuralError(EverwillError, ValueError):
    """Malformed input data: wrong shape, non-finite values, bad schema."""


class StrategyViolation(EverwillError, RuntimeError):
    """A will strategy proposed an infeasible force for the current state."""

    def __init__(self, message: str, *, person: int | None = None, carrier: int | None = None):
        super().__init__(message)
        self.person = person
        self.carrier = carrier


class AuditInputError(EverwillError, ValueError):
    """Audit input is not a usable history (gaps, non-successor states)."""


class ConfigError(EverwillError, ValueError):
    """Run configuration failed validation; carries every error found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)
