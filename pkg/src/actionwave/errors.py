"""Exception hierarchy. The CLI maps ParameterError to exit 1 and NumericalError to exit 2."""

from __future__ import annotations


class ActionWaveError(Exception):
    """Base class; ``details`` carries machine-readable diagnostics."""

    def __init__(self, message: str, **details: object) -> None:
        super().__init__(message)
        self.message = message
        self.details = details


class ParameterError(ActionWaveError, ValueError):
    """Inputs violate a model invariant or a scheme's admissibility rule."""


class NumericalError(ActionWaveError, RuntimeError):
    """A computation ran but failed to meet its own accuracy or stability contract."""
