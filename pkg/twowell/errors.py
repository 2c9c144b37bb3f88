"""Exceptions raised by twowell."""

from typing import Optional


class TwoWellError(Exception):
    """Base class for all twowell errors."""


class InvalidArgumentError(TwoWellError, ValueError):
    """An argument is outside the domain an operation accepts."""


class InvalidStateError(TwoWellError, ValueError):
    """A state or density matrix violates its normalization invariants."""


class NumericError(TwoWellError):
    """A numerical routine failed.

    `point` identifies the grid point being evaluated when the failure
    surfaced inside a sweep.
    """

    def __init__(self, message: str, diagnostic: str = "", point: Optional[dict] = None):
        super().__init__(message)
        self.diagnostic = diagnostic
        self.point = point or {}

    def __str__(self) -> str:
        text = super().__str__()
        if self.diagnostic:
            text = f"{text} ({self.diagnostic})"
        if self.point:
            where = ", ".join(f"{k}={v}" for k, v in self.point.items())
            text = f"{text} at {where}"
        return text


class UnsupportedRequestError(TwoWellError):
    """The moment engine was asked for something it cannot evaluate."""


class InsufficientCutoffError(TwoWellError):
    """The Fock truncation loses more probability than allowed."""


class ConfigError(TwoWellError):
    """A run configuration could not be parsed or failed validation."""

    def __init__(self, diagnostics: list):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid configuration: {lines}")
