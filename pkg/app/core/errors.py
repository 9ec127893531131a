"""Error hierarchy shared by the lab subsystems.

Submodules raise the most specific error available so that the CLI can map
configuration problems, numerical domain violations and storage failures to
distinct exit paths.
"""
from __future__ import annotations


class LabError(Exception):
    """Base class for all custom exceptions in the application."""


class ConfigurationError(LabError):
    """Raised when configuration files are missing or invalid."""


class SupplyOverflow(LabError):
    """Raised when a reward or the coin supply leaves the finite double range."""

    def __init__(self, message: str, *, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step


class DomainError(LabError):
    """Raised when arguments fall outside an operation's mathematical domain."""


class UnclassifiedRegime(LabError):
    """Raised for reward schedules outside the supported regime taxonomy."""


class UnspecifiedConstant(LabError):
    """Raised when an absolute bound depends on a constant the theory leaves implicit."""


class UnknownFigure(LabError):
    """Raised when a figure name is not present in the catalogue."""


class StorageError(LabError):
    """Raised when result or manifest files cannot be written."""
