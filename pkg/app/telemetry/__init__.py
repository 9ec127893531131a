"""Telemetry subsystem: JSON logging, run records and result storage."""
from .events import CheckRecord, CheckReport, RunManifest
from .logging_setup import JsonFormatter, configure_logging
from .storage import ResultStorage, format_value

__all__ = [
    "CheckRecord",
    "CheckReport",
    "JsonFormatter",
    "ResultStorage",
    "RunManifest",
    "configure_logging",
    "format_value",
]
