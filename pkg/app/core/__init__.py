"""Core primitives shared across all subsystems.

Enums, type aliases, error classes and seed derivation live here so that
higher level packages can import them without circular dependencies.
"""

from . import enums, errors, seeding, types

__all__ = ["enums", "errors", "seeding", "types"]
