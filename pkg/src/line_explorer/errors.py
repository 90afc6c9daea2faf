"""Shared error base for the whole package.

Every user-facing failure raises a subclass of LineExplorerError.  The
class name doubles as a stable machine code (exposed by the CLI in
machine output and by the HTTP service in error bodies), so renaming a
subclass is a breaking change.
"""

from __future__ import annotations


class LineExplorerError(Exception):
    """Base class; ``code`` is the stable identifier for this failure kind."""

    @property
    def code(self) -> str:
        return type(self).__name__


class SchemaError(LineExplorerError):
    """A stored document (exercise file, survey CSV, submission record)
    does not have the shape this version of the tool expects."""


class StorageError(LineExplorerError):
    """Reading or writing a data file failed at the OS level."""
