"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from PlexflowError so callers (and the
CLI exit-code mapping) can distinguish user-facing errors from genuine bugs.
"""

from __future__ import annotations


class PlexflowError(Exception):
    """Base class for all errors raised by plexflow."""


class TrigParseError(PlexflowError):
    """Syntax or semantic error in a TriG document."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class CanonicalizationError(PlexflowError):
    """Dataset cannot be canonicalized (e.g. contains blank nodes)."""


class NanopubError(PlexflowError):
    """Invalid nanopublication structure or failed assembly/signing."""


class ModelError(PlexflowError):
    """Invalid step/workflow model or unparsable model RDF."""


class ManifestError(PlexflowError):
    """Schema violation in a step or workflow manifest.

    `path` locates the offending field, e.g. ``steps.s2.bind.img``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class CycleError(PlexflowError):
    """Workflow dependency graph contains a cycle."""

    def __init__(self, nodes: list[str]):
        super().__init__("cycle: " + " -> ".join(nodes))
        self.nodes = nodes


class ExecutionError(PlexflowError):
    """A step failed during workflow execution.

    Carries the partial retrospective record covering the steps that did
    complete, so a failed run still yields well-formed provenance.
    """

    def __init__(self, message: str, step_id: str | None = None, partial=None):
        super().__init__(message)
        self.step_id = step_id
        self.partial = partial


class RegistryError(PlexflowError):
    """Base for publication-store errors."""


class NotFoundError(RegistryError):
    """URI not present in the registry."""


class IntegrityError(RegistryError):
    """Conflicting content under an existing URI."""


class PublicationError(RegistryError):
    """Nanopub rejected at publication time (verification failed)."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class QueryParseError(PlexflowError):
    """Syntax error or unsupported construct in a query."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position
