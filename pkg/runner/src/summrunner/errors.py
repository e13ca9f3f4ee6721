"""Runner error types."""

from __future__ import annotations


class RunnerError(Exception):
    """Base class for runner failures."""


class SchemaError(RunnerError):
    """A dataset or manifest file violates its documented schema."""


class ModelLoadError(RunnerError):
    """Unknown model identifier or unreadable checkpoint."""


class DuplicatePredictionId(RunnerError):
    """A dataset collapses to duplicate prediction ids and cannot be scored."""
