"""Exception types shared across the toolkit.

Every error raised on a documented failure path derives from KeysumError,
so callers (and the CLI) can distinguish data problems from bugs. The class
name doubles as the machine-readable reason code printed by the CLI.
"""

from __future__ import annotations


class KeysumError(Exception):
    """Base class for all documented toolkit errors."""


class MalformedRecord(KeysumError):
    """An input line does not satisfy the documented record schema."""

    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: {detail}")
        self.line = line
        self.detail = detail


class DuplicateId(KeysumError):
    """The same identifier occurs more than once where ids must be unique."""

    def __init__(self, ident: str, detail: str = ""):
        msg = f"duplicate id {ident!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.ident = ident


class EmptyCorpus(KeysumError):
    """An operation that needs at least one article received none."""


class BadRatios(KeysumError):
    """Split ratios are not positive or do not sum to one."""


class NoTermsAvailable(KeysumError):
    """A key-term extractor found nothing eligible to return."""


class MissingSection(KeysumError):
    """A required section (body or abstract part) is absent from an article."""

    def __init__(self, section, detail: str = ""):
        name = getattr(section, "value", section)
        msg = f"missing section {name!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.section = section


class ProviderFailure(KeysumError):
    """An embedding provider raised while embedding a text."""


class EmptyTermList(KeysumError):
    """A prompt was requested for an empty term list."""


class TooFewArticles(KeysumError):
    """A confusion group does not contain enough distinct articles."""


class EmptyParts(KeysumError):
    """Section-summary integration was given nothing to integrate."""


class BadN(KeysumError):
    """An n-gram order outside the supported range was requested."""


class MissingReference(KeysumError):
    """A prediction has no matching reference."""

    def __init__(self, ident: str):
        super().__init__(f"no reference for id {ident!r}")
        self.ident = ident


class EmptySet(KeysumError):
    """Corpus scoring received no predictions or no metrics."""


class ZeroBaseline(KeysumError):
    """A relative improvement was requested against a zero baseline."""


class MissingBaseline(KeysumError):
    """A technique cell has no baseline cell to compare against."""

    def __init__(self, key):
        super().__init__(f"no baseline cell for {key}")
        self.key = key


class MissingCell(KeysumError):
    """Two tables being compared do not cover the same cells."""

    def __init__(self, key):
        super().__init__(f"cell {key} missing from the other table")
        self.key = key


class BadFormat(KeysumError):
    """An unsupported output format was requested."""
