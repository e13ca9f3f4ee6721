"""Deterministic text primitives used by every other module.

Tokenization is intentionally simple: lowercase, split on anything that is
not a letter or digit. Model-specific subword vocabularies would make token
counts irreproducible across models, so word-level counts are the unit for
truncation limits and length statistics throughout the toolkit.
"""

from __future__ import annotations

import re
from collections import Counter
from importlib import resources
from pathlib import Path

from .errors import BadN

# Unicode letters and digits, underscore excluded.
_TOKEN_RE = re.compile(r"[^\W_]+")

# Sentence boundary: newline, or sentence punctuation followed by whitespace.
_SENTENCE_BREAK_RE = re.compile(r"(?<=[.!?])\s+|\n")

StopwordList = frozenset[str]


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; digits kept, empty fragments dropped."""
    return _TOKEN_RE.findall(text.lower())


def count_tokens(text: str) -> int:
    return sum(1 for _ in _TOKEN_RE.finditer(text))


def split_sentences(text: str) -> list[str]:
    """Split at newlines and at '.', '!' or '?' followed by whitespace.

    Sentence-final punctuation stays with its sentence; surrounding
    whitespace is trimmed and empty sentences are dropped, so no
    non-whitespace character is ever lost.
    """
    return [part.strip() for part in _SENTENCE_BREAK_RE.split(text) if part.strip()]


def ngram_counts(tokens: list[str], n: int) -> Counter[tuple[str, ...]]:
    """Multiset of contiguous n-grams; empty when n exceeds the length."""
    if n < 1:
        raise BadN(f"n must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def truncate_tokens(text: str, limit: int) -> str:
    """Prefix of text covering its first `limit` tokens.

    Original casing and punctuation inside the prefix are preserved; the
    text is returned unchanged when it has at most `limit` tokens. A limit
    of zero always yields the empty string.
    """
    if limit < 0:
        raise ValueError(f"limit must be >= 0, got {limit}")
    if limit == 0:
        return ""
    end = 0
    seen = 0
    for match in _TOKEN_RE.finditer(text):
        seen += 1
        if seen == limit:
            end = match.end()
        elif seen > limit:
            return text[:end]
    return text


def load_stopwords(path: str | Path) -> StopwordList:
    """Read a stopword file: one lowercase token per line, '#' comments.

    Every entry must survive tokenization unchanged (single token), so that
    membership tests against tokenizer output are meaningful.
    """
    words: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if tokenize(line) != [line]:
                raise ValueError(
                    f"{path}:{lineno}: {line!r} is not a single lowercase token"
                )
            words.add(line)
    return frozenset(words)


_DEFAULT_STOPWORDS: StopwordList | None = None


def default_stopwords() -> StopwordList:
    """The bundled English stopword list (loaded once, cached)."""
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        ref = resources.files("keysum.data").joinpath("stopwords.txt")
        with resources.as_file(ref) as path:
            _DEFAULT_STOPWORDS = load_stopwords(path)
    return _DEFAULT_STOPWORDS
