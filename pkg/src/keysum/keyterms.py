"""The five key-term extraction techniques that feed prompt construction.

Two techniques pass curated metadata through (author keywords, MeSH
descriptors); three compute terms from the text itself: raw term frequency,
section-contrastive TF-IDF, and embedding similarity between candidate
phrases and the text they come from.

Scored extractors share one eligibility rule: stopwords and tokens shorter
than two characters are ignored. Ranking ties always break lexicographically
so every extractor is a pure, reproducible function of its inputs.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from . import textproc
from .corpus import IMRAD_KINDS, Article, SectionKind
from .errors import MissingSection, NoTermsAvailable, ProviderFailure
from .textproc import StopwordList

#: Minimum character length for TF / TF-IDF term eligibility.
MIN_TERM_LENGTH = 2

#: Default number of terms returned by the scored extractors.
DEFAULT_N_TERMS = 10


class Technique(enum.Enum):
    KEYWORDS = "keywords"
    MESH = "mesh"
    KEYBERT = "keybert"
    TF = "tf"
    TFIDF = "tfidf"


@dataclass(frozen=True)
class KeyTermList:
    """Ordered terms from one technique, optionally with their scores.

    Invariants, enforced at construction: terms are non-empty, contain no
    '|' (the prompt separator), and are free of duplicates; when scores are
    present they parallel the terms and are sorted descending with
    lexicographic tie-break.
    """

    technique: Technique
    terms: tuple[str, ...]
    scores: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.terms:
            raise ValueError("term list must not be empty")
        for term in self.terms:
            if not term:
                raise ValueError("terms must be non-empty")
            if "|" in term:
                raise ValueError(f"term {term!r} contains the '|' separator")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("terms must not contain duplicates")
        if self.scores is not None:
            if len(self.scores) != len(self.terms):
                raise ValueError("scores must parallel terms")
            for i in range(len(self.terms) - 1):
                a, b = self.scores[i], self.scores[i + 1]
                if a < b or (a == b and self.terms[i] > self.terms[i + 1]):
                    raise ValueError("scores must be descending, ties lexicographic")


def _ranked(technique: Technique, scored: dict[str, float], n_terms: int) -> KeyTermList:
    order = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))[:n_terms]
    return KeyTermList(
        technique=technique,
        terms=tuple(term for term, _ in order),
        scores=tuple(score for _, score in order),
    )


def _clean_passthrough(values: Iterable[str], case_insensitive_dedup: bool) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    for value in values:
        term = value.replace("|", "").strip()
        if not term:
            continue
        key = term.lower() if case_insensitive_dedup else term
        if key in seen:
            continue
        seen.add(key)
        out.append(term)
    return out


def extract_keywords(article: Article) -> KeyTermList:
    """Author keywords, original order, case-insensitively deduplicated."""
    terms = _clean_passthrough(article.keywords, case_insensitive_dedup=True)
    if not terms:
        raise NoTermsAvailable(f"article {article.id!r} has no usable keywords")
    return KeyTermList(Technique.KEYWORDS, tuple(terms))


def extract_mesh(article: Article) -> KeyTermList:
    """MeSH descriptors, original order, exact-match deduplicated."""
    terms = _clean_passthrough(article.mesh_terms, case_insensitive_dedup=False)
    if not terms:
        raise NoTermsAvailable(f"article {article.id!r} has no usable MeSH terms")
    return KeyTermList(Technique.MESH, tuple(terms))


def _eligible_tokens(text: str, stopwords: StopwordList) -> list[str]:
    return [
        t
        for t in textproc.tokenize(text)
        if len(t) >= MIN_TERM_LENGTH and t not in stopwords
    ]


def extract_tf(
    article: Article,
    n_terms: int = DEFAULT_N_TERMS,
    stopwords: StopwordList | None = None,
) -> KeyTermList:
    """Most frequent eligible tokens over the whole article text."""
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    if stopwords is None:
        stopwords = textproc.default_stopwords()
    counts: dict[str, float] = {}
    for token in _eligible_tokens(article.full_text(), stopwords):
        counts[token] = counts.get(token, 0.0) + 1.0
    if not counts:
        raise NoTermsAvailable(f"article {article.id!r} has no eligible tokens")
    return _ranked(Technique.TF, counts, n_terms)


def _imrad_documents(
    article: Article, stopwords: StopwordList
) -> dict[SectionKind, list[str]]:
    return {
        kind: _eligible_tokens(article.body_text(kind), stopwords)
        for kind in IMRAD_KINDS
        if article.body_text(kind)
    }


def _tfidf_scores(
    target_tokens: list[str], other_docs: list[list[str]]
) -> dict[str, float]:
    """Relative frequency in the target times smoothed idf over the
    documents (target plus others): idf = ln((1+S)/(1+df)) + 1."""
    total = len(target_tokens)
    if total == 0:
        return {}
    counts: dict[str, int] = {}
    for token in target_tokens:
        counts[token] = counts.get(token, 0) + 1
    docs = [set(target_tokens)] + [set(d) for d in other_docs]
    n_docs = len(docs)
    scores: dict[str, float] = {}
    for term, count in counts.items():
        df = sum(1 for d in docs if term in d)
        idf = math.log((1 + n_docs) / (1 + df)) + 1.0
        scores[term] = (count / total) * idf
    return scores


def extract_tfidf_for_kinds(
    article: Article,
    target_kinds: Sequence[SectionKind],
    n_terms: int = DEFAULT_N_TERMS,
    stopwords: StopwordList | None = None,
) -> KeyTermList:
    """TF-IDF where the target document is the union of the given kinds and
    every other IMRAD section present is a contrast document.

    Used with a single kind for section-level prompts; with (Introduction,
    Discussion) when a prompt must cover a combined input text.
    """
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    if stopwords is None:
        stopwords = textproc.default_stopwords()
    docs = _imrad_documents(article, stopwords)
    for kind in target_kinds:
        if kind not in docs:
            raise MissingSection(kind, f"article {article.id!r}")
    if len(docs) < 2:
        raise ValueError(
            f"article {article.id!r} has {len(docs)} IMRAD section(s); need >= 2"
        )
    target_tokens: list[str] = []
    for kind in target_kinds:
        target_tokens.extend(docs[kind])
    others = [tokens for kind, tokens in docs.items() if kind not in set(target_kinds)]
    scores = _tfidf_scores(target_tokens, others)
    if not scores:
        raise NoTermsAvailable(
            f"article {article.id!r}: no eligible tokens in target section(s)"
        )
    return _ranked(Technique.TFIDF, scores, n_terms)


def extract_tfidf(
    article: Article,
    target: SectionKind,
    n_terms: int = DEFAULT_N_TERMS,
    stopwords: StopwordList | None = None,
) -> KeyTermList:
    """Terms over-represented in one IMRAD section relative to the others."""
    return extract_tfidf_for_kinds(article, (target,), n_terms, stopwords)


# ---------------------------------------------------------------------------
# Embedding-similarity extraction
# ---------------------------------------------------------------------------


class EmbeddingProvider(Protocol):
    """Deterministic text -> fixed-dimension vector mapping."""

    def embed(self, text: str) -> np.ndarray: ...


class HashEmbedder:
    """Seeded hashed bag-of-words projection.

    Each token is hashed (SHA-256, keyed by the seed) to one of `dim`
    signed coordinates; a text embeds to the sum of its token features.
    Fully deterministic across processes and platforms, which makes it the
    default for tests and offline runs.
    """

    def __init__(self, dim: int = 256, seed: int = 0):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.seed = seed

    def _token_slot(self, token: str) -> tuple[int, float]:
        digest = hashlib.sha256(f"{self.seed}:{token}".encode("utf-8")).digest()
        index = int.from_bytes(digest[:8], "big") % self.dim
        sign = 1.0 if digest[8] % 2 == 0 else -1.0
        return index, sign

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in textproc.tokenize(text):
            index, sign = self._token_slot(token)
            vec[index] += sign
        return vec


class FileEmbedder:
    """Lookup into a precomputed-embedding file.

    File format: line-delimited ``{"text": ..., "vector": [...]}``. All
    vectors must share one dimension. Lookups are exact-text; a missing
    text raises KeyError (surfaced as ProviderFailure by the extractor).
    Read-only after construction, hence safe for concurrent embed calls.
    """

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise ValueError("embedding file contains no vectors")
        dims = {v.shape[0] for v in vectors.values()}
        if len(dims) != 1 or 0 in dims:
            raise ValueError(f"inconsistent embedding dimensions: {sorted(dims)}")
        self._vectors = vectors
        self.dim = dims.pop()

    @classmethod
    def from_path(cls, path: str | Path) -> "FileEmbedder":
        vectors: dict[str, np.ndarray] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                rec = json.loads(raw)
                if not isinstance(rec.get("text"), str) or "vector" not in rec:
                    raise ValueError(f"{path}:{lineno}: expected {{text, vector}}")
                vectors[rec["text"]] = np.asarray(rec["vector"], dtype=np.float64)
        return cls(vectors)

    def embed(self, text: str) -> np.ndarray:
        return self._vectors[text]


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def extract_embedding_terms(
    text: str,
    provider: EmbeddingProvider,
    ngram_range: tuple[int, int] = (1, 1),
    n_terms: int = DEFAULT_N_TERMS,
    stopwords: StopwordList | None = None,
) -> KeyTermList:
    """Candidate n-grams ranked by cosine similarity to the whole text.

    Candidates are the lo..hi-grams of the tokenized text whose first and
    last tokens are not stopwords. Zero-norm vectors (candidate or
    document) cannot be scored and are excluded; if nothing remains the
    extractor reports NoTermsAvailable.
    """
    lo, hi = ngram_range
    if not (1 <= lo <= hi <= 3):
        raise ValueError(f"ngram_range must satisfy 1 <= lo <= hi <= 3, got {ngram_range}")
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    if stopwords is None:
        stopwords = textproc.default_stopwords()

    tokens = textproc.tokenize(text)
    candidates: list[str] = []
    seen: set[str] = set()
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            window = tokens[i : i + n]
            if window[0] in stopwords or window[-1] in stopwords:
                continue
            candidate = " ".join(window)
            if candidate not in seen:
                seen.add(candidate)
                candidates.append(candidate)
    if not candidates:
        raise NoTermsAvailable("no candidate n-grams survive the stopword rule")

    def _embed(value: str) -> np.ndarray:
        try:
            return np.asarray(provider.embed(value), dtype=np.float64)
        except Exception as exc:
            raise ProviderFailure(f"embedding failed for {value!r}: {exc}") from exc

    doc_vec = _embed(text)
    if np.linalg.norm(doc_vec) == 0:
        raise NoTermsAvailable("document embeds to the zero vector")

    scores: dict[str, float] = {}
    for candidate in candidates:
        vec = _embed(candidate)
        if np.linalg.norm(vec) == 0:
            continue
        scores[candidate] = _cosine(vec, doc_vec)
    if not scores:
        raise NoTermsAvailable("every candidate embeds to the zero vector")
    return _ranked(Technique.KEYBERT, scores, n_terms)
