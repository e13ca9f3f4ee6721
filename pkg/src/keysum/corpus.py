"""Article parsing, validation, filtering, statistics, and splitting.

Input is line-delimited JSON, one article per line:

    {"id": ..., "title": ..., "sections": [{"heading": ..., "text": ...}],
     "abstract": {"introduction": ..., "methods": ..., "results": ...,
                  "discussion": ...},
     "keywords": [...], "mesh_terms": [...]}

`abstract`, `keywords` and `mesh_terms` may be absent (they default to
empty); unknown top-level keys are ignored so the toolkit's own enriched
output (which adds `section_kinds`) re-ingests cleanly. Section kinds are
always recomputed from headings on parse; the stored `section_kinds`
field is informational for downstream consumers.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from . import textproc
from ._rng import SplitMix64, shuffled
from .errors import BadRatios, DuplicateId, EmptyCorpus, MalformedRecord


class SectionKind(enum.Enum):
    INTRODUCTION = "introduction"
    METHODS = "methods"
    RESULTS = "results"
    DISCUSSION = "discussion"
    OTHER = "other"


#: The four kinds eligible for dataset construction, in canonical order.
IMRAD_KINDS: tuple[SectionKind, ...] = (
    SectionKind.INTRODUCTION,
    SectionKind.METHODS,
    SectionKind.RESULTS,
    SectionKind.DISCUSSION,
)

# Rejection reason codes emitted by filter_corpus.
REASON_MISSING_FULL_TEXT = "MissingFullText"
REASON_MISSING_KEYWORDS = "MissingKeywords"
REASON_INCOMPLETE_ABSTRACT = "IncompleteAbstract"
REASON_INCOMPLETE_SECTIONS = "IncompleteSections"
REASON_LENGTH_OUTLIER = "LengthOutlier"


@dataclass(frozen=True)
class SectionRecord:
    heading: str
    kind: SectionKind
    body: str


@dataclass
class Article:
    id: str
    title: str
    sections: list[SectionRecord]
    abstract: dict[SectionKind, str] = field(default_factory=dict)
    keywords: list[str] = field(default_factory=list)
    mesh_terms: list[str] = field(default_factory=list)

    def full_text(self) -> str:
        return "\n".join(s.body for s in self.sections if s.body)

    def body_text(self, kind: SectionKind) -> str:
        """All bodies of the given kind, document order, newline-joined."""
        return "\n".join(s.body for s in self.sections if s.kind is kind and s.body)

    @property
    def full_text_token_count(self) -> int:
        return textproc.count_tokens(self.full_text())

    def present_imrad_kinds(self) -> tuple[SectionKind, ...]:
        """IMRAD kinds that have a non-empty body in this article."""
        return tuple(k for k in IMRAD_KINDS if self.body_text(k))


@dataclass
class CorpusStats:
    n_articles: int
    mean_length: float
    sd_length: float
    truncation_coverage: dict[int, float]


@dataclass
class Split:
    train: list[str]
    validation: list[str]
    test: list[str]
    seed: int


# ---------------------------------------------------------------------------
# Section heading classification
# ---------------------------------------------------------------------------

# Leading numbering: arabic ("1.", "2.3") or roman ("II.", "iv)") followed by
# punctuation and/or whitespace. Roman numerals alone never swallow a word
# because the separator is mandatory.
_NUMBER_PREFIX_RE = re.compile(
    r"^\s*(?:\d+(?:[.\-]\d+)*|[ivxlcdm]+)\s*[).:\-]*\s+", re.IGNORECASE
)

HeadingTable = dict[str, SectionKind]


def normalize_heading(heading: str) -> str:
    """Normalized lookup form: numbering stripped, lowercase, tidy spacing."""
    text = heading
    while True:
        stripped = _NUMBER_PREFIX_RE.sub("", text, count=1)
        if stripped == text:
            break
        text = stripped
    text = text.replace("&", " and ")
    text = " ".join(text.lower().split())
    return text.strip(" .:;-")


def load_heading_table(path: str | Path) -> HeadingTable:
    table: HeadingTable = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                phrase, kind_name = line.split("\t")
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: expected phrase<TAB>kind") from exc
            kind = SectionKind(kind_name.strip().lower())
            table[normalize_heading(phrase)] = kind
    return table


_DEFAULT_HEADINGS: HeadingTable | None = None


def default_heading_table() -> HeadingTable:
    global _DEFAULT_HEADINGS
    if _DEFAULT_HEADINGS is None:
        ref = resources.files("keysum.data").joinpath("section_headings.tsv")
        with resources.as_file(ref) as path:
            _DEFAULT_HEADINGS = load_heading_table(path)
    return _DEFAULT_HEADINGS


def classify_section(heading: str, table: HeadingTable | None = None) -> SectionKind:
    """Map a heading to a section kind; unmatched headings are OTHER."""
    if table is None:
        table = default_heading_table()
    return table.get(normalize_heading(heading), SectionKind.OTHER)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_ABSTRACT_KEYS = {k.value: k for k in IMRAD_KINDS}


def _expect(cond: bool, lineno: int, detail: str) -> None:
    if not cond:
        raise MalformedRecord(lineno, detail)


def _parse_record(lineno: int, rec: dict, table: HeadingTable | None) -> Article:
    _expect(isinstance(rec.get("id"), str) and rec["id"] != "", lineno, "missing or empty 'id'")
    _expect(isinstance(rec.get("title"), str), lineno, "missing 'title'")
    _expect(isinstance(rec.get("sections"), list), lineno, "missing 'sections'")

    sections: list[SectionRecord] = []
    for i, sec in enumerate(rec["sections"]):
        _expect(isinstance(sec, dict), lineno, f"sections[{i}] is not an object")
        heading = sec.get("heading")
        text = sec.get("text")
        _expect(isinstance(heading, str), lineno, f"sections[{i}] missing 'heading'")
        _expect(isinstance(text, str), lineno, f"sections[{i}] missing 'text'")
        sections.append(SectionRecord(heading, classify_section(heading, table), text))

    abstract: dict[SectionKind, str] = {}
    raw_abstract = rec.get("abstract", {})
    _expect(isinstance(raw_abstract, dict), lineno, "'abstract' is not an object")
    for key, value in raw_abstract.items():
        _expect(key in _ABSTRACT_KEYS, lineno, f"unknown abstract part {key!r}")
        _expect(isinstance(value, str), lineno, f"abstract[{key!r}] is not a string")
        abstract[_ABSTRACT_KEYS[key]] = value

    def _string_list(name: str) -> list[str]:
        values = rec.get(name, [])
        _expect(isinstance(values, list), lineno, f"'{name}' is not a list")
        for v in values:
            _expect(isinstance(v, str), lineno, f"'{name}' contains a non-string")
        return list(values)

    return Article(
        id=rec["id"],
        title=rec["title"],
        sections=sections,
        abstract=abstract,
        keywords=_string_list("keywords"),
        mesh_terms=_string_list("mesh_terms"),
    )


def parse_articles(
    lines: Iterable[str | bytes], heading_table: HeadingTable | None = None
) -> list[Article]:
    """Parse line-delimited article records into Articles.

    Raises MalformedRecord (with the 1-based line number) on any schema
    violation and DuplicateId when two records share an id.
    """
    import json

    articles: list[Article] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, f"invalid JSON: {exc.msg}") from exc
        _expect(isinstance(rec, dict), lineno, "record is not a JSON object")
        article = _parse_record(lineno, rec, heading_table)
        if article.id in seen:
            raise DuplicateId(article.id)
        seen.add(article.id)
        articles.append(article)
    return articles


def article_to_record(article: Article) -> dict:
    """Serialize back to the input schema plus `section_kinds`."""
    return {
        "id": article.id,
        "title": article.title,
        "sections": [{"heading": s.heading, "text": s.body} for s in article.sections],
        "abstract": {k.value: article.abstract[k] for k in IMRAD_KINDS if k in article.abstract},
        "keywords": list(article.keywords),
        "mesh_terms": list(article.mesh_terms),
        "section_kinds": [s.kind.value for s in article.sections],
    }


# ---------------------------------------------------------------------------
# Filtering, statistics, splitting
# ---------------------------------------------------------------------------


def _mean_sd(values: Sequence[int]) -> tuple[float, float]:
    """Mean and population standard deviation (divide by n)."""
    n = len(values)
    mean = sum(values) / n
    variance = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(variance)


def _structural_reason(article: Article) -> str | None:
    if article.full_text_token_count == 0:
        return REASON_MISSING_FULL_TEXT
    if not any(k.strip() for k in article.keywords):
        return REASON_MISSING_KEYWORDS
    if any(not article.abstract.get(k, "").strip() for k in IMRAD_KINDS):
        return REASON_INCOMPLETE_ABSTRACT
    if any(not article.body_text(k) for k in IMRAD_KINDS):
        return REASON_INCOMPLETE_SECTIONS
    return None


def filter_corpus(
    articles: Sequence[Article], sd_multiplier: float = 2.0
) -> tuple[list[Article], list[tuple[str, str]]]:
    """Two-stage filter: structural completeness, then length outliers.

    Stage 1 drops articles lacking full text, keywords, a complete IMRAD
    structured abstract, or complete IMRAD body sections. Stage 2 computes
    the mean and population SD of token counts over stage-1 survivors and
    drops articles whose length deviates strictly more than
    sd_multiplier * SD from the mean (boundary values are kept).

    Returns (kept, rejected) with rejects as (id, reason) in input order.
    """
    if not articles:
        raise EmptyCorpus("cannot filter an empty corpus")
    if sd_multiplier <= 0:
        raise ValueError(f"sd_multiplier must be > 0, got {sd_multiplier}")

    rejected: dict[int, tuple[str, str]] = {}
    survivors: list[tuple[int, Article]] = []
    for idx, article in enumerate(articles):
        reason = _structural_reason(article)
        if reason is not None:
            rejected[idx] = (article.id, reason)
        else:
            survivors.append((idx, article))

    kept: list[Article] = []
    if survivors:
        lengths = [a.full_text_token_count for _, a in survivors]
        mean, sd = _mean_sd(lengths)
        for (idx, article), length in zip(survivors, lengths):
            if abs(length - mean) > sd_multiplier * sd:
                rejected[idx] = (article.id, REASON_LENGTH_OUTLIER)
            else:
                kept.append(article)

    return kept, [rejected[i] for i in sorted(rejected)]


def corpus_stats(articles: Sequence[Article], limits: Sequence[int] = ()) -> CorpusStats:
    """Length statistics plus, per limit, the fraction of articles with
    token count <= limit."""
    if not articles:
        raise EmptyCorpus("cannot compute statistics of an empty corpus")
    lengths = [a.full_text_token_count for a in articles]
    mean, sd = _mean_sd(lengths)
    coverage = {
        int(limit): sum(1 for v in lengths if v <= limit) / len(lengths)
        for limit in limits
    }
    return CorpusStats(len(articles), mean, sd, coverage)


def _floor_exactish(x: float) -> int:
    """floor(x) robust to float noise in n*ratio products.

    Ratio sums are validated to 1e-9, so anything within 1e-7 of an
    integer is treated as that integer (10 * 0.7 must floor to 7, not 6).
    """
    nearest = round(x)
    if abs(x - nearest) < 1e-7:
        return int(nearest)
    return math.floor(x)


def split_corpus(
    articles: Sequence[Article],
    ratios: tuple[float, float, float] = (0.7, 0.15, 0.15),
    seed: int = 0,
) -> Split:
    """Deterministic train/validation/test partition of article ids.

    Ids are sorted lexicographically, then Fisher-Yates shuffled with a
    SplitMix64 generator seeded from `seed`. Sizes are floor(n*r_train)
    and floor(n*r_val); the remainder goes to test.
    """
    r_train, r_val, r_test = ratios
    if min(r_train, r_val, r_test) <= 0:
        raise BadRatios(f"ratios must be positive, got {ratios}")
    if abs(r_train + r_val + r_test - 1.0) > 1e-9:
        raise BadRatios(f"ratios must sum to 1, got {ratios}")

    ids = sorted(a.id for a in articles)
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicateId(dupes[0], "split input")
    order = shuffled(ids, SplitMix64(seed))
    n = len(order)
    n_train = _floor_exactish(n * r_train)
    n_val = _floor_exactish(n * r_val)
    return Split(
        train=order[:n_train],
        validation=order[n_train : n_train + n_val],
        test=order[n_train + n_val :],
        seed=seed,
    )
