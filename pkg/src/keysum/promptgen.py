"""Prompt rendering and dataset assembly.

A prompt is a delimited key-term list:

    [CONTENT] term1 | term2 | ... | termN [SUMMARY]

optionally prefixed by a section-type token such as ``[INTRODUCTION]``.
Datasets come in three input modes: the concatenated introduction and
discussion with the whole structured abstract as target, or one example
per IMRAD section (with or without the section-type token in the prompt)
targeting the matching abstract part.

Confusion variants reassign prompts between articles through a seeded
derangement, guaranteeing every example carries a prompt from a different
article while the multiset of prompts is preserved.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import keyterms, textproc
from ._jsonio import read_jsonl, write_jsonl
from ._rng import SplitMix64, derangement, subseed
from .corpus import IMRAD_KINDS, Article, SectionKind
from .errors import (
    DuplicateId,
    EmptyParts,
    EmptyTermList,
    MalformedRecord,
    MissingSection,
    TooFewArticles,
)
from .keyterms import EmbeddingProvider, KeyTermList, Technique
from .textproc import StopwordList

#: Token limits for model inputs and targets.
FULL_INPUT_TOKEN_LIMIT = 2048
SECTION_INPUT_TOKEN_LIMIT = 512
TARGET_TOKEN_LIMIT = 512


class Mode(enum.Enum):
    """How article text is presented to the summarizer."""

    INTRO_DISCUSSION = "id"
    SECTIONS_PLAIN = "s-na"
    SECTIONS_TAGGED = "s-wa"


#: Rendered prompts must match this shape exactly.
PROMPT_RE = re.compile(r"(\[[A-Z]+\] )?\[CONTENT\] ([^|]+( \| [^|]+)*) \[SUMMARY\]")


@dataclass(frozen=True)
class PromptedExample:
    article_id: str
    mode: Mode
    section: SectionKind | None
    technique: Technique
    prompt: str
    input_text: str
    target: str
    confused_from: str | None = None


@dataclass(frozen=True)
class ExtractorSettings:
    """Knobs shared by the scored extractors during dataset construction."""

    n_terms: int = keyterms.DEFAULT_N_TERMS
    stopwords: StopwordList | None = None
    embedder: EmbeddingProvider | None = None
    ngram_range: tuple[int, int] = (1, 1)

    def resolved_stopwords(self) -> StopwordList:
        return self.stopwords if self.stopwords is not None else textproc.default_stopwords()

    def resolved_embedder(self) -> EmbeddingProvider:
        return self.embedder if self.embedder is not None else keyterms.HashEmbedder()


def render_prompt(
    terms: KeyTermList | Sequence[str], section: SectionKind | None = None
) -> str:
    """Render terms into the prompt grammar, optionally section-tagged."""
    term_seq = tuple(terms.terms if isinstance(terms, KeyTermList) else terms)
    if not term_seq:
        raise EmptyTermList("cannot render a prompt without terms")
    body = " | ".join(term_seq)
    prompt = f"[CONTENT] {body} [SUMMARY]"
    if section is not None:
        prompt = f"[{section.value.upper()}] {prompt}"
    return prompt


def parse_prompt(prompt: str) -> tuple[list[str], str | None]:
    """Invert render_prompt: recover (terms, section token text or None)."""
    section: str | None = None
    rest = prompt
    if not rest.startswith("[CONTENT] "):
        match = re.match(r"\[([A-Z]+)\] ", rest)
        if not match:
            raise ValueError(f"prompt does not start with a bracket token: {prompt!r}")
        section = match.group(1)
        rest = rest[match.end() :]
    if not rest.startswith("[CONTENT] ") or not rest.endswith(" [SUMMARY]"):
        raise ValueError(f"prompt violates the grammar: {prompt!r}")
    body = rest[len("[CONTENT] ") : -len(" [SUMMARY]")]
    terms = body.split(" | ")
    if any(not t for t in terms):
        raise ValueError(f"prompt contains an empty term: {prompt!r}")
    return terms, section


def integrate_section_summaries(parts: Mapping[SectionKind, str]) -> str:
    """Join per-section summaries in IMRAD order, newline-separated."""
    ordered = [parts[k] for k in IMRAD_KINDS if parts.get(k, "").strip()]
    if not ordered:
        raise EmptyParts("no section summaries to integrate")
    return "\n".join(ordered)


# ---------------------------------------------------------------------------
# Dataset construction
# ---------------------------------------------------------------------------


def _terms_for(
    article: Article,
    technique: Technique,
    section: SectionKind | None,
    source_text: str,
    settings: ExtractorSettings,
) -> KeyTermList:
    """Technique dispatch with the per-mode scoping rules.

    Keywords and MeSH are article-level metadata; TF always uses the whole
    text; TF-IDF and the embedding technique are scoped to the unit being
    summarized (one section, or the combined introduction+discussion).
    """
    stopwords = settings.resolved_stopwords()
    if technique is Technique.KEYWORDS:
        return keyterms.extract_keywords(article)
    if technique is Technique.MESH:
        return keyterms.extract_mesh(article)
    if technique is Technique.TF:
        return keyterms.extract_tf(article, settings.n_terms, stopwords)
    if technique is Technique.TFIDF:
        kinds = (section,) if section is not None else (
            SectionKind.INTRODUCTION,
            SectionKind.DISCUSSION,
        )
        return keyterms.extract_tfidf_for_kinds(article, kinds, settings.n_terms, stopwords)
    if technique is Technique.KEYBERT:
        return keyterms.extract_embedding_terms(
            source_text,
            settings.resolved_embedder(),
            settings.ngram_range,
            settings.n_terms,
            stopwords,
        )
    raise ValueError(f"unknown technique {technique!r}")


def build_examples(
    article: Article,
    mode: Mode,
    technique: Technique,
    input_limit: int | None = None,
    target_limit: int = TARGET_TOKEN_LIMIT,
    settings: ExtractorSettings | None = None,
) -> list[PromptedExample]:
    """Construct the prompted examples one article contributes in a mode.

    Intro+discussion mode yields a single example whose target is the whole
    structured abstract; the section modes yield one example per IMRAD
    section present, targeting the matching abstract part. Inputs and
    targets are token-truncated to their limits.
    """
    settings = settings or ExtractorSettings()
    if input_limit is None:
        input_limit = (
            FULL_INPUT_TOKEN_LIMIT
            if mode is Mode.INTRO_DISCUSSION
            else SECTION_INPUT_TOKEN_LIMIT
        )

    if mode is Mode.INTRO_DISCUSSION:
        intro = article.body_text(SectionKind.INTRODUCTION)
        discussion = article.body_text(SectionKind.DISCUSSION)
        if not intro:
            raise MissingSection(SectionKind.INTRODUCTION, f"article {article.id!r}")
        if not discussion:
            raise MissingSection(SectionKind.DISCUSSION, f"article {article.id!r}")
        source = intro + "\n" + discussion
        if not any(article.abstract.get(k, "").strip() for k in IMRAD_KINDS):
            raise MissingSection(None, f"article {article.id!r} has no structured abstract")
        target = integrate_section_summaries(article.abstract)
        terms = _terms_for(article, technique, None, source, settings)
        return [
            PromptedExample(
                article_id=article.id,
                mode=mode,
                section=None,
                technique=technique,
                prompt=render_prompt(terms),
                input_text=textproc.truncate_tokens(source, input_limit),
                target=textproc.truncate_tokens(target, target_limit),
            )
        ]

    examples: list[PromptedExample] = []
    for kind in IMRAD_KINDS:
        body = article.body_text(kind)
        if not body:
            continue
        abstract_part = article.abstract.get(kind, "")
        if not abstract_part.strip():
            raise MissingSection(kind, f"article {article.id!r} lacks the abstract part")
        terms = _terms_for(article, technique, kind, body, settings)
        prompt_section = kind if mode is Mode.SECTIONS_TAGGED else None
        examples.append(
            PromptedExample(
                article_id=article.id,
                mode=mode,
                section=kind,
                technique=technique,
                prompt=render_prompt(terms, prompt_section),
                input_text=textproc.truncate_tokens(body, input_limit),
                target=textproc.truncate_tokens(abstract_part, target_limit),
            )
        )
    return examples


# ---------------------------------------------------------------------------
# Confusion variants
# ---------------------------------------------------------------------------


def confuse(examples: Sequence[PromptedExample], seed: int) -> list[PromptedExample]:
    """Reassign prompts between articles within each (mode, section,
    technique) group via a seeded derangement of article ids.

    No example keeps a prompt derived from its own article; the donor id is
    recorded in confused_from and everything else is left untouched. The
    output is deterministic for a given seed and preserves input order.
    """
    groups: dict[tuple, list[int]] = {}
    for i, ex in enumerate(examples):
        groups.setdefault((ex.mode, ex.section, ex.technique), []).append(i)

    out = list(examples)
    for key in sorted(groups, key=lambda k: (k[0].value, k[1].value if k[1] else "", k[2].value)):
        indices = groups[key]
        prompts: dict[str, str] = {}
        for i in indices:
            ex = examples[i]
            if ex.article_id in prompts:
                raise DuplicateId(ex.article_id, f"confusion group {key}")
            prompts[ex.article_id] = ex.prompt
        ids = sorted(prompts)
        if len(ids) < 2:
            raise TooFewArticles(
                f"confusion group {key} has {len(ids)} article(s); need >= 2"
            )
        mode, section, technique = key
        rng = SplitMix64(
            subseed(seed, mode.value, section.value if section else "", technique.value)
        )
        donors = dict(zip(ids, derangement(ids, rng)))
        for i in indices:
            ex = examples[i]
            donor = donors[ex.article_id]
            out[i] = replace(ex, prompt=prompts[donor], confused_from=donor)
    return out


# ---------------------------------------------------------------------------
# Dataset files
# ---------------------------------------------------------------------------


def example_to_record(example: PromptedExample) -> dict:
    rec = {
        "article_id": example.article_id,
        "mode": example.mode.value,
    }
    if example.section is not None:
        rec["section"] = example.section.value
    rec.update(
        technique=example.technique.value,
        prompt=example.prompt,
        input_text=example.input_text,
        target=example.target,
    )
    if example.confused_from is not None:
        rec["confused_from"] = example.confused_from
    return rec


def _example_from_record(lineno: int, rec: dict) -> PromptedExample:
    try:
        mode = Mode(rec["mode"])
        technique = Technique(rec["technique"])
        section = SectionKind(rec["section"]) if "section" in rec else None
        example = PromptedExample(
            article_id=rec["article_id"],
            mode=mode,
            section=section,
            technique=technique,
            prompt=rec["prompt"],
            input_text=rec["input_text"],
            target=rec["target"],
            confused_from=rec.get("confused_from"),
        )
    except (KeyError, ValueError) as exc:
        raise MalformedRecord(lineno, f"bad dataset record: {exc}") from exc
    if mode is not Mode.INTRO_DISCUSSION and section is None:
        raise MalformedRecord(lineno, "section is required outside intro+discussion mode")
    if example.confused_from == example.article_id:
        raise MalformedRecord(lineno, "confused_from must name a different article")
    return example


def write_dataset(path: str | Path, examples: Iterable[PromptedExample]) -> None:
    write_jsonl(path, (example_to_record(ex) for ex in examples))


def read_dataset(path: str | Path) -> list[PromptedExample]:
    return [_example_from_record(lineno, rec) for lineno, rec in read_jsonl(path)]
