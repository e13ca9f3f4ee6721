from __future__ import annotations

import pytest

from keysum.corpus import Article, SectionKind, SectionRecord


def make_article(
    ident: str = "a1",
    intro: str = "intro body text here",
    methods: str = "methods body text here",
    results: str = "results body text here",
    discussion: str = "discussion body text here",
    extra_sections: list[tuple[str, str]] | None = None,
    abstract: dict | None = None,
    keywords: list[str] | None = None,
    mesh_terms: list[str] | None = None,
) -> Article:
    """Article with a full IMRAD skeleton; pass empty strings to drop parts."""
    headings = [
        ("Introduction", SectionKind.INTRODUCTION, intro),
        ("Methods", SectionKind.METHODS, methods),
        ("Results", SectionKind.RESULTS, results),
        ("Discussion", SectionKind.DISCUSSION, discussion),
    ]
    sections = [
        SectionRecord(h, k, body) for h, k, body in headings if body
    ]
    for heading, body in extra_sections or []:
        sections.append(SectionRecord(heading, SectionKind.OTHER, body))
    if abstract is None:
        abstract = {
            SectionKind.INTRODUCTION: "intro summary.",
            SectionKind.METHODS: "methods summary.",
            SectionKind.RESULTS: "results summary.",
            SectionKind.DISCUSSION: "discussion summary.",
        }
    return Article(
        id=ident,
        title=f"Title of {ident}",
        sections=sections,
        abstract=abstract,
        keywords=["term one", "term two"] if keywords is None else keywords,
        mesh_terms=["Descriptor A", "Descriptor B"] if mesh_terms is None else mesh_terms,
    )


@pytest.fixture
def article() -> Article:
    return make_article()
