#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus at tests/data/synthetic_corpus.jsonl.

Twenty fabricated biomedical-flavoured articles, deterministic down to the
byte: seventeen are structurally complete, one lacks keywords, one lacks an
abstract part, and one is a length outlier, so a default ingest keeps
exactly seventeen. Run from the repository root:

    python tools/make_synthetic_corpus.py
"""

from __future__ import annotations

import json
from pathlib import Path

from keysum._rng import SplitMix64

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic_corpus.jsonl"

TOPICS = [
    "glucose", "insulin", "receptor", "kinase", "tumor", "biopsy", "cohort",
    "serum", "plasma", "antibody", "protein", "pathway", "mutation", "genome",
    "enzyme", "therapy", "dosage", "lesion", "membrane", "neuron",
]
FILLER = [
    "measured", "observed", "increased", "decreased", "compared", "analysed",
    "treated", "sampled", "detected", "reported", "estimated", "confirmed",
    "patients", "controls", "baseline", "followup", "significant", "cells",
]
SECTION_FLAVOUR = {
    "introduction": ["prior", "hypothesis", "motivation", "background", "aims"],
    "methods": ["protocol", "assay", "reagent", "centrifuge", "regression"],
    "results": ["table", "figure", "median", "interval", "pvalue"],
    "discussion": ["limitation", "implication", "interpretation", "future", "agreement"],
}
HEADINGS = {
    "introduction": ["Introduction", "1. Introduction", "Background"],
    "methods": ["Methods", "Materials and Methods", "2. Methods"],
    "results": ["Results", "3. Results", "Findings"],
    "discussion": ["Discussion", "Conclusions", "4. Discussion"],
}
MESH_POOL = [
    "Neoplasms", "Insulin Resistance", "Signal Transduction", "Biomarkers",
    "Cohort Studies", "Mutation", "Receptors, Cell Surface", "Apoptosis",
    "Glucose Metabolism Disorders", "Antibodies, Monoclonal",
]


def sentence(rng: SplitMix64, kind: str) -> str:
    length = 6 + rng.randbelow(5)
    words = []
    for _ in range(length):
        roll = rng.randbelow(10)
        if roll < 4:
            words.append(TOPICS[rng.randbelow(len(TOPICS))])
        elif roll < 8:
            words.append(FILLER[rng.randbelow(len(FILLER))])
        else:
            flavour = SECTION_FLAVOUR[kind]
            words.append(flavour[rng.randbelow(len(flavour))])
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def body(rng: SplitMix64, kind: str, n_sentences: int) -> str:
    return " ".join(sentence(rng, kind) for _ in range(n_sentences))


def article(rng: SplitMix64, index: int) -> dict:
    ident = f"art{index:03d}"
    big = index == 19
    sections = []
    for kind in ("introduction", "methods", "results", "discussion"):
        heading = HEADINGS[kind][rng.randbelow(3)]
        n_sentences = 40 + rng.randbelow(10) if big else 7 + rng.randbelow(6)
        sections.append({"heading": heading, "text": body(rng, kind, n_sentences)})
    if rng.randbelow(3) == 0:
        sections.append(
            {"heading": "Statistical analysis", "text": body(rng, "methods", 3)}
        )
    abstract = {
        kind: body(rng, kind, 2 + rng.randbelow(2))
        for kind in ("introduction", "methods", "results", "discussion")
    }
    n_keywords = 3 + rng.randbelow(3)
    keywords = []
    while len(keywords) < n_keywords:
        word = TOPICS[rng.randbelow(len(TOPICS))]
        if rng.randbelow(3) == 0:
            word = f"{word} {FILLER[rng.randbelow(len(FILLER))]}"
        if word not in keywords:
            keywords.append(word)
    mesh = []
    while len(mesh) < 3:
        term = MESH_POOL[rng.randbelow(len(MESH_POOL))]
        if term not in mesh:
            mesh.append(term)

    record = {
        "id": ident,
        "title": f"Synthetic study {index:03d} of {keywords[0]}",
        "sections": sections,
        "abstract": abstract,
        "keywords": keywords,
        "mesh_terms": mesh,
    }
    if index == 17:
        record["keywords"] = []
    if index == 18:
        del record["abstract"]["results"]
    return record


def main() -> None:
    rng = SplitMix64(20240611)
    records = [article(rng, i) for i in range(20)]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records))
    print(f"wrote {len(records)} articles to {OUT}")


if __name__ == "__main__":
    main()
