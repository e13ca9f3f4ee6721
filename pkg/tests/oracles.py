"""Independent brute-force implementations used to cross-check extractors
and filtering.

Deliberately written with different machinery than the library (explicit
dict loops, repeated-max selection instead of sort, direct formulas) so a
shared bug is unlikely.
"""

from __future__ import annotations

import math
import re

_WORD = re.compile(r"[^\W_]+")


def _words(text: str) -> list[str]:
    return _WORD.findall(text.lower())


def _eligible(text: str, stopwords: frozenset[str]) -> list[str]:
    out = []
    for w in _words(text):
        if len(w) < 2:
            continue
        if w in stopwords:
            continue
        out.append(w)
    return out


def _pick_top(scores: dict[str, float], n: int) -> list[str]:
    """Repeatedly select (max score, lexicographically smallest term)."""
    remaining = dict(scores)
    chosen: list[str] = []
    while remaining and len(chosen) < n:
        best = None
        for term, score in remaining.items():
            if best is None:
                best = term
                continue
            if score > remaining[best] or (score == remaining[best] and term < best):
                best = term
        chosen.append(best)
        del remaining[best]
    return chosen


def brute_force_tf(full_text: str, n_terms: int, stopwords: frozenset[str]) -> list[str]:
    counts: dict[str, float] = {}
    for w in _eligible(full_text, stopwords):
        counts[w] = counts.get(w, 0) + 1
    return _pick_top(counts, n_terms)


def brute_force_tfidf(
    section_texts: dict[str, str],
    target_names: list[str],
    n_terms: int,
    stopwords: frozenset[str],
) -> list[str]:
    """section_texts maps a section name to its text; the target document is
    the concatenation of target_names' token streams."""
    docs = {name: _eligible(text, stopwords) for name, text in section_texts.items()}
    target_tokens: list[str] = []
    for name in target_names:
        target_tokens.extend(docs[name])
    other_docs = [tokens for name, tokens in docs.items() if name not in target_names]
    all_docs = [target_tokens] + other_docs
    n_docs = len(all_docs)
    total = len(target_tokens)
    scores: dict[str, float] = {}
    for term in set(target_tokens):
        count = 0
        for w in target_tokens:
            if w == term:
                count += 1
        df = 0
        for doc in all_docs:
            if term in doc:
                df += 1
        idf = math.log((1 + n_docs) / (1 + df)) + 1.0
        scores[term] = (count / total) * idf
    return _pick_top(scores, n_terms)


def brute_force_outliers(
    lengths: dict[str, int], multiplier: float
) -> tuple[list[str], list[str]]:
    """(kept ids, rejected ids) for the |len - mean| > multiplier*SD rule."""
    values = list(lengths.values())
    mean = sum(values) / len(values)
    variance = 0.0
    for v in values:
        variance += (v - mean) * (v - mean)
    sd = math.sqrt(variance / len(values))
    kept, rejected = [], []
    for ident, v in lengths.items():
        if abs(v - mean) > multiplier * sd:
            rejected.append(ident)
        else:
            kept.append(ident)
    return kept, rejected


def exhaustive_lcs(a: list[str], b: list[str]) -> int:
    """Longest common subsequence by enumerating all subsequences of the
    shorter sequence (exponential; fine for len <= 10)."""
    if len(a) > len(b):
        a, b = b, a

    def is_subsequence(needle: list[str], haystack: list[str]) -> bool:
        it = iter(haystack)
        return all(any(x == y for y in it) for x in needle)

    best = 0
    for mask in range(1 << len(a)):
        sub = [a[i] for i in range(len(a)) if mask >> i & 1]
        if len(sub) > best and is_subsequence(sub, b):
            best = len(sub)
    return best
