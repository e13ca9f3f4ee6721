"""Self-contained ROUGE-1, ROUGE-2, and summary-level ROUGE-Lsum.

No stemming and no stopword removal: scores are a pure function of the
toolkit tokenizer. F is the unweighted harmonic mean, zero whenever
precision and recall are both zero. ROUGE-Lsum follows the summary-level
union-LCS formulation: per reference sentence, the union of LCS matches
against all candidate sentences, with every candidate token position
creditable at most once overall.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import textproc
from .errors import BadN, DuplicateId, EmptySet, MissingReference


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f: float

    @classmethod
    def from_counts(cls, overlap: float, cand_total: int, ref_total: int) -> "RougeScore":
        p = overlap / cand_total if cand_total else 0.0
        r = overlap / ref_total if ref_total else 0.0
        f = 2.0 * p * r / (p + r) if p + r else 0.0
        return cls(p, r, f)


@dataclass
class CorpusScore:
    metric: str
    mean_f: float
    per_example: list[tuple[str, RougeScore]]


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """N-gram overlap F-score for n in {1, 2}."""
    if n not in (1, 2):
        raise BadN(f"rouge_n supports n in {{1, 2}}, got {n}")
    cand = textproc.ngram_counts(textproc.tokenize(candidate), n)
    ref = textproc.ngram_counts(textproc.tokenize(reference), n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items() if gram in ref)
    return RougeScore.from_counts(overlap, sum(cand.values()), sum(ref.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (iterative, two rows)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def _lcs_match_indices(ref: Sequence[str], cand: Sequence[str]) -> set[int]:
    """Reference-side indices of one LCS of ref and cand.

    The backtrack prefers moving up the reference on ties, which pins a
    single deterministic match set.
    """
    m, n = len(ref), len(cand)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if ref[i - 1] == cand[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    matches: set[int] = set()
    i, j = m, n
    while i > 0 and j > 0:
        if ref[i - 1] == cand[j - 1]:
            matches.add(i - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] > table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return matches


def rouge_lsum(candidate: str, reference: str) -> RougeScore:
    """Summary-level LCS score over sentence splits."""
    cand_sents = [textproc.tokenize(s) for s in textproc.split_sentences(candidate)]
    ref_sents = [textproc.tokenize(s) for s in textproc.split_sentences(reference)]
    cand_sents = [s for s in cand_sents if s]
    ref_sents = [s for s in ref_sents if s]
    cand_total = sum(len(s) for s in cand_sents)
    ref_total = sum(len(s) for s in ref_sents)

    cand_budget = Counter(tok for s in cand_sents for tok in s)
    ref_budget = Counter(tok for s in ref_sents for tok in s)
    hits = 0
    for ref_sent in ref_sents:
        union: set[int] = set()
        for cand_sent in cand_sents:
            union |= _lcs_match_indices(ref_sent, cand_sent)
        for idx in sorted(union):
            token = ref_sent[idx]
            if cand_budget[token] > 0 and ref_budget[token] > 0:
                hits += 1
                cand_budget[token] -= 1
                ref_budget[token] -= 1
    return RougeScore.from_counts(hits, cand_total, ref_total)


#: Metric registry: names match the result tables.
METRICS = {
    "rouge1": lambda cand, ref: rouge_n(cand, ref, 1),
    "rouge2": lambda cand, ref: rouge_n(cand, ref, 2),
    "rougeLsum": rouge_lsum,
}


def score_corpus(
    predictions: Sequence[tuple[str, str]],
    references: Sequence[tuple[str, str]],
    metrics: Iterable[str] = ("rouge1", "rouge2", "rougeLsum"),
    threads: int = 1,
) -> list[CorpusScore]:
    """Score every prediction against its reference for each metric.

    Prediction ids must be unique and each must have a reference. Output
    is ordered by metric name, per-example entries in prediction order,
    with mean F as the corpus aggregate. The thread count never changes
    the result, only how the per-example work is scheduled.
    """
    metric_names = sorted(set(metrics))
    for name in metric_names:
        if name not in METRICS:
            raise ValueError(f"unknown metric {name!r}; choose from {sorted(METRICS)}")
    if not predictions or not metric_names:
        raise EmptySet("need at least one prediction and one metric")

    ref_map: dict[str, str] = {}
    for ident, text in references:
        if ident in ref_map:
            raise DuplicateId(ident, "references")
        ref_map[ident] = text
    seen: set[str] = set()
    for ident, _ in predictions:
        if ident in seen:
            raise DuplicateId(ident, "predictions")
        seen.add(ident)
        if ident not in ref_map:
            raise MissingReference(ident)

    results: list[CorpusScore] = []
    for name in metric_names:
        scorer = METRICS[name]

        def _one(pair: tuple[str, str]) -> tuple[str, RougeScore]:
            ident, text = pair
            return ident, scorer(text, ref_map[ident])

        if threads > 1 and len(predictions) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                per_example = list(pool.map(_one, predictions))
        else:
            per_example = [_one(pair) for pair in predictions]
        mean_f = sum(score.f for _, score in per_example) / len(per_example)
        results.append(CorpusScore(name, mean_f, per_example))
    return results
