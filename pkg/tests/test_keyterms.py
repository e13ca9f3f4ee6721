from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from conftest import make_article
from keysum._rng import SplitMix64
from keysum.corpus import SectionKind
from keysum.errors import MissingSection, NoTermsAvailable, ProviderFailure
from keysum.keyterms import (
    FileEmbedder,
    HashEmbedder,
    KeyTermList,
    Technique,
    extract_embedding_terms,
    extract_keywords,
    extract_mesh,
    extract_tf,
    extract_tfidf,
    extract_tfidf_for_kinds,
)

NO_STOPWORDS = frozenset()


class TestKeyTermListInvariants:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            KeyTermList(Technique.TF, ())

    def test_rejects_pipe(self):
        with pytest.raises(ValueError):
            KeyTermList(Technique.TF, ("a|b",))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            KeyTermList(Technique.TF, ("a", "a"))

    def test_rejects_unsorted_scores(self):
        with pytest.raises(ValueError):
            KeyTermList(Technique.TF, ("a", "b"), (1.0, 2.0))

    def test_rejects_tie_out_of_lexicographic_order(self):
        with pytest.raises(ValueError):
            KeyTermList(Technique.TF, ("b", "a"), (1.0, 1.0))

    def test_accepts_valid(self):
        terms = KeyTermList(Technique.TF, ("a", "b"), (2.0, 1.0))
        assert terms.terms == ("a", "b")


class TestPassthroughExtractors:
    def test_keywords_passthrough(self):
        article = make_article(keywords=["cancer", "p53"])
        assert extract_keywords(article).terms == ("cancer", "p53")

    def test_keywords_case_insensitive_dedup(self):
        article = make_article(keywords=["Xyz", "xyz"])
        assert extract_keywords(article).terms == ("Xyz",)

    def test_keywords_empty(self):
        with pytest.raises(NoTermsAvailable):
            extract_keywords(make_article(keywords=[]))

    def test_keywords_pipe_stripped(self):
        article = make_article(keywords=["a|b", "|"])
        assert extract_keywords(article).terms == ("ab",)

    def test_mesh_passthrough(self):
        article = make_article(mesh_terms=["Neoplasms", "Apoptosis"])
        assert extract_mesh(article).terms == ("Neoplasms", "Apoptosis")

    def test_mesh_exact_dedup(self):
        article = make_article(mesh_terms=["A", "A", "a"])
        assert extract_mesh(article).terms == ("A", "a")

    def test_mesh_empty(self):
        with pytest.raises(NoTermsAvailable):
            extract_mesh(make_article(mesh_terms=[]))


class TestExtractTf:
    def test_frequency_ranking(self):
        article = make_article(
            intro="alpha alpha beta gamma gamma gamma", methods="", results="",
            discussion="",
        )
        got = extract_tf(article, n_terms=2, stopwords=NO_STOPWORDS)
        assert got.terms == ("gamma", "alpha")
        assert got.scores == (3.0, 2.0)

    def test_exhaustion_returns_everything_ranked(self):
        article = make_article(intro="bb aa aa", methods="", results="", discussion="")
        got = extract_tf(article, n_terms=50, stopwords=NO_STOPWORDS)
        assert got.terms == ("aa", "bb")

    def test_ties_break_lexicographically(self):
        article = make_article(intro="zz yy xx", methods="", results="", discussion="")
        got = extract_tf(article, n_terms=3, stopwords=NO_STOPWORDS)
        assert got.terms == ("xx", "yy", "zz")

    def test_stopwords_and_short_tokens_dropped(self):
        article = make_article(
            intro="the the the xx a b c", methods="", results="", discussion=""
        )
        got = extract_tf(article, n_terms=5, stopwords=frozenset({"the"}))
        assert got.terms == ("xx",)

    def test_no_eligible_tokens(self):
        article = make_article(intro="a b c", methods="", results="", discussion="")
        with pytest.raises(NoTermsAvailable):
            extract_tf(article, stopwords=NO_STOPWORDS)

    def test_bad_n_terms(self):
        with pytest.raises(ValueError):
            extract_tf(make_article(), n_terms=0)

    def test_matches_brute_force(self):
        rng = SplitMix64(21)
        vocab = [f"w{i:02d}" for i in range(30)]
        for trial in range(60):
            body = " ".join(vocab[rng.randbelow(len(vocab))] for _ in range(80))
            article = make_article(intro=body, methods="", results="", discussion="")
            n = 1 + rng.randbelow(12)
            got = extract_tf(article, n_terms=n, stopwords=NO_STOPWORDS)
            assert list(got.terms) == oracles.brute_force_tf(body, n, NO_STOPWORDS)


class TestExtractTfidf:
    def test_formula_worked_example(self):
        # Target "xx xx yy" against one other section "yy zz zz":
        # rf(xx)=2/3 with idf ln(3/2)+1, rf(yy)=1/3 with idf ln(3/3)+1.
        article = make_article(
            intro="xx xx yy", methods="yy zz zz", results="", discussion=""
        )
        got = extract_tfidf(article, SectionKind.INTRODUCTION, n_terms=1,
                            stopwords=NO_STOPWORDS)
        assert got.terms == ("xx",)
        assert got.scores[0] == pytest.approx((2 / 3) * (math.log(3 / 2) + 1), abs=1e-12)
        full = extract_tfidf(article, SectionKind.INTRODUCTION, n_terms=5,
                             stopwords=NO_STOPWORDS)
        assert full.terms == ("xx", "yy")
        assert full.scores[1] == pytest.approx(1 / 3, abs=1e-12)

    def test_section_unique_term_beats_shared_term(self):
        # Equal within-target frequency, but "bb" is unique to the target.
        article = make_article(
            intro="aa bb", methods="aa cc", results="", discussion=""
        )
        got = extract_tfidf(article, SectionKind.INTRODUCTION, n_terms=2,
                            stopwords=NO_STOPWORDS)
        assert got.terms == ("bb", "aa")

    def test_missing_target(self):
        article = make_article(intro="aa bb", methods="cc dd", results="",
                               discussion="")
        with pytest.raises(MissingSection):
            extract_tfidf(article, SectionKind.RESULTS, stopwords=NO_STOPWORDS)

    def test_requires_two_sections(self):
        article = make_article(intro="aa bb", methods="", results="", discussion="")
        with pytest.raises(ValueError):
            extract_tfidf(article, SectionKind.INTRODUCTION, stopwords=NO_STOPWORDS)

    def test_combined_target_kinds(self):
        article = make_article(
            intro="aa aa", methods="bb cc", results="bb dd", discussion="ee aa"
        )
        got = extract_tfidf_for_kinds(
            article,
            (SectionKind.INTRODUCTION, SectionKind.DISCUSSION),
            n_terms=10,
            stopwords=NO_STOPWORDS,
        )
        # Target document is intro+discussion tokens; "aa" dominates by count.
        assert got.terms[0] == "aa"
        expected = oracles.brute_force_tfidf(
            {"i": "aa aa", "m": "bb cc", "r": "bb dd", "d": "ee aa"},
            ["i", "d"],
            10,
            NO_STOPWORDS,
        )
        assert list(got.terms) == expected

    def test_matches_brute_force(self):
        rng = SplitMix64(22)
        vocab = [f"w{i:02d}" for i in range(25)]
        kinds = (
            SectionKind.INTRODUCTION,
            SectionKind.METHODS,
            SectionKind.RESULTS,
            SectionKind.DISCUSSION,
        )
        for trial in range(60):
            bodies = {
                kind: " ".join(vocab[rng.randbelow(len(vocab))] for _ in range(30))
                for kind in kinds
            }
            article = make_article(
                intro=bodies[SectionKind.INTRODUCTION],
                methods=bodies[SectionKind.METHODS],
                results=bodies[SectionKind.RESULTS],
                discussion=bodies[SectionKind.DISCUSSION],
            )
            target = kinds[rng.randbelow(4)]
            n = 1 + rng.randbelow(10)
            got = extract_tfidf(article, target, n_terms=n, stopwords=NO_STOPWORDS)
            expected = oracles.brute_force_tfidf(
                {k.value: bodies[k] for k in kinds}, [target.value], n, NO_STOPWORDS
            )
            assert list(got.terms) == expected


class OneHotBagEmbedder:
    """Test provider: vocabulary-indexed counts of the embedded text."""

    def __init__(self, vocabulary: list[str]):
        self.vocabulary = list(vocabulary)

    def embed(self, text: str) -> np.ndarray:
        from keysum import textproc

        vec = np.zeros(len(self.vocabulary))
        for token in textproc.tokenize(text):
            if token in self.vocabulary:
                vec[self.vocabulary.index(token)] += 1.0
        return vec


class FailingEmbedder:
    def embed(self, text: str):
        raise RuntimeError("backend unavailable")


class TestExtractEmbeddingTerms:
    def test_most_frequent_unigram_wins_with_bag_provider(self):
        text = "aa bb aa cc aa bb"
        provider = OneHotBagEmbedder(["aa", "bb", "cc"])
        got = extract_embedding_terms(text, provider, (1, 1), 3, NO_STOPWORDS)
        assert got.terms[0] == "aa"
        # Brute-force cosine ranking over all candidates must agree exactly.
        doc = provider.embed(text)
        expected = {}
        for cand in ("aa", "bb", "cc"):
            v = provider.embed(cand)
            expected[cand] = float(
                np.dot(v, doc) / (np.linalg.norm(v) * np.linalg.norm(doc))
            )
        ranked = sorted(expected, key=lambda t: (-expected[t], t))
        assert list(got.terms) == ranked

    def test_singleton_candidate(self):
        got = extract_embedding_terms(
            "the one the", HashEmbedder(dim=16), (1, 1), 5, frozenset({"the"})
        )
        assert got.terms == ("one",)

    def test_zero_vector_provider(self):
        class ZeroEmbedder:
            def embed(self, text):
                return np.zeros(8)

        with pytest.raises(NoTermsAvailable):
            extract_embedding_terms("aa bb cc", ZeroEmbedder(), (1, 1), 3, NO_STOPWORDS)

    def test_provider_failure_is_wrapped(self):
        with pytest.raises(ProviderFailure):
            extract_embedding_terms("aa bb", FailingEmbedder(), (1, 1), 2, NO_STOPWORDS)

    def test_stopword_endpoints_excluded(self):
        got = extract_embedding_terms(
            "the cat sat", HashEmbedder(dim=32), (1, 2), 10, frozenset({"the"})
        )
        assert "the cat" not in got.terms
        assert "cat sat" in got.terms

    def test_no_candidates(self):
        with pytest.raises(NoTermsAvailable):
            extract_embedding_terms(
                "the of and", HashEmbedder(), (1, 1), 3, frozenset({"the", "of", "and"})
            )

    def test_bad_ngram_range(self):
        with pytest.raises(ValueError):
            extract_embedding_terms("aa", HashEmbedder(), (0, 1), 1, NO_STOPWORDS)
        with pytest.raises(ValueError):
            extract_embedding_terms("aa", HashEmbedder(), (2, 4), 1, NO_STOPWORDS)

    def test_scale_invariance(self):
        base = HashEmbedder(dim=64, seed=3)

        class Scaled:
            def embed(self, text):
                return 7.5 * base.embed(text)

        text = "alpha beta gamma delta alpha beta gamma alpha"
        one = extract_embedding_terms(text, base, (1, 2), 6, NO_STOPWORDS)
        two = extract_embedding_terms(text, Scaled(), (1, 2), 6, NO_STOPWORDS)
        assert one.terms == two.terms

    def test_deterministic(self):
        text = "alpha beta gamma delta epsilon zeta"
        one = extract_embedding_terms(text, HashEmbedder(seed=9), (1, 2), 5, NO_STOPWORDS)
        two = extract_embedding_terms(text, HashEmbedder(seed=9), (1, 2), 5, NO_STOPWORDS)
        assert one == two


class TestFileEmbedder:
    def test_lookup_and_dimension_check(self, tmp_path):
        path = tmp_path / "vectors.jsonl"
        path.write_text(
            '{"text": "aa", "vector": [1, 0]}\n{"text": "bb", "vector": [0, 1]}\n'
        )
        embedder = FileEmbedder.from_path(path)
        assert embedder.dim == 2
        assert list(embedder.embed("aa")) == [1.0, 0.0]

    def test_missing_text_surfaces_as_provider_failure(self, tmp_path):
        path = tmp_path / "vectors.jsonl"
        path.write_text('{"text": "aa bb", "vector": [1.0]}\n')
        with pytest.raises(ProviderFailure):
            extract_embedding_terms(
                "aa bb", FileEmbedder.from_path(path), (1, 1), 2, NO_STOPWORDS
            )

    def test_inconsistent_dimensions_rejected(self, tmp_path):
        path = tmp_path / "vectors.jsonl"
        path.write_text(
            '{"text": "aa", "vector": [1, 0]}\n{"text": "bb", "vector": [1]}\n'
        )
        with pytest.raises(ValueError):
            FileEmbedder.from_path(path)
