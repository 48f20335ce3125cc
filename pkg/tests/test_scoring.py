"""Scoring: overlap counts, match rank formula, normalization, corpus ranking."""

from __future__ import annotations

import random

import pytest

from patgraph.errors import EmptyCorpus, UnknownDesign
from patgraph.model import FadKnowledgeBase
from patgraph.scoring import (
    OverlapCounts,
    ScoringWeights,
    compute_overlap,
    match_rank,
    normalize_scores,
    score_corpus,
    scores_to_csv,
)

from conftest import build_random_design


class TestComputeOverlap:
    def test_identical_copy_counts(self, corpus_kb):
        report = compute_overlap(corpus_kb, "corkscrew.sldprt", "US0640004")
        assert report.counts == OverlapCounts(3, 2, 1)
        assert report.function_pairs == [("f1", "f1")]

    def test_against_empty_design(self, corkscrew_kb):
        corkscrew_kb.upsert_design("patent", "EMPTY", "Nothing yet")
        report = compute_overlap(corkscrew_kb, "corkscrew.sldprt", "EMPTY")
        assert report.counts == OverlapCounts(0, 0, 0)

    def test_partial_fixture_two_one_zero(self, kb):
        """Two shared geometry types and one shared FGI, but function steps differ."""
        a = kb.upsert_design("emergDesign", "a.sldprt", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "arm", "lever")
        kb.add_geometry(pa, "g2", "top", "lid")
        kb.add_geometry(pa, "g3", "body", "container")
        kb.add_fgi(pa, "g1", "g2", "press", ["f1"])
        kb.add_fgi(pa, "g2", "g3", "separates", ["f1"])

        b = kb.upsert_design("patent", "USB", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "handle", "lever")
        kb.add_geometry(pb, "h2", "cap", "lid")
        kb.add_fgi(pb, "h1", "h2", "press", ["f1"])

        report = compute_overlap(kb, a, b)
        # oracle: exhaustive matcher by hand — types {lever, lid} shared (2),
        # one (lever, press, lid) triple shared, f1 step-sets differ (2 vs 1)
        assert report.counts == OverlapCounts(2, 1, 0)
        pair = report.fgi_pairs[0]
        assert (pair[0].source_type, pair[0].action, pair[0].target_type) == (
            "lever", "press", "lid",
        )

    def test_multiset_counting_two_levers(self, kb):
        a = kb.upsert_design("emergDesign", "a", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "x", "lever")
        kb.add_geometry(pa, "g2", "y", "lever")
        b = kb.upsert_design("patent", "B", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "p", "lever")
        kb.add_geometry(pb, "h2", "q", "lever")
        kb.add_geometry(pb, "h3", "r", "lever")
        report = compute_overlap(kb, a, b)
        assert report.counts.geometries == 2

    def test_action_comparison_is_lowercased(self, kb):
        a = kb.upsert_design("emergDesign", "a", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "x", "lever")
        kb.add_geometry(pa, "g2", "y", "lid")
        kb.add_fgi(pa, "g1", "g2", "Press", ["f1"])
        b = kb.upsert_design("patent", "B", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "p", "lever")
        kb.add_geometry(pb, "h2", "q", "lid")
        kb.add_fgi(pb, "h1", "h2", "PRESS", ["f1"])
        assert compute_overlap(kb, a, b).counts.fgis == 1

    def test_fgi_matching_is_direction_sensitive(self, kb):
        a = kb.upsert_design("emergDesign", "a", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "x", "lever")
        kb.add_geometry(pa, "g2", "y", "lid")
        kb.add_fgi(pa, "g1", "g2", "press", ["f1"])
        b = kb.upsert_design("patent", "B", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "p", "lever")
        kb.add_geometry(pb, "h2", "q", "lid")
        kb.add_fgi(pb, "h2", "h1", "press", ["f1"])  # reversed
        assert compute_overlap(kb, a, b).counts.fgis == 0

    def test_behaviour_ids_group_separately(self, kb):
        a = kb.upsert_design("emergDesign", "a", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "x", "lever")
        kb.add_geometry(pa, "g2", "y", "lid")
        kb.add_fgi(pa, "g1", "g2", "press", ["f2_b1"])
        kb.add_fgi(pa, "g2", "g1", "lifts", ["f2_b2"])
        b = kb.upsert_design("patent", "B", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "p", "lever")
        kb.add_geometry(pb, "h2", "q", "lid")
        kb.add_fgi(pb, "h1", "h2", "press", ["f9"])
        report = compute_overlap(kb, a, b)
        # f2_b1 (one press step) pairs with f9; f2_b2 has no partner
        assert report.counts.functions == 1
        assert report.function_pairs == [("f2_b1", "f9")]

    def test_unknown_design(self, corkscrew_kb):
        with pytest.raises(UnknownDesign):
            compute_overlap(corkscrew_kb, "corkscrew.sldprt", "ghost")

    def test_action_synonym_mode(self, kb):
        from conftest import sample_lexicon

        kb = FadKnowledgeBase(lexicon=sample_lexicon())
        a = kb.upsert_design("emergDesign", "a", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "x", "lever")
        kb.add_geometry(pa, "g2", "y", "lid")
        kb.add_fgi(pa, "g1", "g2", "press", ["f1"])
        b = kb.upsert_design("patent", "B", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "p", "lever")
        kb.add_geometry(pb, "h2", "q", "lid")
        kb.add_fgi(pb, "h1", "h2", "push", ["f1"])  # lexicon synonym of press
        assert compute_overlap(kb, a, b).counts.fgis == 0
        assert compute_overlap(kb, a, b, action_synonyms=True).counts.fgis == 1


class TestMatchRank:
    def test_zero(self):
        assert match_rank(OverlapCounts(0, 0, 0)) == 0

    def test_two_one_zero(self):
        assert match_rank(OverlapCounts(2, 1, 0)) == pytest.approx(40 / 60, abs=1e-9)

    def test_two_one_one_exceeds_one(self):
        assert match_rank(OverlapCounts(2, 1, 1)) == pytest.approx(70 / 60, abs=1e-9)

    def test_custom_weights(self):
        weights = ScoringWeights(1, 1, 1, 3)
        assert match_rank(OverlapCounts(1, 1, 1), weights) == pytest.approx(1.0)

    def test_divisor_must_be_positive(self):
        with pytest.raises(ValueError):
            ScoringWeights(divisor=0)


class TestNormalization:
    def test_three_point_example(self):
        assert normalize_scores([0.2, 0.5, 0.8]) == pytest.approx([0.0, 0.5, 1.0])

    def test_degenerate_equal_positive(self):
        assert normalize_scores([0.4, 0.4]) == [1.0, 1.0]

    def test_degenerate_all_zero(self):
        assert normalize_scores([0.0, 0.0, 0.0]) == [0.0, 0.0, 0.0]

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            normalize_scores([])

    def test_random_vectors_preserve_order_and_bounds(self):
        rng = random.Random(31)
        for _ in range(200):
            raws = [rng.uniform(0, 5) for _ in range(rng.randint(1, 12))]
            normalized = normalize_scores(raws)
            assert all(0.0 <= value <= 1.0 for value in normalized)
            for i in range(len(raws)):
                for j in range(len(raws)):
                    if raws[i] < raws[j]:
                        assert normalized[i] <= normalized[j]
            if max(raws) > min(raws):
                assert normalized[raws.index(max(raws))] == 1.0
                assert normalized[raws.index(min(raws))] == 0.0


class TestScoreCorpus:
    def test_identical_copy_ranks_first_at_one(self, corpus_kb):
        results = score_corpus(corpus_kb, "corkscrew.sldprt")
        assert results[0].unique_id == "US0640004"
        assert results[0].score.normalized == 1.0
        assert results[0].counts == OverlapCounts(3, 2, 1)

    def test_single_zero_overlap_patent_normalizes_to_zero(self, corkscrew_kb):
        other = corkscrew_kb.upsert_design("patent", "US99", "Unrelated")
        product = corkscrew_kb.add_product(other, "P1", "x")
        corkscrew_kb.add_geometry(product, "g1", "pipe", "spout")
        results = score_corpus(corkscrew_kb, "corkscrew.sldprt")
        assert len(results) == 1
        assert results[0].score.normalized == 0.0

    def test_unknown_design(self, corpus_kb):
        with pytest.raises(UnknownDesign):
            score_corpus(corpus_kb, "ghost")

    def test_empty_corpus(self, corkscrew_kb):
        with pytest.raises(EmptyCorpus):
            score_corpus(corkscrew_kb, "corkscrew.sldprt")

    def test_full_ranking_equals_brute_force_recomputation(self):
        rng = random.Random(55)
        kb = FadKnowledgeBase()
        for index in range(5):
            build_random_design(kb, rng, "patent", f"US{index:03d}")
        design = build_random_design(kb, rng, "emergDesign", "probe.sldprt")
        results = score_corpus(kb, design)
        raws = {}
        for other in kb.list_design_refs("patent"):
            raws[other.unique_id] = match_rank(
                compute_overlap(kb, design, other).counts
            )
        normalized = normalize_scores([raws[r.unique_id] for r in results])
        for result, expected_norm in zip(results, normalized):
            assert result.score.raw == pytest.approx(raws[result.unique_id])
            assert result.score.normalized == pytest.approx(expected_norm)
        ordered = sorted(results, key=lambda r: (-r.score.normalized, r.unique_id))
        assert [r.unique_id for r in ordered] == [r.unique_id for r in results]


class TestScoringProperties:
    def test_symmetry_and_self_maximality_on_random_pairs(self):
        rng = random.Random(99)
        kb = FadKnowledgeBase()
        refs = [build_random_design(kb, rng, "patent", f"US{i:04d}") for i in range(12)]
        for _ in range(60):
            a, b = rng.choice(refs), rng.choice(refs)
            forward = compute_overlap(kb, a, b).counts
            backward = compute_overlap(kb, b, a).counts
            assert forward == backward
            self_raw = match_rank(compute_overlap(kb, a, a).counts)
            assert self_raw >= match_rank(forward) - 1e-12

    def test_matching_fgi_addition_never_decreases_raw(self, kb):
        a = kb.upsert_design("emergDesign", "a", "")
        pa = kb.add_product(a, "P1", "a")
        kb.add_geometry(pa, "g1", "x", "lever")
        kb.add_geometry(pa, "g2", "y", "lid")
        kb.add_fgi(pa, "g1", "g2", "press", ["f1"])
        kb.add_fgi(pa, "g1", "g2", "lifts", ["f2"])
        b = kb.upsert_design("patent", "B", "")
        pb = kb.add_product(b, "P1", "b")
        kb.add_geometry(pb, "h1", "p", "lever")
        kb.add_geometry(pb, "h2", "q", "lid")
        kb.add_fgi(pb, "h1", "h2", "press", ["f1"])
        before = match_rank(compute_overlap(kb, a, b).counts)
        kb.add_fgi(pb, "h1", "h2", "lifts", ["f2"])  # matches a's unmatched FGI
        after = match_rank(compute_overlap(kb, a, b).counts)
        assert after >= before

    def test_scaling_weights_keeps_the_ordering(self):
        rng = random.Random(123)
        kb = FadKnowledgeBase()
        for index in range(6):
            build_random_design(kb, rng, "patent", f"US{index:03d}")
        design = build_random_design(kb, rng, "emergDesign", "probe.sldprt")
        base = score_corpus(kb, design)
        scaled_weights = ScoringWeights(10 * 7, 20 * 7, 30 * 7, 60 * 7)
        scaled = score_corpus(kb, design, weights=scaled_weights)
        assert [r.unique_id for r in base] == [r.unique_id for r in scaled]


class TestCsvExport:
    def test_header_and_rows(self, corpus_kb):
        results = score_corpus(corpus_kb, "corkscrew.sldprt")
        text = scores_to_csv(results)
        lines = text.strip().splitlines()
        assert lines[0] == "patent_id,raw,normalized,geometry_count,fgi_count,function_count"
        assert lines[1].startswith("US0640004,")
        assert len(lines) == len(results) + 1
