"""Acceptance suite: every primary criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one pass/fail line
per criterion.
"""

from __future__ import annotations

import random
import shutil
import subprocess
import time
from contextlib import contextmanager

import pytest

from patgraph.csvio import export_annotation_csv, import_annotation_csv
from patgraph.errors import ConstraintViolation
from patgraph.model import FadKnowledgeBase
from patgraph.patql import execute_query, parse_query
from patgraph.pattern import EdgePattern, NodePattern, PatternSegment, PatternSpec
from patgraph.scoring import (
    OverlapCounts,
    compute_overlap,
    match_rank,
    normalize_scores,
    score_corpus,
)
from patgraph.search import fgi_pattern_search, fulltext_search, semantic_search
from patgraph.store import GraphStore
from patgraph.viz import to_dot

from conftest import (
    ACTIONS,
    GEOMETRY_TYPES,
    NAMES,
    build_corkscrew,
    build_random_corpus,
    build_random_design,
)
from oracles import (
    bf_fgi_search,
    bf_fulltext,
    bf_semantic,
    canonical_rows,
    check_dot,
    enumerate_pattern,
    structural_rows,
)
from test_patql import FIVE_LISTINGS, programmatic_equivalent


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def full_retrieval_spec(kind: str, key: str, value: str) -> PatternSpec:
    return PatternSpec(
        [
            PatternSegment(NodePattern("p", kind, {key: value})),
            PatternSegment(NodePattern("p"), EdgePattern(None, "hasProduct"), True),
            PatternSegment(NodePattern("pr", "product"), optional=True),
            PatternSegment(NodePattern("pr"), EdgePattern(None, "hasClaim"), True),
            PatternSegment(NodePattern("c"), optional=True),
            PatternSegment(NodePattern("pr"), EdgePattern(None, "hasGeometry"), True),
            PatternSegment(NodePattern("g1"), optional=True),
            PatternSegment(NodePattern("g1"), EdgePattern("fr", "hasFGI"), True),
            PatternSegment(NodePattern("g2"), optional=True),
        ],
        returns=["p", "pr", "c", "g1", "fr", "g2"],
    )


def test_corkscrew_fixture_round_trip():
    with criterion("corkscrew fixture round-trip (1 product, 3 geometries, 2 FGIs, "
                   "f1 with 2 steps, < 1 s)"):
        started = time.perf_counter()
        kb = FadKnowledgeBase()
        build_corkscrew(kb)
        doc = kb.get_fad("corkscrew.sldprt")
        assert len(doc.products) == 1
        assert doc.geometry_count() == 3
        assert doc.fgi_count() == 2
        functions = doc.functions()
        assert list(functions) == ["f1"]
        assert len(functions["f1"]) == 2
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"took {elapsed:.3f}s"


def test_match_rank_arithmetic():
    with criterion("match rank arithmetic ((0,0,0), (2,1,0), (2,1,1)) within 1e-9 "
                   "of the weighted-sum formula"):
        assert match_rank(OverlapCounts(0, 0, 0)) == 0.0
        expected_210 = (2 * 10 + 1 * 20 + 0 * 30) / 60
        assert abs(match_rank(OverlapCounts(2, 1, 0)) - expected_210) <= 1e-9
        expected_211 = (2 * 10 + 1 * 20 + 1 * 30) / 60
        assert abs(match_rank(OverlapCounts(2, 1, 1)) - expected_211) <= 1e-9
        assert match_rank(OverlapCounts(2, 1, 1)) > 1.0  # raw may exceed 1


def test_normalization():
    with criterion("normalization: [0.2,0.5,0.8] endpoints exact, degenerate all-1, "
                   "1000 random vectors ordered in [0,1]"):
        normalized = normalize_scores([0.2, 0.5, 0.8])
        assert normalized[0] == 0.0
        assert normalized[2] == 1.0
        # 0.2/0.5/0.8 are not exact binary doubles; the middle lands within
        # one ulp of 1/2
        assert normalized[1] == pytest.approx(0.5, abs=1e-12)
        assert normalize_scores([0.4, 0.4]) == [1.0, 1.0]
        rng = random.Random(2026)
        for _ in range(1000):
            raws = [rng.uniform(0, 3) for _ in range(rng.randint(1, 9))]
            out = normalize_scores(raws)
            assert all(0.0 <= value <= 1.0 for value in out)
            order = sorted(range(len(raws)), key=raws.__getitem__)
            for earlier, later in zip(order, order[1:]):
                assert out[earlier] <= out[later]


def test_self_maximality_and_symmetry():
    with criterion("self-maximality and count symmetry over 200 random design "
                   "pairs, zero violations"):
        rng = random.Random(7002)
        kb = FadKnowledgeBase()
        refs = [
            build_random_design(kb, rng, "patent", f"US{index:05d}")
            for index in range(25)
        ]
        violations = 0
        for _ in range(200):
            a, b = rng.choice(refs), rng.choice(refs)
            forward = compute_overlap(kb, a, b).counts
            backward = compute_overlap(kb, b, a).counts
            if forward != backward:
                violations += 1
            if match_rank(compute_overlap(kb, a, a).counts) < match_rank(forward) - 1e-12:
                violations += 1
        assert violations == 0


def test_search_oracle_equivalence():
    with criterion("search oracle equivalence on 50 random corpora (fulltext, "
                   "semantic, FGI pattern), < 30 s"):
        rng = random.Random(31337)
        vocabulary = NAMES + GEOMETRY_TYPES + ACTIONS + ["open", "close", "f1", "f2", "zzz"]
        started = time.perf_counter()
        for round_index in range(50):
            kb = build_random_corpus(rng, designs=rng.randint(3, 5))
            assert kb.store.node_count() <= 50

            keywords = rng.sample(vocabulary, rng.randint(1, 10))
            hits = fulltext_search(kb, keywords)
            assert {h.unique_id: h.match_rank for h in hits} == pytest.approx(
                bf_fulltext(kb.store, keywords)
            ), f"fulltext divergence in round {round_index}"

            fields = {}
            if rng.random() < 0.8:
                fields["geometry"] = rng.choice(GEOMETRY_TYPES + NAMES)
            if rng.random() < 0.5:
                fields["action"] = rng.choice(ACTIONS)
            hits = semantic_search(kb, fields)
            assert {h.unique_id: h.match_rank for h in hits} == pytest.approx(
                bf_semantic(kb.store, fields)
            ), f"semantic divergence in round {round_index}"

            type1 = rng.choice([None, "le", "co", "spout"])
            type2 = rng.choice([None, "er", "lid"])
            action = rng.choice([None, rng.choice(ACTIONS)])
            function_id = rng.choice([None, "f1", "f2"])
            got = {
                h.unique_id: h.match_count
                for h in fgi_pattern_search(kb, type1, type2, action, function_id)
            }
            assert got == bf_fgi_search(kb.store, type1, type2, action, function_id), (
                f"fgi divergence in round {round_index}"
            )
        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_pattern_match_oracle():
    with criterion("match_pattern equals nested-loop enumeration on 100 random "
                   "graphs, zero discrepancies"):
        from test_pattern import random_spec, random_store

        rng = random.Random(424242)
        discrepancies = 0
        for _ in range(100):
            store = random_store(rng)
            spec = random_spec(rng)
            if canonical_rows(store.match_pattern(spec)) != canonical_rows(
                enumerate_pattern(store, spec)
            ):
                discrepancies += 1
        assert discrepancies == 0


def test_patql_listing_fidelity():
    with criterion("the five retrieval listings parse and execute like the "
                   "programmatic patterns; count(r1) = 2"):
        kb = FadKnowledgeBase()
        build_corkscrew(kb)
        build_corkscrew(kb, kind="patent", unique_id="US0640004",
                        title="Cork extracting apparatus")
        for index, listing in enumerate(FIVE_LISTINGS):
            ast = parse_query(listing)
            rows = execute_query(kb.store, ast)
            expected = kb.store.match_pattern(programmatic_equivalent(index))
            if index == 3:  # the count listing groups the pattern variables
                plain = [
                    {k: v for k, v in row.items() if k != "MatchRank2"} for row in rows
                ]
                assert all(row["MatchRank2"] == 1 for row in rows)
                assert canonical_rows(plain) == canonical_rows(expected)
            else:
                assert canonical_rows(rows) == canonical_rows(expected)
        counted = execute_query(
            kb.store,
            'match (g1)-[r1:hasFGI]->(g2) where "f1" in r1.Function_IDs '
            "return count(r1) as MatchRank2",
        )
        # both the design and its patent twin carry two f1 steps
        assert counted == [{"MatchRank2": 4}]
        single = FadKnowledgeBase()
        build_corkscrew(single)
        counted = execute_query(
            single.store,
            'match (g1)-[r1:hasFGI]->(g2) where "f1" in r1.Function_IDs '
            "return count(r1) as MatchRank2",
        )
        assert counted == [{"MatchRank2": 2}]


def test_constraint_enforcement():
    with criterion("duplicate Patent_Number rejected and the store left unchanged"):
        kb = FadKnowledgeBase()
        kb.store.create_node(["patent"], {"Patent_Number": "US123", "title": "First"})
        before_nodes = [(n.id, n.labels, n.props) for n in kb.store.all_nodes()]
        before_edges = [(e.id, e.type, e.from_id, e.to_id, e.props)
                        for e in kb.store.all_edges()]
        with pytest.raises(ConstraintViolation):
            kb.store.create_node(["patent"], {"Patent_Number": "US123"})
        assert [(n.id, n.labels, n.props) for n in kb.store.all_nodes()] == before_nodes
        assert [
            (e.id, e.type, e.from_id, e.to_id, e.props) for e in kb.store.all_edges()
        ] == before_edges


def test_persistence_and_import_round_trips(tmp_path):
    with criterion("snapshot and CSV export/import reproduce the model "
                   "(match_pattern row-set equality)"):
        kb = FadKnowledgeBase()
        design = build_corkscrew(kb)
        product = kb.find_product(design, "P1")
        kb.add_claim(product, "c1", "extracts the cork with minimal force",
                     independent=True)
        kb.store.set_node_props(design.node_id, {"domain": "packaging"})
        spec = full_retrieval_spec("emergDesign", "filename", "corkscrew.sldprt")
        original_rows = kb.store.match_pattern(spec)

        path = tmp_path / "kb.snapshot"
        kb.store.snapshot_save(path)
        reloaded = GraphStore.snapshot_load(path)
        assert canonical_rows(reloaded.match_pattern(spec)) == canonical_rows(
            original_rows
        )

        sheets = export_annotation_csv(kb, "corkscrew.sldprt")
        rebuilt = FadKnowledgeBase()
        report = import_annotation_csv(rebuilt, sheets)
        assert report.ok, report.errors
        # node ids differ in a fresh store; rows must agree structurally
        assert structural_rows(rebuilt.store.match_pattern(spec)) == structural_rows(
            original_rows
        )


def test_dot_validity():
    with criterion("corkscrew DOT parses under the DOT grammar with exactly 3 "
                   "node and 2 edge statements"):
        kb = FadKnowledgeBase()
        build_corkscrew(kb)
        dot = to_dot(kb, "corkscrew.sldprt")
        parsed = check_dot(dot)
        assert parsed["node_stmts"] == 3
        assert parsed["edge_stmts"] == 2
        if shutil.which("dot"):
            subprocess.run(["dot", "-Tcanon"], input=dot.encode(), check=True,
                           capture_output=True)


def test_scale_smoke():
    with criterion("1,000-design corpus: score_corpus < 5 s and a 4-level "
                   "pattern query < 1 s"):
        rng = random.Random(555)
        kb = FadKnowledgeBase()
        probe = None
        for index in range(1000):
            design = kb.upsert_design("patent", f"US{index:06d}", f"Design {index}")
            product = kb.add_product(design, "P1", f"product-{index}")
            ids = [f"g{i}" for i in range(1, 21)]
            for gid in ids:
                kb.add_geometry(product, gid, f"part-{gid}",
                                rng.choice(GEOMETRY_TYPES))
            for step in range(19):
                kb.add_fgi(product, ids[step], ids[step + 1], rng.choice(ACTIONS),
                           [f"f{1 + step % 3}"])
            if index == 0:
                probe = design
        emerging = kb.upsert_design("emergDesign", "probe.sldprt", "Probe")
        product = kb.add_product(emerging, "P1", "probe")
        ids = [f"g{i}" for i in range(1, 21)]
        for gid in ids:
            kb.add_geometry(product, gid, f"part-{gid}", rng.choice(GEOMETRY_TYPES))
        for step in range(19):
            kb.add_fgi(product, ids[step], ids[step + 1], rng.choice(ACTIONS),
                       [f"f{1 + step % 3}"])

        started = time.perf_counter()
        results = score_corpus(kb, "probe.sldprt")
        scoring_elapsed = time.perf_counter() - started
        assert len(results) == 1000
        assert scoring_elapsed < 5.0, f"score_corpus took {scoring_elapsed:.2f}s"

        spec = PatternSpec(
            [
                PatternSegment(NodePattern("p", "patent",
                                           {"Patent_Number": probe.unique_id}),
                               EdgePattern(None, "hasProduct")),
                PatternSegment(NodePattern("pr", "product"),
                               EdgePattern(None, "hasGeometry")),
                PatternSegment(NodePattern("g1", "geometry"),
                               EdgePattern("fgi", "hasFGI")),
                PatternSegment(NodePattern("g2", "geometry")),
            ],
            returns=["p", "pr", "g1", "fgi", "g2"],
        )
        started = time.perf_counter()
        rows = kb.store.match_pattern(spec)
        query_elapsed = time.perf_counter() - started
        assert len(rows) == 19
        assert query_elapsed < 1.0, f"4-level query took {query_elapsed:.3f}s"

        # the same four-level walk unpinned, across the whole corpus
        unpinned = PatternSpec(
            [
                PatternSegment(NodePattern("p", "patent"),
                               EdgePattern(None, "hasProduct")),
                PatternSegment(NodePattern("pr", "product"),
                               EdgePattern(None, "hasGeometry")),
                PatternSegment(NodePattern("g1", "geometry"),
                               EdgePattern("fgi", "hasFGI")),
                PatternSegment(NodePattern("g2", "geometry")),
            ],
            returns=["p", "fgi"],
        )
        started = time.perf_counter()
        rows = kb.store.match_pattern(unpinned)
        unpinned_elapsed = time.perf_counter() - started
        assert len(rows) == 19000
        assert unpinned_elapsed < 1.0, f"unpinned 4-level query took {unpinned_elapsed:.3f}s"
