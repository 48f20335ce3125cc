"""Pattern matching: fixture examples plus oracle equivalence on random graphs."""

from __future__ import annotations

import random

import pytest

from patgraph.errors import BadRegex, UnknownVariable
from patgraph.model import FadKnowledgeBase
from patgraph.pattern import (
    ABSENT,
    EdgePattern,
    NodePattern,
    PatternSegment,
    PatternSpec,
    PropEquals,
    PropInValues,
    PropRegex,
    ValueInListProp,
)
from patgraph.store import GraphStore

from conftest import build_corkscrew
from oracles import canonical_rows, enumerate_pattern


def seg(node, edge=None, optional=False):
    return PatternSegment(node, edge, optional)


def test_empty_graph_yields_zero_rows():
    store = GraphStore()
    spec = PatternSpec(
        [
            seg(NodePattern("p", "patent", {"Patent_Number": "X"}),
                EdgePattern(None, "hasProduct")),
            seg(NodePattern("pr")),
        ]
    )
    assert store.match_pattern(spec) == []


def test_corkscrew_fgi_pattern_two_rows():
    kb = FadKnowledgeBase()
    build_corkscrew(kb)
    spec = PatternSpec(
        [
            seg(NodePattern("g1", "geometry"), EdgePattern("fr", "hasFGI")),
            seg(NodePattern("g2", "geometry")),
        ]
    )
    rows = kb.store.match_pattern(spec)
    assert len(rows) == 2
    actions = sorted(row["fr"].props["action"] for row in rows)
    assert actions == ["press", "separates"]


def test_optional_clause_binds_absent():
    store = GraphStore()
    store.create_node(["patent"], {"Patent_Number": "X"})
    spec = PatternSpec(
        [
            seg(NodePattern("p", "patent")),
            seg(NodePattern("p"), EdgePattern(None, "hasProduct"), optional=True),
            seg(NodePattern("pr", "product"), optional=True),
        ]
    )
    rows = store.match_pattern(spec)
    assert len(rows) == 1
    assert rows[0]["pr"] is ABSENT


def test_full_fad_retrieval_shape_on_corkscrew():
    kb = FadKnowledgeBase()
    build_corkscrew(kb)
    spec = PatternSpec(
        [
            seg(NodePattern("p", "emergDesign", {"filename": "corkscrew.sldprt"})),
            seg(NodePattern("p"), EdgePattern(None, "hasProduct"), optional=True),
            seg(NodePattern("pr", "product"), optional=True),
            seg(NodePattern("pr"), EdgePattern(None, "hasClaim"), optional=True),
            seg(NodePattern("c"), optional=True),
            seg(NodePattern("pr"), EdgePattern(None, "hasGeometry"), optional=True),
            seg(NodePattern("g1"), optional=True),
            seg(NodePattern("g1"), EdgePattern("fr", "hasFGI"), optional=True),
            seg(NodePattern("g2"), optional=True),
        ],
        returns=["p", "pr", "c", "g1", "fr", "g2"],
    )
    rows = kb.store.match_pattern(spec)
    # no claims: c is absent everywhere; one geometry (g3) has no outgoing FGI
    assert all(row["c"] is ABSENT for row in rows)
    bound = [row for row in rows if row["fr"] is not ABSENT]
    assert len(bound) == 2


def test_predicates_value_in_list_and_regex():
    kb = FadKnowledgeBase()
    build_corkscrew(kb)
    base = [
        seg(NodePattern("g1", "geometry"), EdgePattern("r1", "hasFGI")),
        seg(NodePattern("g2", "geometry")),
    ]
    in_list = PatternSpec(list(base), [ValueInListProp("f1", "r1", "Function_IDs")])
    assert len(kb.store.match_pattern(in_list)) == 2
    regex = PatternSpec(list(base), [PropRegex("g1", "PatMine_type", "lev")])
    assert len(kb.store.match_pattern(regex)) == 1
    in_values = PatternSpec(list(base), [PropInValues("r1", "action", ("press", "lifts"))])
    assert len(kb.store.match_pattern(in_values)) == 1
    equals = PatternSpec(list(base), [PropEquals("r1", "action", "separates")])
    assert len(kb.store.match_pattern(equals)) == 1


def test_unknown_variable_in_predicate():
    store = GraphStore()
    store.create_node(["x"], {})
    spec = PatternSpec([seg(NodePattern("a", "x"))], [PropEquals("zz", "k", "v")])
    with pytest.raises(UnknownVariable):
        store.match_pattern(spec)


def test_unknown_variable_in_returns():
    store = GraphStore()
    store.create_node(["x"], {})
    spec = PatternSpec([seg(NodePattern("a", "x"))], returns=["b"])
    with pytest.raises(UnknownVariable):
        store.match_pattern(spec)


def test_bad_regex_rejected_eagerly():
    store = GraphStore()
    store.create_node(["x"], {})
    spec = PatternSpec([seg(NodePattern("a", "x"))], [PropRegex("a", "k", "([")])
    with pytest.raises(BadRegex):
        store.match_pattern(spec)


def test_all_optional_pattern_rejected():
    store = GraphStore()
    spec = PatternSpec([seg(NodePattern("a"), optional=True)])
    with pytest.raises(ValueError):
        store.match_pattern(spec)


def test_parallel_edges_multiply_rows():
    store = GraphStore()
    a = store.create_node(["x"], {"name": "a"})
    b = store.create_node(["x"], {"name": "b"})
    store.create_edge(a, b, "rel")
    store.create_edge(a, b, "rel")
    spec = PatternSpec(
        [seg(NodePattern("s"), EdgePattern(None, "rel")), seg(NodePattern("t"))]
    )
    assert len(store.match_pattern(spec)) == 2


def test_self_loop_pattern():
    store = GraphStore()
    a = store.create_node(["x"], {})
    store.create_edge(a, a, "rel")
    spec = PatternSpec(
        [seg(NodePattern("n"), EdgePattern("e", "rel")), seg(NodePattern("n"))]
    )
    assert len(store.match_pattern(spec)) == 1


# --- random-graph oracle equivalence ---------------------------------------------


LABELS = ["alpha", "beta", "gamma"]
EDGE_TYPES = ["rel", "link"]
PROP_VALUES = ["a", "b", "c"]


def random_store(rng: random.Random, max_nodes=8, max_edges=12) -> GraphStore:
    store = GraphStore()
    node_ids = []
    for _ in range(rng.randint(1, max_nodes)):
        labels = rng.sample(LABELS, rng.randint(1, 2))
        props = {}
        if rng.random() < 0.8:
            props["p"] = rng.choice(PROP_VALUES)
        if rng.random() < 0.3:
            props["tags"] = sorted(rng.sample(["t1", "t2", "t3"], rng.randint(1, 2)))
        node_ids.append(store.create_node(labels, props))
    for _ in range(rng.randint(0, max_edges)):
        props = {"w": rng.choice(PROP_VALUES)} if rng.random() < 0.5 else {}
        store.create_edge(rng.choice(node_ids), rng.choice(node_ids),
                          rng.choice(EDGE_TYPES), props)
    return store


def random_spec(rng: random.Random) -> PatternSpec:
    segments = []
    var_counter = 0

    def new_var():
        nonlocal var_counter
        var_counter += 1
        return f"v{var_counter}"

    declared = []

    def node_pattern():
        var = None
        if rng.random() < 0.8:
            var = new_var()
            declared.append(var)
        label = rng.choice(LABELS) if rng.random() < 0.6 else None
        props = {"p": rng.choice(PROP_VALUES)} if rng.random() < 0.3 else {}
        return NodePattern(var, label, props)

    clause_count = rng.randint(1, 2)
    for clause_index in range(clause_count):
        optional = clause_index > 0 and rng.random() < 0.4
        length = rng.randint(1, 3)
        for position in range(length):
            node = node_pattern()
            if position < length - 1:
                edge_var = new_var() if rng.random() < 0.5 else None
                if edge_var:
                    declared.append(edge_var)
                edge = EdgePattern(
                    edge_var,
                    rng.choice(EDGE_TYPES) if rng.random() < 0.6 else None,
                    {"w": rng.choice(PROP_VALUES)} if rng.random() < 0.2 else {},
                )
            else:
                edge = None
            segments.append(PatternSegment(node, edge, optional))

    predicates = []
    node_vars = [s.node.var for s in segments if s.node.var]
    if node_vars and rng.random() < 0.5:
        var = rng.choice(node_vars)
        kind = rng.random()
        if kind < 0.4:
            predicates.append(PropEquals(var, "p", rng.choice(PROP_VALUES)))
        elif kind < 0.7:
            predicates.append(PropRegex(var, "p", "[ab]"))
        else:
            predicates.append(ValueInListProp(rng.choice(["t1", "t2"]), var, "tags"))
    return PatternSpec(segments, predicates)


def test_match_pattern_equals_nested_loop_enumeration_on_random_graphs():
    rng = random.Random(2024)
    for round_index in range(60):
        store = random_store(rng)
        spec = random_spec(rng)
        engine = store.match_pattern(spec)
        reference = enumerate_pattern(store, spec)
        assert canonical_rows(engine) == canonical_rows(reference), (
            f"divergence at round {round_index}: spec={spec!r}"
        )
