"""Shared fixtures: the corkscrew example, corpora, random model builders."""

from __future__ import annotations

import random

import pytest

from patgraph.lexicon import Lexicon, OntologyTerm
from patgraph.model import FadKnowledgeBase

GEOMETRY_TYPES = ["lever", "lid", "container", "screw", "handle", "spout", "polygon"]
ACTIONS = ["press", "separates", "lifts", "turns", "holds", "pours"]
NAMES = ["latch", "cover", "can body", "worm", "grip", "neck", "rim", "base"]


def build_corkscrew(kb: FadKnowledgeBase, kind="emergDesign", unique_id="corkscrew.sldprt",
                    title="Corkscrew"):
    """The two-step can-opening example: latch presses cover, cover separates body."""
    design = kb.upsert_design(kind, unique_id, title)
    product = kb.add_product(design, "P1", "corkscrew")
    kb.add_geometry(product, "g1", "latch", "lever")
    kb.add_geometry(product, "g2", "cover", "lid")
    kb.add_geometry(product, "g3", "can body", "container")
    kb.add_fgi(product, "g1", "g2", "press", ["f1"], "open")
    kb.add_fgi(product, "g2", "g3", "separates", ["f1"], "open")
    return design


@pytest.fixture
def kb() -> FadKnowledgeBase:
    return FadKnowledgeBase()


@pytest.fixture
def corkscrew_kb() -> FadKnowledgeBase:
    kb = FadKnowledgeBase()
    build_corkscrew(kb)
    return kb


@pytest.fixture
def corpus_kb() -> FadKnowledgeBase:
    """Corkscrew design plus a patent twin and an unrelated patent."""
    kb = FadKnowledgeBase(lexicon=sample_lexicon())
    build_corkscrew(kb)
    build_corkscrew(kb, kind="patent", unique_id="US0640004", title="Cork extracting apparatus")
    other = kb.upsert_design("patent", "US0000001", "Pouring spout")
    product = kb.add_product(other, "P1", "spout")
    kb.add_geometry(product, "s1", "neck", "spout")
    kb.add_geometry(product, "s2", "base", "container")
    kb.add_fgi(product, "s1", "s2", "pours", ["f1"])
    return kb


def sample_lexicon() -> Lexicon:
    return Lexicon(
        [
            OntologyTerm("geometry-type", "lever", domain="mechanics", usage_count=4),
            OntologyTerm("geometry-type", "lid", domain="packaging", synonyms=("cap",)),
            OntologyTerm("geometry-type", "container", domain="packaging"),
            OntologyTerm("geometry-type", "cuboid", synonyms=("block",)),
            OntologyTerm("geometry-type", "square", parent="polygon"),
            OntologyTerm("geometry-type", "polygon", parent="shape"),
            OntologyTerm("geometry-type", "shape"),
            OntologyTerm("action", "press", domain="mechanics", usage_count=4,
                         synonyms=("push",)),
            OntologyTerm("action", "separates", synonyms=("splits",)),
            OntologyTerm("function-verb", "open", synonyms=("release",)),
        ]
    )


def build_random_design(kb: FadKnowledgeBase, rng: random.Random, kind: str,
                        unique_id: str, geometries: int | None = None):
    """A random but well-formed design for oracle comparisons."""
    design = kb.upsert_design(
        kind, unique_id, rng.choice(["Opener", "Closure", "Dispenser", ""])
    )
    product = kb.add_product(design, "P1", rng.choice(NAMES))
    count = geometries if geometries is not None else rng.randint(1, 5)
    ids = [f"g{i}" for i in range(1, count + 1)]
    for gid in ids:
        kb.add_geometry(
            product,
            gid,
            rng.choice(NAMES),
            rng.choice(GEOMETRY_TYPES),
            abstraction_labels=(["polygon"] if rng.random() < 0.2 else []),
        )
    if rng.random() < 0.5:
        kb.add_claim(product, "c1", rng.choice(["extracts cork", "seals can", "pours liquid"]),
                     independent=rng.random() < 0.5)
    fgi_count = rng.randint(0, max(0, count * 2 - 1)) if count > 1 else 0
    for _ in range(fgi_count):
        source, target = rng.choice(ids), rng.choice(ids)
        function_ids = sorted({f"f{rng.randint(1, 3)}" for _ in range(rng.randint(1, 2))})
        kb.add_fgi(
            product,
            source,
            target,
            rng.choice(ACTIONS),
            function_ids,
            rng.choice([None, "open", "close", "dispense"]),
        )
    return design


def build_random_corpus(rng: random.Random, designs: int = 5) -> FadKnowledgeBase:
    kb = FadKnowledgeBase(lexicon=sample_lexicon())
    for index in range(designs):
        kind = "patent" if rng.random() < 0.6 else "emergDesign"
        unique_id = f"US{index:07d}" if kind == "patent" else f"design{index}.sldprt"
        build_random_design(kb, rng, kind, unique_id)
    return kb
