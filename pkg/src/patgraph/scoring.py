"""Similarity scoring between an emerging design and the patent corpus.

Overlap is counted at three levels: matching geometry ontology types,
matching directed FGI triples (source type, action, target type), and
matching functions (groups of FGI steps realizing one function id, equal
when their step-triple multisets are equal). All three are multiset
intersections — two levers against two levers count 2.

The raw match rank is the weighted sum (g*10 + fgi*20 + fn*30) / 60, then
min-max normalized across the whole corpus.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyCorpus
from .lexicon import Lexicon
from .model import FadDocument, FadKnowledgeBase

KIND_DEFAULT_CORPUS = "patent"


@dataclass(frozen=True)
class ScoringWeights:
    geometry: float = 10.0
    fgi: float = 20.0
    function: float = 30.0
    divisor: float = 60.0

    def __post_init__(self):
        if self.divisor <= 0:
            raise ValueError("divisor must be positive")


DEFAULT_WEIGHTS = ScoringWeights()


@dataclass(frozen=True)
class OverlapCounts:
    geometries: int = 0
    fgis: int = 0
    functions: int = 0


@dataclass(frozen=True)
class MatchScore:
    raw: float
    normalized: float


@dataclass(frozen=True)
class GeometryWitness:
    product_id: str
    geometric_id: str
    patmine_type: str


@dataclass(frozen=True)
class FgiWitness:
    product_id: str
    edge_id: int
    from_geometric_id: str
    to_geometric_id: str
    source_type: str
    action: str
    target_type: str


@dataclass
class OverlapReport:
    """Matched element pairs between two designs, sides in (a, b) order."""

    design_a: str
    design_b: str
    geometry_pairs: list[tuple[GeometryWitness, GeometryWitness]] = field(default_factory=list)
    fgi_pairs: list[tuple[FgiWitness, FgiWitness]] = field(default_factory=list)
    function_pairs: list[tuple[str, str]] = field(default_factory=list)

    @property
    def counts(self) -> OverlapCounts:
        return OverlapCounts(
            geometries=len(self.geometry_pairs),
            fgis=len(self.fgi_pairs),
            functions=len(self.function_pairs),
        )

    def matched_elements_of(self, design_id: str) -> tuple[set[tuple[str, str]], set[int]]:
        """(product, geometric id) pairs and FGI edge ids on one side."""
        if design_id == self.design_a:
            geometries = {(g.product_id, g.geometric_id) for g, _ in self.geometry_pairs}
            edges = {f.edge_id for f, _ in self.fgi_pairs}
        elif design_id == self.design_b:
            geometries = {(g.product_id, g.geometric_id) for _, g in self.geometry_pairs}
            edges = {f.edge_id for _, f in self.fgi_pairs}
        else:
            raise ValueError(f"design {design_id!r} is not a side of this report")
        return geometries, edges


def compute_overlap(
    kb: FadKnowledgeBase,
    design_a: "str | object",
    design_b: "str | object",
    action_synonyms: bool = False,
) -> OverlapReport:
    """Three-level overlap between two designs with witness pairs.

    ``action_synonyms`` folds actions to a lexicon-canonical representative
    before comparing (off by default for determinism).
    """
    doc_a = kb.get_fad(design_a)
    doc_b = kb.get_fad(design_b)
    normalize = _action_normalizer(kb.lexicon) if action_synonyms else lambda a: a.casefold()
    report = OverlapReport(doc_a.unique_id, doc_b.unique_id)

    geoms_a = _geometry_witnesses(doc_a)
    geoms_b = _geometry_witnesses(doc_b)
    for type_name, count in (
        Counter(g.patmine_type for g in geoms_a) & Counter(g.patmine_type for g in geoms_b)
    ).items():
        side_a = [g for g in geoms_a if g.patmine_type == type_name]
        side_b = [g for g in geoms_b if g.patmine_type == type_name]
        report.geometry_pairs.extend(zip(side_a[:count], side_b[:count]))
    report.geometry_pairs.sort(key=lambda p: (p[0].product_id, p[0].geometric_id))

    fgis_a = _fgi_witnesses(doc_a, normalize)
    fgis_b = _fgi_witnesses(doc_b, normalize)
    triple = lambda f: (f.source_type, f.action, f.target_type)
    for triple_key, count in (
        Counter(map(triple, fgis_a)) & Counter(map(triple, fgis_b))
    ).items():
        side_a = [f for f in fgis_a if triple(f) == triple_key]
        side_b = [f for f in fgis_b if triple(f) == triple_key]
        report.fgi_pairs.extend(zip(side_a[:count], side_b[:count]))
    report.fgi_pairs.sort(key=lambda p: (p[0].product_id, p[0].edge_id))

    functions_a = _function_signatures(doc_a, normalize)
    functions_b = _function_signatures(doc_b, normalize)
    by_signature_a: dict[tuple, list[str]] = {}
    for fid, signature in functions_a.items():
        by_signature_a.setdefault(signature, []).append(fid)
    by_signature_b: dict[tuple, list[str]] = {}
    for fid, signature in functions_b.items():
        by_signature_b.setdefault(signature, []).append(fid)
    for signature, ids_a in by_signature_a.items():
        ids_b = by_signature_b.get(signature)
        if not ids_b:
            continue
        report.function_pairs.extend(zip(sorted(ids_a), sorted(ids_b)))
    report.function_pairs.sort()
    return report


def match_rank(counts: OverlapCounts, weights: ScoringWeights = DEFAULT_WEIGHTS) -> float:
    """Raw match rank: weighted overlap counts over the divisor (may exceed 1)."""
    return (
        counts.geometries * weights.geometry
        + counts.fgis * weights.fgi
        + counts.functions * weights.function
    ) / weights.divisor


def normalize_scores(raw_scores: Sequence[float]) -> list[float]:
    """Min-max normalize into [0, 1]; order preserving.

    A degenerate corpus (max == min) maps everything to 1.0 when there is
    any overlap at all, and to 0.0 when every raw score is zero.
    """
    if len(raw_scores) == 0:
        raise EmptyCorpus("cannot normalize zero scores")
    low = min(raw_scores)
    high = max(raw_scores)
    if high == low:
        return [1.0 if high > 0 else 0.0] * len(raw_scores)
    span = high - low
    return [(score - low) / span for score in raw_scores]


@dataclass
class CorpusScore:
    unique_id: str
    kind: str
    score: MatchScore
    overlap: OverlapReport

    @property
    def counts(self) -> OverlapCounts:
        return self.overlap.counts


def score_corpus(
    kb: FadKnowledgeBase,
    design: "str | object",
    kind: str = KIND_DEFAULT_CORPUS,
    weights: ScoringWeights = DEFAULT_WEIGHTS,
    action_synonyms: bool = False,
) -> list[CorpusScore]:
    """Score a design against every corpus design of ``kind`` and rank them.

    The scored design itself is excluded from the corpus. Sorting is by
    descending normalized score, ties by ascending unique id.
    """
    ref = kb.design_ref(design)
    corpus = [
        other
        for other in kb.list_design_refs(kind)
        if (other.kind, other.unique_id) != (ref.kind, ref.unique_id)
    ]
    if not corpus:
        raise EmptyCorpus(f"no {kind} designs to score against")
    reports = [compute_overlap(kb, ref, other, action_synonyms) for other in corpus]
    raws = [match_rank(report.counts, weights) for report in reports]
    normals = normalize_scores(raws)
    scored = [
        CorpusScore(other.unique_id, other.kind, MatchScore(raw, normal), report)
        for other, report, raw, normal in zip(corpus, reports, raws, normals)
    ]
    scored.sort(key=lambda s: (-s.score.normalized, s.unique_id))
    return scored


def scores_to_csv(results: Sequence[CorpusScore]) -> str:
    """Render a ranking as the report CSV."""
    lines = ["patent_id,raw,normalized,geometry_count,fgi_count,function_count"]
    for result in results:
        counts = result.counts
        lines.append(
            f"{result.unique_id},{result.score.raw:.6f},{result.score.normalized:.6f},"
            f"{counts.geometries},{counts.fgis},{counts.functions}"
        )
    return "\n".join(lines) + "\n"


# --- internals ------------------------------------------------------------------


def _geometry_witnesses(doc: FadDocument) -> list[GeometryWitness]:
    witnesses = [
        GeometryWitness(p.product_id, g.geometric_id, g.patmine_type)
        for p in doc.products
        for g in p.geometries
    ]
    witnesses.sort(key=lambda w: (w.patmine_type, w.product_id, w.geometric_id))
    return witnesses


def _fgi_witnesses(doc: FadDocument, normalize) -> list[FgiWitness]:
    witnesses = []
    for product in doc.products:
        types = {g.geometric_id: g.patmine_type for g in product.geometries}
        for fgi in product.fgis:
            witnesses.append(
                FgiWitness(
                    product_id=product.product_id,
                    edge_id=fgi.edge_id,
                    from_geometric_id=fgi.from_geometric_id,
                    to_geometric_id=fgi.to_geometric_id,
                    source_type=types.get(fgi.from_geometric_id, ""),
                    action=normalize(fgi.action),
                    target_type=types.get(fgi.to_geometric_id, ""),
                )
            )
    witnesses.sort(
        key=lambda w: (w.source_type, w.action, w.target_type, w.product_id, w.edge_id)
    )
    return witnesses


def _function_signatures(doc: FadDocument, normalize) -> dict[str, tuple]:
    """Function id -> canonical multiset of its step triples."""
    steps: dict[str, list[tuple]] = {}
    for product in doc.products:
        types = {g.geometric_id: g.patmine_type for g in product.geometries}
        for fgi in product.fgis:
            triple = (
                types.get(fgi.from_geometric_id, ""),
                normalize(fgi.action),
                types.get(fgi.to_geometric_id, ""),
            )
            for fid in fgi.function_ids:
                steps.setdefault(fid, []).append(triple)
    return {fid: tuple(sorted(triples)) for fid, triples in steps.items()}


def _action_normalizer(lexicon: Lexicon):
    """Fold an action to a canonical representative of its synonym group."""
    canonical: dict[str, str] = {}
    for term in lexicon.terms("action"):
        group = sorted({term.term.casefold(), *(s.casefold() for s in term.synonyms)})
        representative = group[0]
        for member in group:
            canonical.setdefault(member, representative)

    def normalize(action: str) -> str:
        folded = action.casefold()
        return canonical.get(folded, folded)

    return normalize
