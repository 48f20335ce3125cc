"""The three search modes: full-text, semantic field search, FGI patterns.

Keyword matching is case-insensitive exact-token equality against property
values (list values match on any element). Hits are ranked by a weighted
sum over unique (element, property, keyword) matches: function-level
matches weigh 3.0, actions 2.0, everything else 1.0; a match reached via
a lexicon synonym is multiplied by 0.5. Ties break on ascending design id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .lexicon import Lexicon
from .model import FadDocument, FadKnowledgeBase
from .pattern import compile_regex

SEMANTIC_FIELDS = ("title", "product", "function", "action", "geometry")


@dataclass(frozen=True)
class SearchWeights:
    """Keyword weights; the strict ordering function > action > rest is the contract."""

    function: float = 3.0
    action: float = 2.0
    default: float = 1.0
    synonym_multiplier: float = 0.5

    def for_key(self, property_key: str) -> float:
        if property_key in ("Function_Name", "Function_IDs"):
            return self.function
        if property_key == "action":
            return self.action
        return self.default


DEFAULT_WEIGHTS = SearchWeights()


@dataclass(frozen=True)
class ExpandedKeyword:
    keyword: str
    source: str
    via_synonym: bool


@dataclass(frozen=True)
class MatchedItem:
    """One matched (element, property, keyword) occurrence inside a design."""

    element_kind: str  # design | product | geometry | fgi
    element_id: int  # node id, or edge id for fgi
    property_key: str
    keyword: str
    source_keyword: str
    via_synonym: bool
    weight: float


@dataclass
class RankedHit:
    unique_id: str
    kind: str
    match_rank: float
    items: list[MatchedItem] = field(default_factory=list)


@dataclass
class FgiMatch:
    product_id: str
    edge_id: int
    from_geometric_id: str
    from_type: str
    to_geometric_id: str
    to_type: str
    action: str
    function_ids: list[str]


@dataclass
class FgiPatternHit:
    unique_id: str
    kind: str
    match_count: int  # the per-design MatchRank2
    fgis: list[FgiMatch] = field(default_factory=list)


def expand_query_synonyms(
    lexicon: Lexicon, keywords: Sequence[str]
) -> list[ExpandedKeyword]:
    """Union of the keywords and their one-hop lexicon synonyms.

    Originals come first and win: a synonym that equals another query
    keyword stays an original. Expansion is never chained through a
    synonym's own synonyms.
    """
    expanded: dict[str, ExpandedKeyword] = {}
    for keyword in keywords:
        token = keyword.casefold()
        if token and token not in expanded:
            expanded[token] = ExpandedKeyword(keyword, keyword, False)
    for keyword in keywords:
        for synonym in lexicon.synonyms_of(keyword):
            token = synonym.casefold()
            if token and token not in expanded:
                expanded[token] = ExpandedKeyword(synonym, keyword, True)
    return list(expanded.values())


def weighted_keyword_rank(
    items: Iterable[MatchedItem], weights: SearchWeights = DEFAULT_WEIGHTS
) -> float:
    """The matchRank of a hit: sum of the items' weights."""
    return sum(
        weights.for_key(item.property_key)
        * (weights.synonym_multiplier if item.via_synonym else 1.0)
        for item in items
    )


def fulltext_search(
    kb: FadKnowledgeBase,
    keywords: Sequence[str],
    expand_synonyms: bool = False,
    kind: str | None = None,
    weights: SearchWeights = DEFAULT_WEIGHTS,
) -> list[RankedHit]:
    """Scan every design's FAD elements for keyword-equal property values.

    Elements scanned: the design node, products, geometries, and FGI edges
    (claim text is not part of the searchable surface). Zero-match designs
    are omitted; results sort by descending matchRank then ascending id.
    """
    if not keywords:
        raise ValueError("fulltext_search needs at least one keyword")
    tokens = (
        expand_query_synonyms(kb.lexicon, keywords)
        if expand_synonyms
        else [ExpandedKeyword(k, k, False) for k in keywords if k]
    )
    hits = []
    for ref in kb.list_design_refs(kind):
        doc = kb.get_fad(ref)
        items = _match_document(doc, tokens, weights)
        if items:
            hits.append(
                RankedHit(ref.unique_id, ref.kind, weighted_keyword_rank(items, weights), items)
            )
    hits.sort(key=lambda h: (-h.match_rank, h.unique_id))
    return hits


def semantic_search(
    kb: FadKnowledgeBase,
    fields: Mapping[str, str] | None = None,
    kind: str | None = None,
    weights: SearchWeights = DEFAULT_WEIGHTS,
) -> list[RankedHit]:
    """Field-targeted search; a design matches only if every given field matches.

    Field targets: title -> design title; product -> product name;
    function -> FGI Function_Name or a listed function id; action -> FGI
    action; geometry -> geometry name or ontology type. An empty request
    returns every design.
    """
    fields = {k: v for k, v in (fields or {}).items() if v}
    unknown = [k for k in fields if k not in SEMANTIC_FIELDS]
    if unknown:
        raise ValueError(
            f"unknown semantic field(s) {', '.join(sorted(unknown))}; "
            f"expected {', '.join(SEMANTIC_FIELDS)}"
        )
    hits = []
    for ref in kb.list_design_refs(kind):
        doc = kb.get_fad(ref)
        all_items: list[MatchedItem] = []
        matched_all = True
        for field_name, value in fields.items():
            items = _match_semantic_field(doc, field_name, value, weights)
            if not items:
                matched_all = False
                break
            all_items.extend(items)
        if matched_all:
            items = _dedup_items(all_items)
            hits.append(
                RankedHit(ref.unique_id, ref.kind, weighted_keyword_rank(items, weights), items)
            )
    hits.sort(key=lambda h: (-h.match_rank, h.unique_id))
    return hits


def fgi_pattern_search(
    kb: FadKnowledgeBase,
    type1: str | None = None,
    type2: str | None = None,
    action: str | None = None,
    function_id: str | None = None,
    kind: str | None = None,
) -> list[FgiPatternHit]:
    """Find FGIs whose endpoint ontology types match the given patterns.

    ``type1``/``type2`` are unanchored, case-insensitive regexes (plain
    text behaves as substring search); ``action`` compares case-insensitively;
    ``function_id`` must be listed verbatim. The per-design match count is
    the MatchRank2 of the level-two semantic query.
    """
    source_re = compile_regex(type1, case_insensitive=True) if type1 else None
    target_re = compile_regex(type2, case_insensitive=True) if type2 else None
    wanted_action = action.casefold() if action else None

    hits = []
    for ref in kb.list_design_refs(kind):
        doc = kb.get_fad(ref)
        matches: list[FgiMatch] = []
        for product in doc.products:
            types = {g.geometric_id: g.patmine_type for g in product.geometries}
            for fgi in product.fgis:
                from_type = types.get(fgi.from_geometric_id, "")
                to_type = types.get(fgi.to_geometric_id, "")
                if source_re is not None and not source_re.search(from_type):
                    continue
                if target_re is not None and not target_re.search(to_type):
                    continue
                if wanted_action is not None and fgi.action.casefold() != wanted_action:
                    continue
                if function_id is not None and function_id not in fgi.function_ids:
                    continue
                matches.append(
                    FgiMatch(
                        product_id=product.product_id,
                        edge_id=fgi.edge_id,
                        from_geometric_id=fgi.from_geometric_id,
                        from_type=from_type,
                        to_geometric_id=fgi.to_geometric_id,
                        to_type=to_type,
                        action=fgi.action,
                        function_ids=list(fgi.function_ids),
                    )
                )
        if matches:
            hits.append(FgiPatternHit(ref.unique_id, ref.kind, len(matches), matches))
    hits.sort(key=lambda h: (-h.match_count, h.unique_id))
    return hits


# --- paging ------------------------------------------------------------------


@dataclass
class DesignSummary:
    unique_id: str
    kind: str
    title: str
    node_id: int
    product_count: int


@dataclass
class DesignPage:
    """One page of design summaries; pages are numbered from 1."""

    items: list[DesignSummary]
    page: int
    page_size: int
    total: int

    @property
    def page_count(self) -> int:
        if self.total == 0:
            return 1
        return -(-self.total // self.page_size)

    @property
    def first_page(self) -> int:
        return 1

    @property
    def last_page(self) -> int:
        return self.page_count

    @property
    def prev_page(self) -> int:
        return max(1, self.page - 1)

    @property
    def next_page(self) -> int:
        return min(self.page_count, self.page + 1)


def list_designs(
    kb: FadKnowledgeBase, kind: str | None = None, page: int = 1, page_size: int = 25
) -> DesignPage:
    """Stable design listing ordered by unique id, one page at a time."""
    if page_size < 1:
        raise ValueError("page_size must be positive")
    refs = kb.list_design_refs(kind)
    total = len(refs)
    page_count = max(1, -(-total // page_size))
    page = min(max(1, page), page_count)
    start = (page - 1) * page_size
    summaries = []
    for ref in refs[start : start + page_size]:
        node = kb.store.node(ref.node_id)
        products = sum(1 for e in kb.store.out_edges(ref.node_id) if e.type == "hasProduct")
        summaries.append(
            DesignSummary(
                unique_id=ref.unique_id,
                kind=ref.kind,
                title=str(node.props.get("title", "")),
                node_id=ref.node_id,
                product_count=products,
            )
        )
    return DesignPage(items=summaries, page=page, page_size=page_size, total=total)


# --- matching internals -------------------------------------------------------


def _match_document(
    doc: FadDocument, tokens: list[ExpandedKeyword], weights: SearchWeights
) -> list[MatchedItem]:
    items: list[MatchedItem] = []
    for kind, element_id, props in _scannable_elements(doc):
        for key, value in props.items():
            for token in tokens:
                if _value_matches(value, token.keyword):
                    items.append(
                        MatchedItem(
                            element_kind=kind,
                            element_id=element_id,
                            property_key=key,
                            keyword=token.keyword,
                            source_keyword=token.source,
                            via_synonym=token.via_synonym,
                            weight=weights.for_key(key)
                            * (weights.synonym_multiplier if token.via_synonym else 1.0),
                        )
                    )
    return _dedup_items(items)


def _scannable_elements(doc: FadDocument):
    design_props = {"title": doc.title, **doc.extras} if doc.title else dict(doc.extras)
    yield "design", doc.node_id, design_props
    for product in doc.products:
        yield "product", product.node_id, {"name": product.name, **product.extras}
        for geometry in product.geometries:
            yield "geometry", geometry.node_id, {
                "name": geometry.name,
                "PatMine_type": geometry.patmine_type,
                **geometry.extras,
            }
        for fgi in product.fgis:
            props: dict = {"action": fgi.action, "Function_IDs": fgi.function_ids}
            if fgi.function_name:
                props["Function_Name"] = fgi.function_name
            props.update(fgi.extras)
            yield "fgi", fgi.edge_id, props


def _value_matches(value, keyword: str) -> bool:
    token = keyword.casefold()
    if isinstance(value, str):
        return value.casefold() == token
    if isinstance(value, list):
        return any(isinstance(v, str) and v.casefold() == token for v in value)
    return False


def _dedup_items(items: list[MatchedItem]) -> list[MatchedItem]:
    """Unique (element, key, keyword) triples; direct matches beat synonyms."""
    chosen: dict[tuple, MatchedItem] = {}
    for item in sorted(items, key=lambda i: i.via_synonym):
        key = (item.element_kind, item.element_id, item.property_key, item.keyword.casefold())
        chosen.setdefault(key, item)
    ordered = sorted(
        chosen.values(),
        key=lambda i: (i.element_kind, i.element_id, i.property_key, i.keyword.casefold()),
    )
    return ordered


def _match_semantic_field(
    doc: FadDocument, field_name: str, value: str, weights: SearchWeights
) -> list[MatchedItem]:
    items: list[MatchedItem] = []

    def add(kind: str, element_id: int, key: str):
        items.append(
            MatchedItem(
                element_kind=kind,
                element_id=element_id,
                property_key=key,
                keyword=value,
                source_keyword=value,
                via_synonym=False,
                weight=weights.for_key(key),
            )
        )

    token = value.casefold()
    if field_name == "title":
        if doc.title.casefold() == token:
            add("design", doc.node_id, "title")
    elif field_name == "product":
        for product in doc.products:
            if product.name.casefold() == token:
                add("product", product.node_id, "name")
    elif field_name == "function":
        for product in doc.products:
            for fgi in product.fgis:
                if fgi.function_name and fgi.function_name.casefold() == token:
                    add("fgi", fgi.edge_id, "Function_Name")
                if any(fid.casefold() == token for fid in fgi.function_ids):
                    add("fgi", fgi.edge_id, "Function_IDs")
    elif field_name == "action":
        for product in doc.products:
            for fgi in product.fgis:
                if fgi.action.casefold() == token:
                    add("fgi", fgi.edge_id, "action")
    elif field_name == "geometry":
        for product in doc.products:
            for geometry in product.geometries:
                if geometry.name.casefold() == token:
                    add("geometry", geometry.node_id, "name")
                if geometry.patmine_type.casefold() == token:
                    add("geometry", geometry.node_id, "PatMine_type")
    return items
