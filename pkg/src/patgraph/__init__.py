"""patgraph: an embedded FAD knowledge base over a labeled property graph.

Annotate patents and emerging designs as three-level functional analysis
models, search them (full-text, semantic, FGI patterns, PatQL), score
pairwise overlap, and export DOT / GraphJSON visualizations.
"""

from .errors import PatGraphError
from .lexicon import Lexicon, OntologyTerm
from .model import (
    FadDocument,
    FadKnowledgeBase,
    FunctionId,
    parse_function_id,
)
from .pattern import (
    ABSENT,
    And,
    EdgePattern,
    NodePattern,
    PatternSegment,
    PatternSpec,
    PropEquals,
    PropInValues,
    PropRegex,
    ValueInListProp,
)
from .patql import QueryAst, execute_query, parse_query
from .scoring import (
    MatchScore,
    OverlapCounts,
    OverlapReport,
    ScoringWeights,
    compute_overlap,
    match_rank,
    normalize_scores,
    score_corpus,
)
from .search import (
    RankedHit,
    SearchWeights,
    expand_query_synonyms,
    fgi_pattern_search,
    fulltext_search,
    list_designs,
    semantic_search,
    weighted_keyword_rank,
)
from .store import GraphEdge, GraphNode, GraphStore, UniquenessConstraint
from .viz import (
    AbstractionLevel,
    design_to_graphjson,
    tabular_to_entities,
    to_dot,
)

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "AbstractionLevel",
    "And",
    "EdgePattern",
    "FadDocument",
    "FadKnowledgeBase",
    "FunctionId",
    "GraphEdge",
    "GraphNode",
    "GraphStore",
    "Lexicon",
    "MatchScore",
    "NodePattern",
    "OntologyTerm",
    "OverlapCounts",
    "OverlapReport",
    "PatGraphError",
    "PatternSegment",
    "PatternSpec",
    "PropEquals",
    "PropInValues",
    "PropRegex",
    "QueryAst",
    "RankedHit",
    "ScoringWeights",
    "SearchWeights",
    "UniquenessConstraint",
    "ValueInListProp",
    "compute_overlap",
    "design_to_graphjson",
    "execute_query",
    "expand_query_synonyms",
    "fgi_pattern_search",
    "fulltext_search",
    "list_designs",
    "match_rank",
    "normalize_scores",
    "parse_function_id",
    "parse_query",
    "score_corpus",
    "semantic_search",
    "tabular_to_entities",
    "to_dot",
    "weighted_keyword_rank",
]
