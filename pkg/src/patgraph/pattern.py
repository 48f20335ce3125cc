"""Graph pattern specification and matching.

A pattern is an ordered list of segments. Each segment filters one node
(optional variable, optional label, property-equality map) and may carry
an outgoing-edge filter that chains it to the next segment's node. A
maximal chained run of segments forms one clause — the unit that is
mandatory or optional, exactly like a MATCH / OPTIONAL MATCH line.

Matching semantics: clauses are evaluated in order against the current
binding rows. A mandatory clause drops rows it cannot extend; an optional
clause keeps them, binding its new variables to :data:`ABSENT`. Every
distinct assignment of concrete nodes/edges to the pattern positions
(named or anonymous) yields one row, so the result is a multiset that
equals exhaustive enumeration over the graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import BadRegex, UnknownVariable
from .store import GraphEdge, GraphNode, GraphStore, PropertyValue


class _Absent:
    """Marker bound to variables of an optional clause that did not match."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABSENT"

    def __bool__(self) -> bool:
        return False


ABSENT = _Absent()

Element = Union[GraphNode, GraphEdge, _Absent]
Row = dict[str, Element]


@dataclass(frozen=True)
class NodePattern:
    """Filter for one node position: variable, label, and exact property values."""

    var: str | None = None
    label: str | None = None
    props: Mapping[str, PropertyValue] = field(default_factory=dict)

    def admits(self, node: GraphNode) -> bool:
        if self.label is not None and self.label not in node.labels:
            return False
        return all(node.props.get(k) == v for k, v in self.props.items())


@dataclass(frozen=True)
class EdgePattern:
    """Filter for a directed edge position (source to the next segment's node)."""

    var: str | None = None
    type: str | None = None
    props: Mapping[str, PropertyValue] = field(default_factory=dict)

    def admits(self, edge: GraphEdge) -> bool:
        if self.type is not None and edge.type != self.type:
            return False
        return all(edge.props.get(k) == v for k, v in self.props.items())


@dataclass(frozen=True)
class PatternSegment:
    """One node position plus the optional edge chaining to the next segment."""

    node: NodePattern
    edge: EdgePattern | None = None
    optional: bool = False


# --- predicates -----------------------------------------------------------


class Predicate:
    """Base for WHERE-style row filters. Subclasses implement holds()."""

    def variables(self) -> tuple[str, ...]:
        raise NotImplementedError

    def compile(self) -> None:
        """Eagerly validate any embedded regex (raises BadRegex)."""

    def holds(self, row: Row) -> bool:
        raise NotImplementedError


def _prop_of(element: Element, key: str):
    if isinstance(element, (GraphNode, GraphEdge)):
        return element.props.get(key, _MISSING)
    return _MISSING


_MISSING = object()


@dataclass(frozen=True)
class PropEquals(Predicate):
    var: str
    key: str
    value: PropertyValue

    def variables(self) -> tuple[str, ...]:
        return (self.var,)

    def holds(self, row: Row) -> bool:
        value = _prop_of(row[self.var], self.key)
        return value is not _MISSING and value == self.value


@dataclass(frozen=True)
class PropRegex(Predicate):
    """Unanchored regex search over a text property (``=~``)."""

    var: str
    key: str
    pattern: str
    case_insensitive: bool = False

    def variables(self) -> tuple[str, ...]:
        return (self.var,)

    def compile(self):
        return compile_regex(self.pattern, self.case_insensitive)

    def holds(self, row: Row) -> bool:
        value = _prop_of(row[self.var], self.key)
        if not isinstance(value, str):
            return False
        return self.compile().search(value) is not None


@dataclass(frozen=True)
class ValueInListProp(Predicate):
    """``"f1" IN r.Function_IDs`` — membership of a literal in a list property."""

    value: str
    var: str
    key: str

    def variables(self) -> tuple[str, ...]:
        return (self.var,)

    def holds(self, row: Row) -> bool:
        value = _prop_of(row[self.var], self.key)
        return isinstance(value, list) and self.value in value


@dataclass(frozen=True)
class PropInValues(Predicate):
    """``r.Function_Name IN ["a", "b"]`` — property equals one of the literals."""

    var: str
    key: str
    values: tuple[PropertyValue, ...]

    def variables(self) -> tuple[str, ...]:
        return (self.var,)

    def holds(self, row: Row) -> bool:
        value = _prop_of(row[self.var], self.key)
        return value is not _MISSING and value in self.values

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class And(Predicate):
    parts: tuple[Predicate, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def variables(self) -> tuple[str, ...]:
        return tuple(v for p in self.parts for v in p.variables())

    def compile(self) -> None:
        for part in self.parts:
            part.compile()

    def holds(self, row: Row) -> bool:
        return all(part.holds(row) for part in self.parts)


_REGEX_CACHE: dict[tuple[str, bool], re.Pattern] = {}


def compile_regex(pattern: str, case_insensitive: bool = False) -> re.Pattern:
    """Compile (and cache) a predicate regex, raising BadRegex on bad syntax."""
    key = (pattern, case_insensitive)
    compiled = _REGEX_CACHE.get(key)
    if compiled is None:
        try:
            compiled = re.compile(pattern, re.IGNORECASE if case_insensitive else 0)
        except re.error as exc:
            raise BadRegex(f"bad regex {pattern!r}: {exc}") from exc
        _REGEX_CACHE[key] = compiled
    return compiled


# --- the pattern spec ------------------------------------------------------


@dataclass
class PatternSpec:
    """A full pattern: segments, row predicates, and the variables to return.

    ``returns`` empty means all declared variables in declaration order.
    """

    segments: list[PatternSegment]
    predicates: list[Predicate] = field(default_factory=list)
    returns: list[str] = field(default_factory=list)

    def clauses(self) -> list[list[PatternSegment]]:
        """Split segments into maximal chained runs (one run per MATCH clause)."""
        runs: list[list[PatternSegment]] = []
        current: list[PatternSegment] = []
        for segment in self.segments:
            current.append(segment)
            if segment.edge is None:
                runs.append(current)
                current = []
        if current:
            # trailing segment with an edge but no target node
            raise ValueError("pattern ends with an edge filter but no target segment")
        return runs

    def declared_variables(self) -> list[str]:
        seen: dict[str, str] = {}
        for segment in self.segments:
            for var, kind in ((segment.node.var, "node"), (getattr(segment.edge, "var", None), "edge")):
                if var is None:
                    continue
                if seen.get(var, kind) != kind:
                    raise ValueError(f"variable {var!r} used as both node and edge")
                seen.setdefault(var, kind)
        return list(seen)

    def validate(self) -> None:
        """Check well-formedness; raises ValueError or UnknownVariable."""
        if not self.segments:
            raise ValueError("pattern has no segments")
        clauses = self.clauses()
        if not any(not clause[0].optional for clause in clauses):
            raise ValueError("pattern needs at least one mandatory segment")
        for clause in clauses:
            flags = {segment.optional for segment in clause}
            if len(flags) > 1:
                raise ValueError("segments of one clause must share the optional flag")
        declared = set(self.declared_variables())
        for predicate in self.predicates:
            predicate.compile()
            for var in predicate.variables():
                if var not in declared:
                    raise UnknownVariable(f"predicate references undeclared variable {var!r}")
        for var in self.returns:
            if var not in declared:
                raise UnknownVariable(f"return item references undeclared variable {var!r}")


# --- matching engine --------------------------------------------------------


def match_rows(store: GraphStore, spec: PatternSpec) -> list[Row]:
    """Enumerate binding rows for ``spec`` over ``store``.

    Must run under the store's read lock; use GraphStore.match_pattern.
    """
    spec.validate()
    rows: list[Row] = [{}]
    for clause in spec.clauses():
        optional = clause[0].optional
        new_vars = _clause_variables(clause)
        next_rows: list[Row] = []
        for row in rows:
            extensions = _match_clause(store, clause, row)
            if extensions:
                next_rows.extend(extensions)
            elif optional:
                absent_row = dict(row)
                for var in new_vars:
                    absent_row.setdefault(var, ABSENT)
                next_rows.append(absent_row)
        rows = next_rows
    rows = [row for row in rows if all(p.holds(row) for p in spec.predicates)]
    returns = spec.returns or spec.declared_variables()
    return [{var: row.get(var, ABSENT) for var in returns} for row in rows]


def _clause_variables(clause: list[PatternSegment]) -> list[str]:
    names = []
    for segment in clause:
        if segment.node.var:
            names.append(segment.node.var)
        if segment.edge is not None and segment.edge.var:
            names.append(segment.edge.var)
    return list(dict.fromkeys(names))


def _node_candidates(store: GraphStore, filt: NodePattern, row: Row) -> list[GraphNode]:
    if filt.var is not None and filt.var in row:
        bound = row[filt.var]
        if isinstance(bound, GraphNode) and filt.admits(bound):
            return [bound]
        return []
    if filt.label is not None:
        if filt.props:
            indexed = store._indexed_lookup(filt.label, filt.props)
            if indexed is not None:
                nodes = [store._get_node(i) for i in indexed]
                return [n for n in nodes if filt.admits(n)]
        ids = store._node_ids_with_label(filt.label)
    else:
        ids = store._all_node_ids()
    return [n for n in map(store._get_node, ids) if filt.admits(n)]


def _match_clause(store: GraphStore, clause: list[PatternSegment], row: Row) -> list[Row]:
    """All extensions of ``row`` along the clause's chain (DFS over the path)."""
    results: list[Row] = []

    def step(index: int, current: Row, anchor: GraphNode | None) -> None:
        segment = clause[index]
        if anchor is None:
            candidates = _node_candidates(store, segment.node, current)
        else:
            candidates = [anchor]
        for node in candidates:
            bound = dict(current)
            if segment.node.var:
                bound[segment.node.var] = node
            if segment.edge is None:
                results.append(bound)
                continue
            target_filter = clause[index + 1].node
            for edge in store._out_edge_objs(node.id):
                if not segment.edge.admits(edge):
                    continue
                if segment.edge.var and segment.edge.var in bound:
                    prior = bound[segment.edge.var]
                    if not (isinstance(prior, GraphEdge) and prior.id == edge.id):
                        continue
                target = store._get_node(edge.to_id)
                if target_filter.var and target_filter.var in bound:
                    prior = bound[target_filter.var]
                    if not (isinstance(prior, GraphNode) and prior.id == target.id):
                        continue
                if not target_filter.admits(target):
                    continue
                extended = dict(bound)
                if segment.edge.var:
                    extended[segment.edge.var] = edge
                step(index + 1, extended, target)

    # The first segment of a clause re-checks var bindings inside
    # _node_candidates; chained segments are anchored by the edge walk.
    step(0, row, None)
    return results
