"""Schema-free directed labeled property graph with uniqueness constraints.

Nodes carry an ordered label list (the first label is the principal type)
and a property bag; edges are always directed and carry a type plus a
property bag. Property values are text, 64-bit numbers, booleans, or lists
of text — never null: an absent value means the key is not stored.

Thread safety: single-writer / multi-reader. Reads run concurrently;
mutations are serialized through one writer and readers never observe a
half-applied mutation. The store can be handed freely between threads.

Persistence is a newline-delimited UTF-8 snapshot, one JSON record per
line, first line a header record with format version ``patgraph-1``.
"""

from __future__ import annotations

import json
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Mapping, Sequence

from .errors import (
    ConstraintViolation,
    DanglingEndpoint,
    EmptyLabels,
    FormatError,
    InvalidPropertyValue,
    IoFailure,
    NodeInUse,
    PreexistingDuplicates,
    UnknownEdge,
    UnknownNode,
)

SNAPSHOT_FORMAT = "patgraph-1"

#: Property values: text, number, boolean, or list of text strings.
PropertyValue = str | int | float | bool | list[str]


def check_property_value(key: str, value: Any) -> PropertyValue:
    """Validate ``value`` as a PropertyValue and return a safe copy.

    Lists are copied and must contain only text items. ``None`` is
    rejected: absence is modelled by not storing the key at all.
    """
    if not isinstance(key, str) or not key:
        raise InvalidPropertyValue(f"property key must be non-empty text, got {key!r}")
    if isinstance(value, bool):
        return value
    if isinstance(value, (str, int, float)):
        return value
    if isinstance(value, (list, tuple)):
        items = list(value)
        for item in items:
            if not isinstance(item, str):
                raise InvalidPropertyValue(
                    f"list property {key!r} may only contain text, got {item!r}"
                )
        return items
    raise InvalidPropertyValue(f"unsupported value for property {key!r}: {value!r}")


def check_props(props: Mapping[str, Any] | None) -> dict[str, PropertyValue]:
    """Validate a whole property map, returning a fresh dict."""
    if props is None:
        return {}
    return {key: check_property_value(key, value) for key, value in props.items()}


def _value_key(value: PropertyValue):
    """Hashable identity of a property value for uniqueness indexing."""
    if isinstance(value, list):
        return ("list", tuple(value))
    return value


@dataclass(frozen=True)
class GraphNode:
    """A stored node. Treat as immutable; updates replace the record."""

    id: int
    labels: tuple[str, ...]
    props: dict[str, PropertyValue]

    @property
    def principal_label(self) -> str:
        """The first label — the node's main type."""
        return self.labels[0]


@dataclass(frozen=True)
class GraphEdge:
    """A stored directed edge between two live nodes."""

    id: int
    type: str
    from_id: int
    to_id: int
    props: dict[str, PropertyValue]


@dataclass(frozen=True)
class UniquenessConstraint:
    label: str
    property: str


class _RWLock:
    """Single-writer / multi-reader lock (no fairness guarantees needed here)."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False

    @contextmanager
    def read(self) -> Iterator[None]:
        with self._cond:
            while self._writing:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self) -> Iterator[None]:
        with self._cond:
            while self._writing or self._readers:
                self._cond.wait()
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


class GraphStore:
    """In-memory labeled property graph with label and uniqueness indices."""

    def __init__(self) -> None:
        self._nodes: dict[int, GraphNode] = {}
        self._edges: dict[int, GraphEdge] = {}
        self._out: dict[int, list[int]] = {}
        self._in: dict[int, list[int]] = {}
        self._label_index: dict[str, set[int]] = {}
        # (label, property) -> value key -> node id
        self._unique: dict[tuple[str, str], dict[Any, int]] = {}
        self._next_node_id = 1
        self._next_edge_id = 1
        self._lock = _RWLock()

    # -- node operations ---------------------------------------------

    def create_node(self, labels: Sequence[str], props: Mapping[str, Any] | None = None) -> int:
        """Create a node and return its id.

        Raises:
            EmptyLabels: no labels given.
            ConstraintViolation: a constrained (label, property) value exists.
        """
        clean_labels = self._check_labels(labels)
        clean_props = check_props(props)
        with self._lock.write():
            self._check_constraints(clean_labels, clean_props, exclude_node=None)
            return self._insert_node(clean_labels, clean_props)

    def merge_node(
        self,
        labels: Sequence[str],
        key: str,
        value: Any,
        extra: Mapping[str, Any] | None = None,
    ) -> int:
        """Return the node matching (principal label, key=value), creating it if absent.

        Idempotent: repeated merges with the same key/value return the same id.
        """
        clean_labels = self._check_labels(labels)
        clean_value = check_property_value(key, value)
        clean_extra = check_props(extra)
        principal = clean_labels[0]
        with self._lock.write():
            existing = self._find_by_label_prop(principal, key, clean_value)
            if existing is not None:
                return existing
            clean_props = dict(clean_extra)
            clean_props[key] = clean_value
            self._check_constraints(clean_labels, clean_props, exclude_node=None)
            return self._insert_node(clean_labels, clean_props)

    def set_node_props(
        self, node_id: int, updates: Mapping[str, Any], remove: Sequence[str] = ()
    ) -> GraphNode:
        """Merge ``updates`` into a node's properties (and drop ``remove`` keys)."""
        clean = check_props(updates)
        with self._lock.write():
            node = self._nodes.get(node_id)
            if node is None:
                raise UnknownNode(f"no node {node_id}")
            new_props = {k: v for k, v in node.props.items() if k not in set(remove)}
            new_props.update(clean)
            self._check_constraints(node.labels, new_props, exclude_node=node_id)
            self._unindex_unique(node)
            replaced = GraphNode(node_id, node.labels, new_props)
            self._nodes[node_id] = replaced
            self._index_unique(replaced)
            return replaced

    def delete_node(self, node_id: int, cascade: bool = False) -> None:
        """Delete a node; refuses when edges are attached unless ``cascade``."""
        with self._lock.write():
            node = self._nodes.get(node_id)
            if node is None:
                raise UnknownNode(f"no node {node_id}")
            incident = self._out.get(node_id, []) + self._in.get(node_id, [])
            if incident and not cascade:
                raise NodeInUse(
                    f"node {node_id} has {len(incident)} incident edge(s); pass cascade=True"
                )
            for edge_id in list(dict.fromkeys(incident)):
                self._remove_edge(edge_id)
            self._unindex_unique(node)
            for label in node.labels:
                self._label_index[label].discard(node_id)
            del self._nodes[node_id]
            self._out.pop(node_id, None)
            self._in.pop(node_id, None)

    # -- edge operations ---------------------------------------------

    def create_edge(
        self, from_id: int, to_id: int, type: str, props: Mapping[str, Any] | None = None
    ) -> int:
        """Create a directed edge; both endpoints must exist.

        Raises:
            DanglingEndpoint: either node id is unknown.
        """
        if not type:
            raise InvalidPropertyValue("edge type must be non-empty text")
        clean_props = check_props(props)
        with self._lock.write():
            for node_id in (from_id, to_id):
                if node_id not in self._nodes:
                    raise DanglingEndpoint(f"no node {node_id} for edge endpoint")
            edge_id = self._next_edge_id
            self._next_edge_id += 1
            edge = GraphEdge(edge_id, type, from_id, to_id, clean_props)
            self._edges[edge_id] = edge
            self._out.setdefault(from_id, []).append(edge_id)
            self._in.setdefault(to_id, []).append(edge_id)
            return edge_id

    def delete_edge(self, edge_id: int) -> None:
        with self._lock.write():
            if edge_id not in self._edges:
                raise UnknownEdge(f"no edge {edge_id}")
            self._remove_edge(edge_id)

    def set_edge_props(
        self, edge_id: int, updates: Mapping[str, Any], remove: Sequence[str] = ()
    ) -> GraphEdge:
        """Merge ``updates`` into an edge's properties (and drop ``remove`` keys)."""
        clean = check_props(updates)
        with self._lock.write():
            edge = self._edges.get(edge_id)
            if edge is None:
                raise UnknownEdge(f"no edge {edge_id}")
            new_props = {k: v for k, v in edge.props.items() if k not in set(remove)}
            new_props.update(clean)
            replaced = GraphEdge(edge_id, edge.type, edge.from_id, edge.to_id, new_props)
            self._edges[edge_id] = replaced
            return replaced

    # -- constraints ---------------------------------------------------

    def add_constraint(self, label: str, property: str) -> None:
        """Activate a uniqueness constraint on (label, property).

        Raises:
            PreexistingDuplicates: current data already violates it.
        """
        with self._lock.write():
            key = (label, property)
            if key in self._unique:
                return
            index: dict[Any, int] = {}
            for node_id in sorted(self._label_index.get(label, ())):
                node = self._nodes[node_id]
                if property not in node.props:
                    continue
                value_key = _value_key(node.props[property])
                if value_key in index:
                    raise PreexistingDuplicates(
                        f"({label}, {property}) value {node.props[property]!r} "
                        f"appears on nodes {index[value_key]} and {node_id}"
                    )
                index[value_key] = node_id
            self._unique[key] = index

    def constraints(self) -> list[UniquenessConstraint]:
        with self._lock.read():
            return [UniquenessConstraint(l, p) for (l, p) in sorted(self._unique)]

    # -- reads ---------------------------------------------------------

    def node(self, node_id: int) -> GraphNode:
        with self._lock.read():
            node = self._nodes.get(node_id)
            if node is None:
                raise UnknownNode(f"no node {node_id}")
            return node

    def has_node(self, node_id: int) -> bool:
        with self._lock.read():
            return node_id in self._nodes

    def edge(self, edge_id: int) -> GraphEdge:
        with self._lock.read():
            edge = self._edges.get(edge_id)
            if edge is None:
                raise UnknownEdge(f"no edge {edge_id}")
            return edge

    def nodes_with_label(self, label: str) -> list[GraphNode]:
        with self._lock.read():
            return [self._nodes[i] for i in sorted(self._label_index.get(label, ()))]

    def find_nodes(self, label: str, key: str, value: Any) -> list[GraphNode]:
        """Nodes bearing ``label`` whose ``key`` equals ``value`` (index-backed when constrained)."""
        clean = check_property_value(key, value)
        with self._lock.read():
            found = self._find_by_label_prop(label, key, clean)
            if found is not None:
                return [self._nodes[found]]
            if (label, key) in self._unique:
                return []
            result = []
            for node_id in sorted(self._label_index.get(label, ())):
                if self._nodes[node_id].props.get(key) == clean:
                    result.append(self._nodes[node_id])
            return result

    def out_edges(self, node_id: int) -> list[GraphEdge]:
        with self._lock.read():
            return [self._edges[i] for i in self._out.get(node_id, [])]

    def in_edges(self, node_id: int) -> list[GraphEdge]:
        with self._lock.read():
            return [self._edges[i] for i in self._in.get(node_id, [])]

    def all_nodes(self) -> list[GraphNode]:
        with self._lock.read():
            return [self._nodes[i] for i in sorted(self._nodes)]

    def all_edges(self) -> list[GraphEdge]:
        with self._lock.read():
            return [self._edges[i] for i in sorted(self._edges)]

    def node_count(self) -> int:
        with self._lock.read():
            return len(self._nodes)

    def edge_count(self) -> int:
        with self._lock.read():
            return len(self._edges)

    def match_pattern(self, spec) -> list[dict[str, Any]]:
        """Enumerate all binding rows for a :class:`~patgraph.pattern.PatternSpec`.

        Runs under the read lock so a row set never mixes two store states.
        """
        from . import pattern

        with self._lock.read():
            return pattern.match_rows(self, spec)

    # -- persistence -----------------------------------------------------

    def snapshot_save(self, path: str | Path) -> None:
        """Write the whole store as newline-delimited JSON records."""
        with self._lock.read():
            lines = [
                json.dumps(
                    {
                        "format": SNAPSHOT_FORMAT,
                        "nodes": len(self._nodes),
                        "edges": len(self._edges),
                        "constraints": len(self._unique),
                    },
                    sort_keys=True,
                )
            ]
            for label, prop in sorted(self._unique):
                lines.append(
                    json.dumps(
                        {"record": "constraint", "label": label, "property": prop},
                        sort_keys=True,
                    )
                )
            for node_id in sorted(self._nodes):
                node = self._nodes[node_id]
                lines.append(
                    json.dumps(
                        {
                            "record": "node",
                            "id": node.id,
                            "labels": list(node.labels),
                            "props": node.props,
                        },
                        sort_keys=True,
                    )
                )
            for edge_id in sorted(self._edges):
                edge = self._edges[edge_id]
                lines.append(
                    json.dumps(
                        {
                            "record": "edge",
                            "id": edge.id,
                            "type": edge.type,
                            "from": edge.from_id,
                            "to": edge.to_id,
                            "props": edge.props,
                        },
                        sort_keys=True,
                    )
                )
        try:
            Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write snapshot {path}: {exc}") from exc

    @classmethod
    def snapshot_load(cls, path: str | Path) -> "GraphStore":
        """Rebuild a store from a snapshot file.

        Raises:
            IoFailure: the file cannot be read.
            FormatError: the content is corrupt, truncated, or wrong version.
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot read snapshot {path}: {exc}") from exc

        lines = text.splitlines()
        if not lines:
            raise FormatError("snapshot is empty (missing header record)")
        header = cls._parse_record(lines[0], 1)
        if header.get("format") != SNAPSHOT_FORMAT:
            raise FormatError(f"unsupported snapshot format {header.get('format')!r}")

        store = cls()
        counts = {"node": 0, "edge": 0, "constraint": 0}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            record = cls._parse_record(line, lineno)
            kind = record.get("record")
            try:
                if kind == "constraint":
                    store._unique.setdefault((record["label"], record["property"]), {})
                elif kind == "node":
                    labels = tuple(record["labels"])
                    if not labels:
                        raise FormatError(f"line {lineno}: node without labels")
                    props = check_props(record["props"])
                    node = GraphNode(int(record["id"]), labels, props)
                    if node.id in store._nodes:
                        raise FormatError(f"line {lineno}: duplicate node id {node.id}")
                    store._nodes[node.id] = node
                    for label in labels:
                        store._label_index.setdefault(label, set()).add(node.id)
                elif kind == "edge":
                    props = check_props(record["props"])
                    edge = GraphEdge(
                        int(record["id"]), record["type"], int(record["from"]),
                        int(record["to"]), props,
                    )
                    if edge.id in store._edges:
                        raise FormatError(f"line {lineno}: duplicate edge id {edge.id}")
                    if edge.from_id not in store._nodes or edge.to_id not in store._nodes:
                        raise FormatError(f"line {lineno}: edge endpoint missing")
                    store._edges[edge.id] = edge
                    store._out.setdefault(edge.from_id, []).append(edge.id)
                    store._in.setdefault(edge.to_id, []).append(edge.id)
                else:
                    raise FormatError(f"line {lineno}: unknown record kind {kind!r}")
            except (KeyError, TypeError, ValueError, InvalidPropertyValue) as exc:
                raise FormatError(f"line {lineno}: malformed record ({exc})") from exc
            counts[kind] += 1

        expected = {
            "node": header.get("nodes"),
            "edge": header.get("edges"),
            "constraint": header.get("constraints"),
        }
        for kind, want in expected.items():
            if want is not None and counts[kind] != want:
                raise FormatError(
                    f"snapshot truncated: header promises {want} {kind} records, "
                    f"found {counts[kind]}"
                )

        # Rebuild uniqueness indices and verify the stored data still honors them.
        for (label, prop) in list(store._unique):
            index: dict[Any, int] = {}
            for node_id in sorted(store._label_index.get(label, ())):
                node = store._nodes[node_id]
                if prop not in node.props:
                    continue
                key = _value_key(node.props[prop])
                if key in index:
                    raise FormatError(
                        f"snapshot violates constraint ({label}, {prop}): "
                        f"duplicate value {node.props[prop]!r}"
                    )
                index[key] = node_id
            store._unique[(label, prop)] = index

        store._next_node_id = max(store._nodes, default=0) + 1
        store._next_edge_id = max(store._edges, default=0) + 1
        return store

    @staticmethod
    def _parse_record(line: str, lineno: int) -> dict:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: not valid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise FormatError(f"line {lineno}: record is not an object")
        return record

    # -- internals (call with the write or read lock held) -------------

    def _remove_edge(self, edge_id: int) -> None:
        edge = self._edges.pop(edge_id)
        self._out[edge.from_id].remove(edge_id)
        self._in[edge.to_id].remove(edge_id)

    @staticmethod
    def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
        if isinstance(labels, str):
            labels = [labels]
        cleaned = list(dict.fromkeys(labels))
        if not cleaned:
            raise EmptyLabels("a node needs at least one label")
        for label in cleaned:
            if not isinstance(label, str) or not label:
                raise EmptyLabels(f"labels must be non-empty text, got {label!r}")
        return tuple(cleaned)

    def _insert_node(self, labels: tuple[str, ...], props: dict[str, PropertyValue]) -> int:
        node_id = self._next_node_id
        self._next_node_id += 1
        node = GraphNode(node_id, labels, props)
        self._nodes[node_id] = node
        for label in labels:
            self._label_index.setdefault(label, set()).add(node_id)
        self._index_unique(node)
        return node_id

    def _check_constraints(
        self,
        labels: tuple[str, ...],
        props: dict[str, PropertyValue],
        exclude_node: int | None,
    ) -> None:
        for (label, prop), index in self._unique.items():
            if label in labels and prop in props:
                holder = index.get(_value_key(props[prop]))
                if holder is not None and holder != exclude_node:
                    raise ConstraintViolation(
                        f"({label}, {prop}) value {props[prop]!r} already on node {holder}"
                    )

    def _index_unique(self, node: GraphNode) -> None:
        for (label, prop), index in self._unique.items():
            if label in node.labels and prop in node.props:
                index[_value_key(node.props[prop])] = node.id

    def _unindex_unique(self, node: GraphNode) -> None:
        for (label, prop), index in self._unique.items():
            if label in node.labels and prop in node.props:
                index.pop(_value_key(node.props[prop]), None)

    def _find_by_label_prop(self, label: str, key: str, value: PropertyValue) -> int | None:
        """Constrained lookup when indexed, linear scan of the label otherwise."""
        index = self._unique.get((label, key))
        if index is not None:
            return index.get(_value_key(value))
        for node_id in sorted(self._label_index.get(label, ())):
            if self._nodes[node_id].props.get(key) == value:
                return node_id
        return None

    # Unlocked views used by the pattern matcher (runs inside match_pattern's
    # read lock).

    def _node_ids_with_label(self, label: str) -> list[int]:
        return sorted(self._label_index.get(label, ()))

    def _all_node_ids(self) -> list[int]:
        return sorted(self._nodes)

    def _get_node(self, node_id: int) -> GraphNode:
        return self._nodes[node_id]

    def _out_edge_objs(self, node_id: int) -> list[GraphEdge]:
        return [self._edges[i] for i in self._out.get(node_id, [])]

    def _indexed_lookup(self, label: str, props: Mapping[str, PropertyValue]) -> list[int] | None:
        """Node ids for a (label, prop=value) pair covered by a uniqueness index."""
        for key, value in props.items():
            index = self._unique.get((label, key))
            if index is not None:
                found = index.get(_value_key(value))
                return [found] if found is not None else []
        return None
