"""FAD visualization exports: DOT text and GraphJSON documents.

DOT output abstracts away design/product/claim nodes — geometries are the
only nodes, FGIs the only edges, each labeled ``action (fIDs)``. Node
labels follow the chosen abstraction level: the designer's name, the
ontology type, or any higher is-A label. Layout itself is delegated to an
external dot engine configured by path.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass
from typing import Iterable

from .model import FadKnowledgeBase
from .pattern import ABSENT
from .scoring import OverlapReport
from .store import GraphEdge, GraphNode

HIGHLIGHT_ATTRS = 'penwidth=3, color="red"'


@dataclass(frozen=True)
class AbstractionLevel:
    """How geometry nodes are labeled: designer name, ontology type, or supertype N."""

    kind: str  # designer-name | patmine-type | supertype
    level: int = 0

    @classmethod
    def designer_name(cls) -> "AbstractionLevel":
        return cls("designer-name")

    @classmethod
    def patmine_type(cls) -> "AbstractionLevel":
        return cls("patmine-type")

    @classmethod
    def supertype(cls, level: int) -> "AbstractionLevel":
        if level < 1:
            raise ValueError("supertype level must be positive")
        return cls("supertype", level)

    @classmethod
    def parse(cls, text: str) -> "AbstractionLevel":
        name = (text or "").strip()
        if name in ("", "designer-name"):
            return cls.designer_name()
        if name == "patmine-type":
            return cls.patmine_type()
        if name.startswith("supertype"):
            _, _, level = name.partition(":")
            return cls.supertype(int(level) if level else 1)
        raise ValueError(f"unknown abstraction level {text!r}")


def to_dot(
    kb: FadKnowledgeBase,
    design: "str | object",
    level: AbstractionLevel | None = None,
    highlight: OverlapReport | None = None,
) -> str:
    """Render one design's geometry/FGI graph as DOT text.

    Node ids are ``product_id/geometric_id`` so multi-product designs stay
    collision-free. With an overlap report, the design's matched elements
    get a fixed penwidth/color attribute pair.
    """
    level = level or AbstractionLevel.designer_name()
    doc = kb.get_fad(design)
    marked_geometries: set[tuple[str, str]] = set()
    marked_edges: set[int] = set()
    if highlight is not None:
        marked_geometries, marked_edges = highlight.matched_elements_of(doc.unique_id)

    lines = [f"digraph {_quote(doc.unique_id)} {{"]
    for product in doc.products:
        for geometry in product.geometries:
            node_id = f"{product.product_id}/{geometry.geometric_id}"
            label = _node_label(geometry, level)
            attrs = f"label={_quote(label)}"
            if (product.product_id, geometry.geometric_id) in marked_geometries:
                attrs += f", {HIGHLIGHT_ATTRS}"
            lines.append(f"  {_quote(node_id)} [{attrs}];")
    for product in doc.products:
        for fgi in product.fgis:
            source = f"{product.product_id}/{fgi.from_geometric_id}"
            target = f"{product.product_id}/{fgi.to_geometric_id}"
            label = f"{fgi.action} ({', '.join(fgi.function_ids)})"
            attrs = f"label={_quote(label)}"
            if fgi.edge_id in marked_edges:
                attrs += f", {HIGHLIGHT_ATTRS}"
            lines.append(f"  {_quote(source)} -> {_quote(target)} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _node_label(geometry, level: AbstractionLevel) -> str:
    if level.kind == "designer-name":
        return geometry.name
    if level.kind == "patmine-type":
        return geometry.patmine_type
    return geometry.type_at_level(level.level)


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def render_dot(dot_text: str, engine_path: str, format: str = "svg") -> bytes:
    """Lay out DOT text with the configured external dot engine."""
    result = subprocess.run(
        [engine_path, f"-T{format}"],
        input=dot_text.encode("utf-8"),
        capture_output=True,
        check=True,
    )
    return result.stdout


# --- GraphJSON ---------------------------------------------------------------


def design_to_graphjson(
    kb: FadKnowledgeBase, design: "str | object", projection: str = "full"
) -> dict:
    """A design as a nodes/edges document (projection: ``full`` or ``geometry``).

    Full projection carries the design, products, claims, and geometries
    with their connecting edges; geometry projection just the geometries
    and the FGIs among them.
    """
    if projection not in ("full", "geometry"):
        raise ValueError(f"unknown projection {projection!r}")
    doc = kb.get_fad(design)
    nodes = []
    edges = []
    if projection == "full":
        nodes.append(_node_json(doc.node_id, kb))
        for product in doc.products:
            nodes.append(_node_json(product.node_id, kb))
            edges.append(_edge_between(kb, doc.node_id, product.node_id, "hasProduct"))
            for claim in product.claims:
                nodes.append(_node_json(claim.node_id, kb))
                edges.append(_edge_between(kb, product.node_id, claim.node_id, "hasClaim"))
            for geometry in product.geometries:
                nodes.append(_node_json(geometry.node_id, kb))
                edges.append(_edge_between(kb, product.node_id, geometry.node_id, "hasGeometry"))
            for fgi in product.fgis:
                edges.append(_edge_dict(kb.store.edge(fgi.edge_id)))
    else:
        for product in doc.products:
            for geometry in product.geometries:
                nodes.append(_node_json(geometry.node_id, kb))
            for fgi in product.fgis:
                edges.append(_edge_dict(kb.store.edge(fgi.edge_id)))
    nodes.sort(key=lambda n: n["id"])
    edges.sort(key=lambda e: e["id"])
    return {"nodes": nodes, "edges": edges}


def tabular_to_entities(
    rows: Iterable[dict],
) -> tuple[list[GraphNode], list[GraphEdge]]:
    """Deduplicate query-result rows into node and edge sets.

    Tabular results repeat shared graph elements across rows; each distinct
    node/edge comes back exactly once, sorted by id. Absent bindings and
    aggregate numbers are ignored.
    """
    nodes: dict[int, GraphNode] = {}
    edges: dict[int, GraphEdge] = {}
    for row in rows:
        for value in row.values():
            if value is ABSENT:
                continue
            if isinstance(value, GraphNode):
                nodes.setdefault(value.id, value)
            elif isinstance(value, GraphEdge):
                edges.setdefault(value.id, value)
    return (
        [nodes[i] for i in sorted(nodes)],
        [edges[i] for i in sorted(edges)],
    )


def rows_to_graphjson(rows: Iterable[dict]) -> dict:
    """GraphJSON document for the deduplicated entities of query rows."""
    nodes, edges = tabular_to_entities(rows)
    return {
        "nodes": [_node_dict(n) for n in nodes],
        "edges": [_edge_dict(e) for e in edges],
    }


def graphjson_dumps(document: dict) -> str:
    """Serialize with a deterministic key order."""
    return json.dumps(document, sort_keys=True, indent=2)


def _node_json(node_id: int, kb: FadKnowledgeBase) -> dict:
    return _node_dict(kb.store.node(node_id))


def _node_dict(node: GraphNode) -> dict:
    return {
        "id": node.id,
        "labels": list(node.labels),
        "properties": {k: node.props[k] for k in sorted(node.props)},
    }


def _edge_dict(edge: GraphEdge) -> dict:
    return {
        "id": edge.id,
        "type": edge.type,
        "source": edge.from_id,
        "target": edge.to_id,
        "properties": {k: edge.props[k] for k in sorted(edge.props)},
    }


def _edge_between(kb: FadKnowledgeBase, from_id: int, to_id: int, edge_type: str) -> dict:
    for edge in kb.store.out_edges(from_id):
        if edge.to_id == to_id and edge.type == edge_type:
            return _edge_dict(edge)
    raise ValueError(f"no {edge_type} edge between {from_id} and {to_id}")
