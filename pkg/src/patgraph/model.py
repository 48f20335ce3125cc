"""Three-level FAD domain layer over the graph store.

Level one is the design (patent or emerging design) with its products and
claims; level two the geometric features of each product; level three the
functional structure: directed geometry-to-geometry interactions (FGIs)
tagged with an action and the function ids they help realize.

Node labels: patent / emergDesign, product, claim, geometry (+ extra
abstraction labels on geometries). Edge types: hasProduct, hasClaim,
hasGeometry, hasFGI. Designs are unique per kind — Patent_Number for
patents, filename for emerging designs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import (
    AmbiguousDesign,
    BadFunctionId,
    DuplicateGeometricId,
    DuplicateProductId,
    InvalidClaim,
    UnknownDesign,
    UnknownGeometry,
    UnknownNode,
    UnknownProduct,
)
from .lexicon import Lexicon
from .store import GraphNode, GraphStore, PropertyValue, check_props

KIND_PATENT = "patent"
KIND_EMERG = "emergDesign"
KINDS = (KIND_PATENT, KIND_EMERG)

#: Unique-id property per design kind.
ID_KEYS = {KIND_PATENT: "Patent_Number", KIND_EMERG: "filename"}

LABEL_PRODUCT = "product"
LABEL_CLAIM = "claim"
LABEL_GEOMETRY = "geometry"

EDGE_HAS_PRODUCT = "hasProduct"
EDGE_HAS_CLAIM = "hasClaim"
EDGE_HAS_GEOMETRY = "hasGeometry"
EDGE_HAS_FGI = "hasFGI"

_FUNCTION_ID_RE = re.compile(r"^f([1-9][0-9]*)(?:_b([1-9][0-9]*))?$")


@dataclass(frozen=True)
class FunctionId:
    """Parsed function/behaviour id: fN groups a function, fN_bM one behaviour."""

    function_index: int
    behaviour_index: int | None = None

    @property
    def raw(self) -> str:
        if self.behaviour_index is None:
            return f"f{self.function_index}"
        return f"f{self.function_index}_b{self.behaviour_index}"


def parse_function_id(raw: str) -> FunctionId:
    """Parse ``fN`` or ``fN_bM``; raises BadFunctionId otherwise.

    Round-trips exactly: ``parse_function_id(x).raw == x``.
    """
    match = _FUNCTION_ID_RE.match(raw) if isinstance(raw, str) else None
    if match is None:
        raise BadFunctionId(f"{raw!r} is not of the form fN or fN_bM")
    behaviour = match.group(2)
    return FunctionId(int(match.group(1)), int(behaviour) if behaviour else None)


# --- handles and views ------------------------------------------------------


@dataclass(frozen=True)
class DesignRef:
    node_id: int
    kind: str
    unique_id: str


@dataclass(frozen=True)
class ProductRef:
    node_id: int
    product_id: str
    design: DesignRef


@dataclass(frozen=True)
class ClaimRef:
    node_id: int
    claim_id: str


@dataclass(frozen=True)
class GeometryRef:
    node_id: int
    geometric_id: str
    product: ProductRef


@dataclass(frozen=True)
class FgiRef:
    edge_id: int
    from_geometric_id: str
    to_geometric_id: str


@dataclass
class ClaimView:
    node_id: int
    claim_id: str
    text: str
    independent: bool
    extras: dict[str, PropertyValue] = field(default_factory=dict)


@dataclass
class GeometryView:
    node_id: int
    geometric_id: str
    name: str
    patmine_type: str
    abstraction_labels: tuple[str, ...] = ()
    extras: dict[str, PropertyValue] = field(default_factory=dict)

    def type_at_level(self, level: int) -> str:
        """Abstraction label ``level`` steps above the ontology type, clamped."""
        chain = (self.patmine_type,) + self.abstraction_labels
        return chain[min(level, len(chain) - 1)]


@dataclass
class FgiView:
    edge_id: int
    from_geometric_id: str
    to_geometric_id: str
    action: str
    function_ids: list[str]
    function_name: str | None = None
    extras: dict[str, PropertyValue] = field(default_factory=dict)


@dataclass
class ProductView:
    node_id: int
    product_id: str
    name: str
    claims: list[ClaimView] = field(default_factory=list)
    geometries: list[GeometryView] = field(default_factory=list)
    fgis: list[FgiView] = field(default_factory=list)
    extras: dict[str, PropertyValue] = field(default_factory=dict)


@dataclass
class FadDocument:
    """A complete three-level FAD model as read back from the store."""

    node_id: int
    kind: str
    unique_id: str
    title: str
    products: list[ProductView] = field(default_factory=list)
    extras: dict[str, PropertyValue] = field(default_factory=dict)

    def functions(self) -> dict[str, list[tuple[str, FgiView]]]:
        """Function id -> ordered (product_id, FGI) steps realizing it."""
        grouped: dict[str, list[tuple[str, FgiView]]] = {}
        for product in self.products:
            for fgi in product.fgis:
                for fid in fgi.function_ids:
                    grouped.setdefault(fid, []).append((product.product_id, fgi))
        return grouped

    def geometry_count(self) -> int:
        return sum(len(p.geometries) for p in self.products)

    def fgi_count(self) -> int:
        return sum(len(p.fgis) for p in self.products)


@dataclass(frozen=True)
class FunctionStep:
    design: DesignRef
    product: ProductRef
    fgi: FgiView


# --- the knowledge base -----------------------------------------------------


class FadKnowledgeBase:
    """FAD models of patents and emerging designs stored as a labeled graph."""

    def __init__(self, store: GraphStore | None = None, lexicon: Lexicon | None = None):
        self.store = store if store is not None else GraphStore()
        self.lexicon = lexicon if lexicon is not None else Lexicon()
        for kind, key in ID_KEYS.items():
            self.store.add_constraint(kind, key)

    # -- designs --------------------------------------------------------

    def upsert_design(
        self,
        kind: str,
        unique_id: str,
        title: str = "",
        extras: Mapping[str, Any] | None = None,
    ) -> DesignRef:
        """Create or update a design node; idempotent on (kind, unique_id)."""
        self._check_kind(kind)
        if not unique_id:
            raise ValueError("design unique_id must be non-empty")
        id_key = ID_KEYS[kind]
        clean_extras = check_props(extras)
        for reserved in (id_key, "title"):
            clean_extras.pop(reserved, None)
        existing = self.store.find_nodes(kind, id_key, unique_id)
        if existing:
            node = existing[0]
            updates: dict[str, Any] = dict(clean_extras)
            if title:
                updates["title"] = title
            if updates:
                self.store.set_node_props(node.id, updates)
            return DesignRef(node.id, kind, unique_id)
        props: dict[str, Any] = {id_key: unique_id}
        if title:
            props["title"] = title
        props.update(clean_extras)
        node_id = self.store.create_node([kind], props)
        return DesignRef(node_id, kind, unique_id)

    def get_design(self, unique_id: str, kind: str | None = None) -> DesignRef:
        """Resolve a design by unique id, searching both kinds when unspecified.

        Raises:
            UnknownDesign: no design has the id.
            AmbiguousDesign: a patent and an emerging design share it.
        """
        if kind is not None:
            self._check_kind(kind)
            found = self.store.find_nodes(kind, ID_KEYS[kind], unique_id)
            if not found:
                raise UnknownDesign(f"no {kind} with id {unique_id!r}")
            return DesignRef(found[0].id, kind, unique_id)
        hits = [
            DesignRef(node.id, k, unique_id)
            for k in KINDS
            for node in self.store.find_nodes(k, ID_KEYS[k], unique_id)
        ]
        if not hits:
            raise UnknownDesign(f"no design with id {unique_id!r}")
        if len(hits) > 1:
            raise AmbiguousDesign(
                f"id {unique_id!r} names both a patent and an emerging design; pass kind"
            )
        return hits[0]

    def design_ref(self, design: "DesignRef | str", kind: str | None = None) -> DesignRef:
        if isinstance(design, DesignRef):
            if not self.store.has_node(design.node_id):
                raise UnknownDesign(f"design {design.unique_id!r} no longer exists")
            return design
        return self.get_design(design, kind)

    def list_design_refs(self, kind: str | None = None) -> list[DesignRef]:
        """All designs sorted by (unique_id, kind)."""
        kinds = (kind,) if kind is not None else KINDS
        refs = []
        for k in kinds:
            self._check_kind(k)
            for node in self.store.nodes_with_label(k):
                refs.append(DesignRef(node.id, k, str(node.props[ID_KEYS[k]])))
        refs.sort(key=lambda r: (r.unique_id, r.kind))
        return refs

    def delete_design(self, design: "DesignRef | str", kind: str | None = None) -> None:
        """Remove a design and its whole subtree (products, claims, geometries)."""
        ref = self.design_ref(design, kind)
        for product_edge in self.store.out_edges(ref.node_id):
            if product_edge.type != EDGE_HAS_PRODUCT:
                continue
            product_id = product_edge.to_id
            for child_edge in self.store.out_edges(product_id):
                if child_edge.type in (EDGE_HAS_CLAIM, EDGE_HAS_GEOMETRY):
                    self.store.delete_node(child_edge.to_id, cascade=True)
            self.store.delete_node(product_id, cascade=True)
        self.store.delete_node(ref.node_id, cascade=True)

    # -- products, claims ------------------------------------------------

    def add_product(self, design: "DesignRef | str", product_id: str, name: str) -> ProductRef:
        """Attach a product to a design; Product_ID unique per design."""
        ref = self.design_ref(design)
        if not product_id:
            raise ValueError("Product_ID must be non-empty")
        if self._find_child(ref.node_id, EDGE_HAS_PRODUCT, "Product_ID", product_id):
            raise DuplicateProductId(
                f"product {product_id!r} already exists under {ref.unique_id!r}"
            )
        node_id = self.store.create_node(
            [LABEL_PRODUCT], {"Product_ID": product_id, "name": name}
        )
        self.store.create_edge(ref.node_id, node_id, EDGE_HAS_PRODUCT)
        return ProductRef(node_id, product_id, ref)

    def product(self, node_id: int) -> ProductRef:
        """Resolve a product by its node id (the globally unique handle)."""
        try:
            node = self.store.node(node_id)
        except UnknownNode:
            raise UnknownProduct(f"no product node {node_id}") from None
        if node.principal_label != LABEL_PRODUCT:
            raise UnknownProduct(f"node {node_id} is a {node.principal_label}, not a product")
        for edge in self.store.in_edges(node_id):
            if edge.type == EDGE_HAS_PRODUCT:
                owner = self.store.node(edge.from_id)
                kind = owner.principal_label
                ref = DesignRef(owner.id, kind, str(owner.props[ID_KEYS[kind]]))
                return ProductRef(node_id, str(node.props["Product_ID"]), ref)
        raise UnknownProduct(f"product node {node_id} has no owning design")

    def find_product(self, design: "DesignRef | str", product_id: str) -> ProductRef:
        ref = self.design_ref(design)
        node = self._find_child(ref.node_id, EDGE_HAS_PRODUCT, "Product_ID", product_id)
        if node is None:
            raise UnknownProduct(f"no product {product_id!r} under {ref.unique_id!r}")
        return ProductRef(node.id, product_id, ref)

    def add_claim(
        self, product: "ProductRef | int", claim_id: str, text: str, independent: bool = False
    ) -> ClaimRef:
        """Attach a claim to a product; empty text is rejected."""
        ref = self._product_ref(product)
        if not text or not text.strip():
            raise InvalidClaim("claim text must be non-empty")
        node_id = self.store.create_node(
            [LABEL_CLAIM],
            {"claim_id": claim_id, "text": text, "independent": bool(independent)},
        )
        self.store.create_edge(ref.node_id, node_id, EDGE_HAS_CLAIM)
        return ClaimRef(node_id, claim_id)

    # -- geometries and FGIs ----------------------------------------------

    def add_geometry(
        self,
        product: "ProductRef | int",
        geometric_id: str,
        name: str,
        patmine_type: str,
        abstraction_labels: Iterable[str] = (),
    ) -> GeometryRef:
        """Add a geometric feature; records lexicon usage of its ontology type.

        Extra labels carry the is-A abstraction chain, most specific first.

        Raises:
            UnknownProduct, DuplicateGeometricId
        """
        ref = self._product_ref(product)
        if not geometric_id:
            raise ValueError("Geometric_ID must be non-empty")
        if not patmine_type:
            raise ValueError("PatMine_type must be non-empty")
        if self._find_child(ref.node_id, EDGE_HAS_GEOMETRY, "Geometric_ID", geometric_id):
            raise DuplicateGeometricId(
                f"geometry {geometric_id!r} already exists under product {ref.product_id!r}"
            )
        labels = [LABEL_GEOMETRY] + [l for l in abstraction_labels if l]
        node_id = self.store.create_node(
            labels,
            {"Geometric_ID": geometric_id, "name": name, "PatMine_type": patmine_type},
        )
        self.store.create_edge(ref.node_id, node_id, EDGE_HAS_GEOMETRY)
        self.lexicon.record_usage("geometry-type", patmine_type, self._domain_of(ref.design))
        return GeometryRef(node_id, geometric_id, ref)

    def find_geometry(self, product: "ProductRef | int", geometric_id: str) -> GeometryRef:
        ref = self._product_ref(product)
        node = self._find_child(ref.node_id, EDGE_HAS_GEOMETRY, "Geometric_ID", geometric_id)
        if node is None:
            raise UnknownGeometry(
                f"no geometry {geometric_id!r} under product {ref.product_id!r}"
            )
        return GeometryRef(node.id, geometric_id, ref)

    def add_fgi(
        self,
        product: "ProductRef | int",
        from_id: str,
        to_id: str,
        action: str,
        function_ids: Iterable[str],
        function_name: str | None = None,
    ) -> FgiRef:
        """Record a functional interaction between two geometries of the product.

        Every function id must parse (fN or fN_bM) and the list must be
        non-empty. Records lexicon usage of the action.
        """
        ref = self._product_ref(product)
        source = self.find_geometry(ref, from_id)
        target = self.find_geometry(ref, to_id)
        if not action:
            raise ValueError("FGI action must be non-empty")
        ids = [str(f) for f in function_ids]
        if not ids:
            raise BadFunctionId("an FGI needs at least one function id")
        for raw in ids:
            parse_function_id(raw)
        props: dict[str, Any] = {"action": action, "Function_IDs": ids}
        if function_name:
            props["Function_Name"] = function_name
        edge_id = self.store.create_edge(source.node_id, target.node_id, EDGE_HAS_FGI, props)
        self.lexicon.record_usage("action", action, self._domain_of(ref.design))
        return FgiRef(edge_id, from_id, to_id)

    # -- reading back ------------------------------------------------------

    def get_fad(self, design: "DesignRef | str", kind: str | None = None) -> FadDocument:
        """The complete three-level model; missing levels come back empty."""
        ref = self.design_ref(design, kind)
        node = self.store.node(ref.node_id)
        doc = FadDocument(
            node_id=node.id,
            kind=ref.kind,
            unique_id=ref.unique_id,
            title=str(node.props.get("title", "")),
            extras=_extras(node.props, {ID_KEYS[ref.kind], "title"}),
        )
        for edge in self.store.out_edges(ref.node_id):
            if edge.type != EDGE_HAS_PRODUCT:
                continue
            doc.products.append(self._product_view(self.store.node(edge.to_id)))
        doc.products.sort(key=lambda p: p.product_id)
        return doc

    def get_function_structure(self, function_id: str) -> list[FunctionStep]:
        """Every FGI step across the store that lists ``function_id``."""
        steps: list[FunctionStep] = []
        for design in self.list_design_refs():
            for product_edge in self.store.out_edges(design.node_id):
                if product_edge.type != EDGE_HAS_PRODUCT:
                    continue
                product_node = self.store.node(product_edge.to_id)
                product = ProductRef(
                    product_node.id, str(product_node.props["Product_ID"]), design
                )
                for view in self._fgi_views(product_node.id):
                    if function_id in view.function_ids:
                        steps.append(FunctionStep(design, product, view))
        steps.sort(key=lambda s: (s.design.unique_id, s.product.product_id, s.fgi.edge_id))
        return steps

    # -- internals -----------------------------------------------------------

    @staticmethod
    def _check_kind(kind: str) -> None:
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")

    def _product_ref(self, product: "ProductRef | int") -> ProductRef:
        if isinstance(product, ProductRef):
            if not self.store.has_node(product.node_id):
                raise UnknownProduct(f"product {product.product_id!r} no longer exists")
            return product
        return self.product(product)

    def _domain_of(self, design: DesignRef) -> str:
        props = self.store.node(design.node_id).props
        domain = props.get("domain", "")
        return domain if isinstance(domain, str) else ""

    def _find_child(
        self, parent_id: int, edge_type: str, key: str, value: str
    ) -> GraphNode | None:
        for edge in self.store.out_edges(parent_id):
            if edge.type != edge_type:
                continue
            child = self.store.node(edge.to_id)
            if child.props.get(key) == value:
                return child
        return None

    def _product_view(self, node: GraphNode) -> ProductView:
        view = ProductView(
            node_id=node.id,
            product_id=str(node.props.get("Product_ID", "")),
            name=str(node.props.get("name", "")),
            extras=_extras(node.props, {"Product_ID", "name"}),
        )
        for edge in self.store.out_edges(node.id):
            child = self.store.node(edge.to_id)
            if edge.type == EDGE_HAS_CLAIM:
                view.claims.append(
                    ClaimView(
                        node_id=child.id,
                        claim_id=str(child.props.get("claim_id", "")),
                        text=str(child.props.get("text", "")),
                        independent=bool(child.props.get("independent", False)),
                        extras=_extras(child.props, {"claim_id", "text", "independent"}),
                    )
                )
            elif edge.type == EDGE_HAS_GEOMETRY:
                view.geometries.append(
                    GeometryView(
                        node_id=child.id,
                        geometric_id=str(child.props.get("Geometric_ID", "")),
                        name=str(child.props.get("name", "")),
                        patmine_type=str(child.props.get("PatMine_type", "")),
                        abstraction_labels=child.labels[1:],
                        extras=_extras(
                            child.props, {"Geometric_ID", "name", "PatMine_type"}
                        ),
                    )
                )
        view.claims.sort(key=lambda c: (c.claim_id, c.node_id))
        view.geometries.sort(key=lambda g: g.geometric_id)
        view.fgis = self._fgi_views(node.id)
        return view

    def _fgi_views(self, product_node_id: int) -> list[FgiView]:
        views: list[FgiView] = []
        geometry_ids = set()
        by_node: dict[int, str] = {}
        for edge in self.store.out_edges(product_node_id):
            if edge.type == EDGE_HAS_GEOMETRY:
                child = self.store.node(edge.to_id)
                geometry_ids.add(child.id)
                by_node[child.id] = str(child.props.get("Geometric_ID", ""))
        for node_id in geometry_ids:
            for edge in self.store.out_edges(node_id):
                if edge.type != EDGE_HAS_FGI or edge.to_id not in geometry_ids:
                    continue
                raw_ids = edge.props.get("Function_IDs", [])
                function_name = edge.props.get("Function_Name")
                views.append(
                    FgiView(
                        edge_id=edge.id,
                        from_geometric_id=by_node[edge.from_id],
                        to_geometric_id=by_node[edge.to_id],
                        action=str(edge.props.get("action", "")),
                        function_ids=list(raw_ids) if isinstance(raw_ids, list) else [],
                        function_name=str(function_name) if function_name else None,
                        extras=_extras(
                            edge.props, {"action", "Function_IDs", "Function_Name"}
                        ),
                    )
                )
        views.sort(key=lambda f: (f.from_geometric_id, f.to_geometric_id, f.action, f.edge_id))
        return views


def _extras(props: Mapping[str, PropertyValue], reserved: set[str]) -> dict[str, PropertyValue]:
    return {k: v for k, v in props.items() if k not in reserved}
