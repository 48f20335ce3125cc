"""Annotation sheet ingestion and export (UTF-8 CSV, header row required).

Sheets: designs.csv, products.csv, claims.csv, geometries.csv, fgis.csv.
Column headers beyond the schema become extra properties, row contents
their values; empty cells are not stored. Cell lists use ";" internally.

Import is partial-failure: rows referencing undefined entities (or
otherwise invalid) are reported per row and skipped, everything else is
applied. Re-importing an exported bundle merges instead of duplicating,
so export then import is the identity on the model.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import (
    AmbiguousDesign,
    CsvFormatError,
    PatGraphError,
)
from .model import (
    EDGE_HAS_PRODUCT,
    ID_KEYS,
    KINDS,
    DesignRef,
    FadKnowledgeBase,
    ProductRef,
)

SHEET_DESIGNS = "designs.csv"
SHEET_PRODUCTS = "products.csv"
SHEET_CLAIMS = "claims.csv"
SHEET_GEOMETRIES = "geometries.csv"
SHEET_FGIS = "fgis.csv"

SHEETS = (SHEET_DESIGNS, SHEET_PRODUCTS, SHEET_CLAIMS, SHEET_GEOMETRIES, SHEET_FGIS)

_SCHEMA = {
    SHEET_DESIGNS: ["kind", "unique_id", "title"],
    SHEET_PRODUCTS: ["design_id", "product_id", "name"],
    SHEET_CLAIMS: ["product_id", "claim_id", "independent", "text"],
    SHEET_GEOMETRIES: ["product_id", "geometric_id", "name", "patmine_type", "labels"],
    SHEET_FGIS: ["product_id", "from_id", "to_id", "action", "function_ids", "function_name"],
}

LIST_SEPARATOR = ";"


@dataclass(frozen=True)
class RowError:
    sheet: str
    row: int
    message: str


@dataclass
class ImportReport:
    """Per-sheet created/merged tallies plus the skipped rows."""

    created: dict[str, int] = field(default_factory=lambda: {s: 0 for s in SHEETS})
    merged: dict[str, int] = field(default_factory=lambda: {s: 0 for s in SHEETS})
    errors: list[RowError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def total_created(self) -> int:
        return sum(self.created.values())

    def total_merged(self) -> int:
        return sum(self.merged.values())


class _Ambiguous:
    pass


_AMBIGUOUS = _Ambiguous()


def import_annotation_csv(
    kb: FadKnowledgeBase, source: "str | Path | Mapping[str, str]"
) -> ImportReport:
    """Load annotation sheets from a directory or a {sheet name: csv text} map.

    Missing sheets are treated as empty. Raises CsvFormatError only for
    structural problems (missing schema columns); row-level problems land
    in the report and the row is skipped.
    """
    sheets = _read_sheets(source)
    report = ImportReport()
    bundle_products: dict[str, "ProductRef | _Ambiguous"] = {}

    for row_num, row in _rows(sheets, SHEET_DESIGNS):
        kind = (row.get("kind") or "").strip()
        unique_id = (row.get("unique_id") or "").strip()
        if kind not in KINDS:
            report.errors.append(RowError(SHEET_DESIGNS, row_num, f"unknown kind {kind!r}"))
            continue
        if not unique_id:
            report.errors.append(RowError(SHEET_DESIGNS, row_num, "empty unique_id"))
            continue
        extras = _extra_cells(row, _SCHEMA[SHEET_DESIGNS])
        try:
            existed = _design_exists(kb, kind, unique_id)
            kb.upsert_design(kind, unique_id, title=(row.get("title") or "").strip(), extras=extras)
        except PatGraphError as exc:
            report.errors.append(RowError(SHEET_DESIGNS, row_num, str(exc)))
            continue
        _tally(report, SHEET_DESIGNS, merged=existed)

    for row_num, row in _rows(sheets, SHEET_PRODUCTS):
        design_id = (row.get("design_id") or "").strip()
        product_id = (row.get("product_id") or "").strip()
        name = (row.get("name") or "").strip()
        if not design_id or not product_id:
            report.errors.append(
                RowError(SHEET_PRODUCTS, row_num, "design_id and product_id are required")
            )
            continue
        try:
            design = kb.get_design(design_id)
        except (PatGraphError, AmbiguousDesign) as exc:
            report.errors.append(RowError(SHEET_PRODUCTS, row_num, str(exc)))
            continue
        try:
            existing = _existing_product(kb, design, product_id)
            if existing is not None:
                if name:
                    kb.store.set_node_props(existing.node_id, {"name": name})
                product = existing
                _tally(report, SHEET_PRODUCTS, merged=True)
            else:
                product = kb.add_product(design, product_id, name)
                _tally(report, SHEET_PRODUCTS, merged=False)
        except PatGraphError as exc:
            report.errors.append(RowError(SHEET_PRODUCTS, row_num, str(exc)))
            continue
        extras = _extra_cells(row, _SCHEMA[SHEET_PRODUCTS])
        if extras:
            kb.store.set_node_props(product.node_id, extras)
        _remember_product(bundle_products, product_id, product)

    for row_num, row in _rows(sheets, SHEET_CLAIMS):
        product = _resolve_product(kb, bundle_products, row.get("product_id"))
        if isinstance(product, str):
            report.errors.append(RowError(SHEET_CLAIMS, row_num, product))
            continue
        claim_id = (row.get("claim_id") or "").strip()
        text = row.get("text") or ""
        independent = _parse_bool(row.get("independent"))
        if independent is None:
            report.errors.append(
                RowError(SHEET_CLAIMS, row_num, f"bad boolean {row.get('independent')!r}")
            )
            continue
        extras = _extra_cells(row, _SCHEMA[SHEET_CLAIMS])
        try:
            existing = _existing_claim(kb, product, claim_id)
            if existing is not None:
                kb.store.set_node_props(
                    existing, {"text": text, "independent": independent, **extras}
                )
                _tally(report, SHEET_CLAIMS, merged=True)
            else:
                claim = kb.add_claim(product, claim_id, text, independent)
                if extras:
                    kb.store.set_node_props(claim.node_id, extras)
                _tally(report, SHEET_CLAIMS, merged=False)
        except PatGraphError as exc:
            report.errors.append(RowError(SHEET_CLAIMS, row_num, str(exc)))

    for row_num, row in _rows(sheets, SHEET_GEOMETRIES):
        product = _resolve_product(kb, bundle_products, row.get("product_id"))
        if isinstance(product, str):
            report.errors.append(RowError(SHEET_GEOMETRIES, row_num, product))
            continue
        geometric_id = (row.get("geometric_id") or "").strip()
        name = (row.get("name") or "").strip()
        patmine_type = (row.get("patmine_type") or "").strip()
        labels = _split_list(row.get("labels"))
        extras = _extra_cells(row, _SCHEMA[SHEET_GEOMETRIES])
        try:
            existing = _existing_geometry(kb, product, geometric_id)
            if existing is not None:
                updates = {"name": name, "PatMine_type": patmine_type, **extras}
                kb.store.set_node_props(existing, updates)
                _tally(report, SHEET_GEOMETRIES, merged=True)
            else:
                geometry = kb.add_geometry(product, geometric_id, name, patmine_type, labels)
                if extras:
                    kb.store.set_node_props(geometry.node_id, extras)
                _tally(report, SHEET_GEOMETRIES, merged=False)
        except (PatGraphError, ValueError) as exc:
            report.errors.append(RowError(SHEET_GEOMETRIES, row_num, str(exc)))

    for row_num, row in _rows(sheets, SHEET_FGIS):
        product = _resolve_product(kb, bundle_products, row.get("product_id"))
        if isinstance(product, str):
            report.errors.append(RowError(SHEET_FGIS, row_num, product))
            continue
        from_id = (row.get("from_id") or "").strip()
        to_id = (row.get("to_id") or "").strip()
        action = (row.get("action") or "").strip()
        function_ids = _split_list(row.get("function_ids"))
        function_name = (row.get("function_name") or "").strip() or None
        extras = _extra_cells(row, _SCHEMA[SHEET_FGIS])
        try:
            if _fgi_exists(kb, product, from_id, to_id, action, function_ids, function_name):
                _tally(report, SHEET_FGIS, merged=True)
            else:
                fgi = kb.add_fgi(product, from_id, to_id, action, function_ids, function_name)
                if extras:
                    kb.store.set_edge_props(fgi.edge_id, extras)
                _tally(report, SHEET_FGIS, merged=False)
        except (PatGraphError, ValueError) as exc:
            report.errors.append(RowError(SHEET_FGIS, row_num, str(exc)))

    return report


def export_annotation_csv(
    kb: FadKnowledgeBase, design: "DesignRef | str", kind: str | None = None
) -> dict[str, str]:
    """Render one design's model as the five annotation sheets."""
    doc = kb.get_fad(design, kind)

    design_extras = sorted(doc.extras)
    out: dict[str, str] = {}
    out[SHEET_DESIGNS] = _write_rows(
        _SCHEMA[SHEET_DESIGNS] + design_extras,
        [
            [doc.kind, doc.unique_id, doc.title]
            + [_cell(doc.extras.get(k)) for k in design_extras]
        ],
    )

    product_extras = sorted({k for p in doc.products for k in p.extras})
    out[SHEET_PRODUCTS] = _write_rows(
        _SCHEMA[SHEET_PRODUCTS] + product_extras,
        [
            [doc.unique_id, p.product_id, p.name]
            + [_cell(p.extras.get(k)) for k in product_extras]
            for p in doc.products
        ],
    )

    claim_extras = sorted({k for p in doc.products for c in p.claims for k in c.extras})
    out[SHEET_CLAIMS] = _write_rows(
        _SCHEMA[SHEET_CLAIMS] + claim_extras,
        [
            [p.product_id, c.claim_id, _cell(c.independent), c.text]
            + [_cell(c.extras.get(k)) for k in claim_extras]
            for p in doc.products
            for c in p.claims
        ],
    )

    geometry_extras = sorted({k for p in doc.products for g in p.geometries for k in g.extras})
    out[SHEET_GEOMETRIES] = _write_rows(
        _SCHEMA[SHEET_GEOMETRIES] + geometry_extras,
        [
            [
                p.product_id,
                g.geometric_id,
                g.name,
                g.patmine_type,
                LIST_SEPARATOR.join(g.abstraction_labels),
            ]
            + [_cell(g.extras.get(k)) for k in geometry_extras]
            for p in doc.products
            for g in p.geometries
        ],
    )

    fgi_extras = sorted({k for p in doc.products for f in p.fgis for k in f.extras})
    out[SHEET_FGIS] = _write_rows(
        _SCHEMA[SHEET_FGIS] + fgi_extras,
        [
            [
                p.product_id,
                f.from_geometric_id,
                f.to_geometric_id,
                f.action,
                LIST_SEPARATOR.join(f.function_ids),
                f.function_name or "",
            ]
            + [_cell(f.extras.get(k)) for k in fgi_extras]
            for p in doc.products
            for f in p.fgis
        ],
    )
    return out


def write_annotation_csv(
    kb: FadKnowledgeBase, design: "DesignRef | str", out_dir: "str | Path", kind: str | None = None
) -> list[Path]:
    """Write the five sheets of a design into ``out_dir``; returns the paths."""
    sheets = export_annotation_csv(kb, design, kind)
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in SHEETS:
        path = directory / name
        path.write_text(sheets[name], encoding="utf-8")
        written.append(path)
    return written


# --- helpers -----------------------------------------------------------------


def _read_sheets(source: "str | Path | Mapping[str, str]") -> dict[str, str]:
    if isinstance(source, Mapping):
        return {name: text for name, text in source.items() if name in SHEETS}
    directory = Path(source)
    found = {}
    for name in SHEETS:
        path = directory / name
        if path.exists():
            found[name] = path.read_text(encoding="utf-8")
    return found


def _rows(sheets: dict[str, str], name: str):
    """Yield (1-based row number, dict row) pairs; header is row 1."""
    text = sheets.get(name)
    if text is None or not text.strip():
        return
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in _SCHEMA[name] if c not in header]
    if missing:
        raise CsvFormatError(name, 1, f"missing required columns: {', '.join(missing)}")
    for row_num, row in enumerate(reader, start=2):
        yield row_num, row


def _extra_cells(row: Mapping, schema: list[str]) -> dict[str, str]:
    extras = {}
    for key, value in row.items():
        if key is None or key in schema:
            continue
        if value is None or value == "":
            continue
        extras[key] = value
    return extras


def _write_rows(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _split_list(cell: "str | None") -> list[str]:
    if not cell:
        return []
    return [item.strip() for item in cell.split(LIST_SEPARATOR) if item.strip()]


_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no", ""}


def _parse_bool(cell: "str | None") -> "bool | None":
    text = (cell or "").strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    return None


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return LIST_SEPARATOR.join(str(v) for v in value)
    return str(value)


def _tally(report: ImportReport, sheet: str, merged: bool) -> None:
    if merged:
        report.merged[sheet] += 1
    else:
        report.created[sheet] += 1


def _design_exists(kb: FadKnowledgeBase, kind: str, unique_id: str) -> bool:
    return bool(kb.store.find_nodes(kind, ID_KEYS[kind], unique_id))


def _existing_product(kb, design: DesignRef, product_id: str) -> "ProductRef | None":
    for edge in kb.store.out_edges(design.node_id):
        if edge.type != EDGE_HAS_PRODUCT:
            continue
        node = kb.store.node(edge.to_id)
        if node.props.get("Product_ID") == product_id:
            return ProductRef(node.id, product_id, design)
    return None


def _existing_claim(kb, product: ProductRef, claim_id: str) -> "int | None":
    for edge in kb.store.out_edges(product.node_id):
        if edge.type == "hasClaim":
            node = kb.store.node(edge.to_id)
            if node.props.get("claim_id") == claim_id:
                return node.id
    return None


def _existing_geometry(kb, product: ProductRef, geometric_id: str) -> "int | None":
    for edge in kb.store.out_edges(product.node_id):
        if edge.type == "hasGeometry":
            node = kb.store.node(edge.to_id)
            if node.props.get("Geometric_ID") == geometric_id:
                return node.id
    return None


def _fgi_exists(kb, product, from_id, to_id, action, function_ids, function_name) -> bool:
    for view in kb.get_fad(product.design).products:
        if view.product_id != product.product_id:
            continue
        for fgi in view.fgis:
            if (
                fgi.from_geometric_id == from_id
                and fgi.to_geometric_id == to_id
                and fgi.action == action
                and fgi.function_ids == list(function_ids)
                and (fgi.function_name or None) == (function_name or None)
            ):
                return True
    return False


def _remember_product(bundle: dict, product_id: str, product: ProductRef) -> None:
    known = bundle.get(product_id)
    if known is None:
        bundle[product_id] = product
    elif isinstance(known, ProductRef) and known.node_id != product.node_id:
        bundle[product_id] = _AMBIGUOUS


def _resolve_product(kb, bundle: dict, cell: "str | None"):
    """ProductRef for a sheet's product_id cell, or an error message string."""
    product_id = (cell or "").strip()
    if not product_id:
        return "empty product_id"
    known = bundle.get(product_id)
    if isinstance(known, ProductRef):
        return known
    if known is _AMBIGUOUS:
        return f"product_id {product_id!r} is ambiguous within this bundle"
    matches = []
    for design in kb.list_design_refs():
        found = _existing_product(kb, design, product_id)
        if found is not None:
            matches.append(found)
    if not matches:
        return f"unknown product_id {product_id!r}"
    if len(matches) > 1:
        return f"product_id {product_id!r} matches products of several designs"
    return matches[0]
