"""HTTP facade over the knowledge base for the web UI and external clients.

Every endpoint is a thin mapping onto one library operation; mutations are
validated before any write so a failed request leaves the store unchanged.
Raw PatQL queries are read-only: mutation statements are rejected outright.

Error statuses: validation 400, unknown id 404, constraint conflicts 409,
PatQL parse errors 422 (with line/col payload), attempted mutation 403.
"""

from __future__ import annotations

import logging
import socket
from contextlib import asynccontextmanager
from dataclasses import asdict
from pathlib import Path

from fastapi import Body, FastAPI, Request, UploadFile
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from . import csvio, patql, scoring, search, viz
from .config import ServiceConfig
from .errors import (
    AmbiguousDesign,
    BadFunctionId,
    BadRegex,
    BindFailure,
    ConstraintViolation,
    CsvFormatError,
    DuplicateGeometricId,
    DuplicateProductId,
    EmptyCorpus,
    EmptyLabels,
    FormatError,
    InvalidClaim,
    InvalidPropertyValue,
    IoFailure,
    NodeInUse,
    ParseError,
    PatGraphError,
    PreexistingDuplicates,
    SnapshotLoadFailure,
    UnknownDesign,
    UnknownEdge,
    UnknownGeometry,
    UnknownNode,
    UnknownProduct,
    UnknownVariable,
)
from .lexicon import Lexicon, OntologyTerm
from .model import FadDocument, FadKnowledgeBase
from .store import GraphStore

logger = logging.getLogger("patgraph.service")

_STATUS_BY_ERROR = {
    UnknownDesign: 404,
    UnknownProduct: 404,
    UnknownGeometry: 404,
    UnknownNode: 404,
    UnknownEdge: 404,
    ConstraintViolation: 409,
    DuplicateProductId: 409,
    DuplicateGeometricId: 409,
    PreexistingDuplicates: 409,
    NodeInUse: 409,
    ParseError: 422,
    AmbiguousDesign: 400,
    BadFunctionId: 400,
    BadRegex: 400,
    CsvFormatError: 400,
    EmptyCorpus: 400,
    EmptyLabels: 400,
    InvalidClaim: 400,
    InvalidPropertyValue: 400,
    UnknownVariable: 400,
    IoFailure: 500,
    FormatError: 500,
}

_MUTATION_WORDS = {"create", "merge", "set", "delete", "detach", "remove", "drop"}


def load_knowledge_base(config: ServiceConfig) -> FadKnowledgeBase:
    """Build the knowledge base from the configured snapshot and lexicon.

    Raises SnapshotLoadFailure rather than starting over corrupt data.
    """
    store = None
    if config.snapshot_path and Path(config.snapshot_path).exists():
        try:
            store = GraphStore.snapshot_load(config.snapshot_path)
        except (IoFailure, FormatError) as exc:
            raise SnapshotLoadFailure(f"refusing to start: {exc}") from exc
    lexicon = None
    if config.lexicon_path and Path(config.lexicon_path).exists():
        lexicon = Lexicon.load_csv(config.lexicon_path)
    return FadKnowledgeBase(store=store, lexicon=lexicon)


def persist(kb: FadKnowledgeBase, config: ServiceConfig) -> None:
    if config.snapshot_path:
        kb.store.snapshot_save(config.snapshot_path)
    if config.lexicon_path:
        kb.lexicon.save_csv(config.lexicon_path)


def create_app(kb: FadKnowledgeBase, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        persist(kb, config)

    app = FastAPI(title="patgraph", lifespan=lifespan)
    app.state.kb = kb
    app.state.config = config

    @app.exception_handler(PatGraphError)
    async def domain_error(request: Request, exc: PatGraphError):
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        payload: dict = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, ParseError):
            payload.update({"line": exc.line, "col": exc.col, "expected": list(exc.expected)})
        return JSONResponse(status_code=status, content=payload)

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    # -- designs -----------------------------------------------------------

    @app.post("/designs", status_code=201)
    def create_design(payload: dict = Body(...)):
        ref = kb.upsert_design(
            _required(payload, "kind"),
            _required(payload, "unique_id"),
            title=str(payload.get("title", "")),
            extras=payload.get("extras") or {},
        )
        return _design_summary(kb, ref)

    @app.get("/designs")
    def get_designs(kind: str | None = None, page: int = 1, page_size: int | None = None):
        result = search.list_designs(
            kb, kind=kind, page=page, page_size=page_size or config.page_size
        )
        return {
            "items": [asdict(item) for item in result.items],
            "page": result.page,
            "page_size": result.page_size,
            "page_count": result.page_count,
            "total": result.total,
            "first_page": result.first_page,
            "prev_page": result.prev_page,
            "next_page": result.next_page,
            "last_page": result.last_page,
        }

    @app.get("/designs/{design_id}/fad")
    def get_fad(design_id: str, kind: str | None = None):
        return _fad_json(kb.get_fad(design_id, kind))

    @app.put("/designs/{design_id}")
    def update_design(design_id: str, payload: dict = Body(...)):
        ref = kb.get_design(design_id, payload.get("kind"))
        updated = kb.upsert_design(
            ref.kind,
            ref.unique_id,
            title=str(payload.get("title", "")),
            extras=payload.get("extras") or {},
        )
        return _design_summary(kb, updated)

    @app.delete("/designs/{design_id}", status_code=204)
    def delete_design(design_id: str, kind: str | None = None):
        kb.delete_design(design_id, kind)

    # -- annotation --------------------------------------------------------

    @app.post("/designs/{design_id}/products", status_code=201)
    def add_product(design_id: str, payload: dict = Body(...)):
        ref = kb.add_product(
            design_id, _required(payload, "product_id"), str(payload.get("name", ""))
        )
        return {"node_id": ref.node_id, "product_id": ref.product_id,
                "design_id": ref.design.unique_id}

    @app.post("/products/{node_id}/claims", status_code=201)
    def add_claim(node_id: int, payload: dict = Body(...)):
        ref = kb.add_claim(
            node_id,
            _required(payload, "claim_id"),
            _required(payload, "text"),
            bool(payload.get("independent", False)),
        )
        return {"node_id": ref.node_id, "claim_id": ref.claim_id}

    @app.post("/products/{node_id}/geometries", status_code=201)
    def add_geometry(node_id: int, payload: dict = Body(...)):
        ref = kb.add_geometry(
            node_id,
            _required(payload, "geometric_id"),
            _required(payload, "name"),
            _required(payload, "patmine_type"),
            payload.get("abstraction_labels") or (),
        )
        return {"node_id": ref.node_id, "geometric_id": ref.geometric_id}

    @app.post("/products/{node_id}/fgis", status_code=201)
    def add_fgi(node_id: int, payload: dict = Body(...)):
        ref = kb.add_fgi(
            node_id,
            _required(payload, "from_id"),
            _required(payload, "to_id"),
            _required(payload, "action"),
            payload.get("function_ids") or [],
            payload.get("function_name") or None,
        )
        return {"edge_id": ref.edge_id, "from_id": ref.from_geometric_id,
                "to_id": ref.to_geometric_id}

    # -- bulk sheets ---------------------------------------------------------

    @app.post("/import")
    async def import_sheets(files: list[UploadFile]):
        sheets = {}
        for upload in files:
            name = Path(upload.filename or "").name
            sheets[name] = (await upload.read()).decode("utf-8")
        report = csvio.import_annotation_csv(kb, sheets)
        return {
            "created": report.created,
            "merged": report.merged,
            "errors": [asdict(e) for e in report.errors],
            "ok": report.ok,
        }

    @app.get("/designs/{design_id}/export")
    def export_sheets(design_id: str, kind: str | None = None):
        return {"files": csvio.export_annotation_csv(kb, design_id, kind)}

    # -- search ----------------------------------------------------------------

    @app.post("/search")
    def run_search(payload: dict = Body(...)):
        mode = _required(payload, "mode")
        if mode == "fulltext":
            hits = search.fulltext_search(
                kb,
                payload.get("keywords") or [],
                expand_synonyms=bool(payload.get("expand_synonyms", False)),
                kind=payload.get("kind"),
            )
            return {"mode": mode, "hits": [_hit_json(h) for h in hits]}
        if mode == "semantic":
            hits = search.semantic_search(kb, payload.get("fields") or {},
                                          kind=payload.get("kind"))
            return {"mode": mode, "hits": [_hit_json(h) for h in hits]}
        if mode == "raw":
            raw_query = payload.get("raw_query")
            if not raw_query:
                raise ValueError("raw mode needs raw_query")
            _reject_mutations(raw_query)
            ast = patql.parse_query(raw_query)
            rows = patql.execute_query(kb.store, ast)
            columns = [item.name for item in ast.returns]
            return {
                "mode": mode,
                "columns": columns,
                "rows": [{name: _cell_json(row[name]) for name in columns} for row in rows],
                "graph": viz.rows_to_graphjson(rows),
            }
        raise ValueError(f"unknown search mode {mode!r}")

    @app.get("/functions/{function_id}/structure")
    def function_structure(function_id: str):
        steps = kb.get_function_structure(function_id)
        return {
            "function_id": function_id,
            "steps": [
                {
                    "design_id": step.design.unique_id,
                    "kind": step.design.kind,
                    "product_id": step.product.product_id,
                    "fgi": _fgi_json(step.fgi),
                }
                for step in steps
            ],
        }

    # -- scoring -----------------------------------------------------------------

    @app.post("/designs/{design_id}/score")
    def score(design_id: str, payload: dict = Body(default={})):
        weights = scoring.DEFAULT_WEIGHTS
        if payload.get("weights"):
            given = payload["weights"]
            weights = scoring.ScoringWeights(
                geometry=float(given.get("geometry", 10)),
                fgi=float(given.get("fgi", 20)),
                function=float(given.get("function", 30)),
                divisor=float(given.get("divisor", 60)),
            )
        results = scoring.score_corpus(
            kb,
            design_id,
            kind=payload.get("kind", scoring.KIND_DEFAULT_CORPUS),
            weights=weights,
            action_synonyms=bool(payload.get("action_synonyms", False)),
        )
        return {"design_id": design_id, "results": [_score_json(r) for r in results]}

    # -- visualization --------------------------------------------------------------

    @app.get("/designs/{design_id}/viz")
    def get_viz(
        design_id: str,
        format: str = "graphjson",
        level: str = "designer-name",
        highlight: str | None = None,
        projection: str = "full",
    ):
        if format == "dot":
            report = (
                scoring.compute_overlap(kb, design_id, highlight) if highlight else None
            )
            text = viz.to_dot(kb, design_id, viz.AbstractionLevel.parse(level), report)
            return PlainTextResponse(text, media_type="text/vnd.graphviz")
        if format == "graphjson":
            return viz.design_to_graphjson(kb, design_id, projection=projection)
        raise ValueError(f"unknown viz format {format!r}")

    # -- lexicon ------------------------------------------------------------------

    @app.get("/lexicon")
    def get_lexicon(category: str | None = None):
        return {"terms": [asdict(term) for term in kb.lexicon.terms(category)]}

    @app.post("/lexicon", status_code=201)
    def add_lexicon_term(payload: dict = Body(...)):
        term = kb.lexicon.add_term(
            OntologyTerm(
                category=_required(payload, "category"),
                term=_required(payload, "term"),
                domain=str(payload.get("domain", "")),
                usage_count=int(payload.get("usage_count", 0)),
                parent=payload.get("parent") or None,
                synonyms=tuple(payload.get("synonyms") or ()),
                user_defined=True,
            )
        )
        return asdict(term)

    @app.post("/lexicon/usage")
    def record_usage(payload: dict = Body(...)):
        count = kb.lexicon.record_usage(
            _required(payload, "category"),
            _required(payload, "term"),
            str(payload.get("domain", "")),
        )
        return {"term": payload["term"], "count": count}

    # -- documents --------------------------------------------------------------------

    @app.get("/patents/{design_id}/document")
    def get_document(design_id: str):
        if not config.document_dir:
            raise UnknownDesign("no patent-document directory configured")
        if "/" in design_id or ".." in design_id:
            raise ValueError("invalid document id")
        directory = Path(config.document_dir)
        exact = directory / design_id
        if exact.is_file():
            return FileResponse(exact)
        candidates = sorted(directory.glob(design_id + ".*"))
        for candidate in candidates:
            if candidate.is_file():
                return FileResponse(candidate)
        raise UnknownDesign(f"no stored document for {design_id!r}")

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted; persists snapshot and lexicon on shutdown."""
    import uvicorn

    config.validate_paths()
    _check_bindable(config.listen_host, config.listen_port)
    kb = load_knowledge_base(config)
    app = create_app(kb, config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")


def _check_bindable(host: str, port: int) -> None:
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            probe.bind((host, port))
        finally:
            probe.close()
    except OSError as exc:
        raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc


def _reject_mutations(raw_query: str) -> None:
    """403-style guard: raw queries may not contain mutation statements."""
    try:
        tokens = patql._tokenize(raw_query)
    except ParseError:
        return  # let the parser report the real position
    depth = 0
    for token in tokens:
        if token.kind in ("LPAREN", "LBRACKET", "LBRACE"):
            depth += 1
        elif token.kind in ("RPAREN", "RBRACKET", "RBRACE"):
            depth = max(0, depth - 1)
        elif token.kind == "IDENT" and depth == 0:
            if token.text.casefold() in _MUTATION_WORDS:
                raise MutationRejected(
                    f"raw queries are read-only; {token.text!r} is not allowed"
                )


class MutationRejected(PatGraphError):
    """Raw PatQL tried to mutate the corpus."""


_STATUS_BY_ERROR[MutationRejected] = 403


# --- serialization helpers -------------------------------------------------------


def _required(payload: dict, key: str):
    value = payload.get(key)
    if value is None or value == "":
        raise ValueError(f"missing required field {key!r}")
    return value


def _design_summary(kb: FadKnowledgeBase, ref) -> dict:
    node = kb.store.node(ref.node_id)
    return {
        "node_id": ref.node_id,
        "kind": ref.kind,
        "unique_id": ref.unique_id,
        "title": str(node.props.get("title", "")),
    }


def _fad_json(doc: FadDocument) -> dict:
    return {
        "node_id": doc.node_id,
        "kind": doc.kind,
        "unique_id": doc.unique_id,
        "title": doc.title,
        "extras": doc.extras,
        "products": [
            {
                "node_id": p.node_id,
                "product_id": p.product_id,
                "name": p.name,
                "extras": p.extras,
                "claims": [
                    {
                        "node_id": c.node_id,
                        "claim_id": c.claim_id,
                        "text": c.text,
                        "independent": c.independent,
                        "extras": c.extras,
                    }
                    for c in p.claims
                ],
                "geometries": [
                    {
                        "node_id": g.node_id,
                        "geometric_id": g.geometric_id,
                        "name": g.name,
                        "patmine_type": g.patmine_type,
                        "abstraction_labels": list(g.abstraction_labels),
                        "extras": g.extras,
                    }
                    for g in p.geometries
                ],
                "fgis": [_fgi_json(f) for f in p.fgis],
            }
            for p in doc.products
        ],
    }


def _fgi_json(fgi) -> dict:
    return {
        "edge_id": fgi.edge_id,
        "from_id": fgi.from_geometric_id,
        "to_id": fgi.to_geometric_id,
        "action": fgi.action,
        "function_ids": list(fgi.function_ids),
        "function_name": fgi.function_name,
        "extras": fgi.extras,
    }


def _hit_json(hit) -> dict:
    return {
        "unique_id": hit.unique_id,
        "kind": hit.kind,
        "match_rank": hit.match_rank,
        "items": [asdict(item) for item in hit.items],
    }


def _score_json(result) -> dict:
    counts = result.counts
    return {
        "unique_id": result.unique_id,
        "kind": result.kind,
        "raw": result.score.raw,
        "normalized": result.score.normalized,
        "counts": {
            "geometries": counts.geometries,
            "fgis": counts.fgis,
            "functions": counts.functions,
        },
        "overlap": {
            "geometry_pairs": [
                [asdict(a), asdict(b)] for a, b in result.overlap.geometry_pairs
            ],
            "fgi_pairs": [[asdict(a), asdict(b)] for a, b in result.overlap.fgi_pairs],
            "function_pairs": [list(pair) for pair in result.overlap.function_pairs],
        },
    }


def _cell_json(value):
    from .pattern import ABSENT
    from .store import GraphEdge, GraphNode

    if value is ABSENT:
        return None
    if isinstance(value, GraphNode):
        return {"kind": "node", "id": value.id, "labels": list(value.labels),
                "properties": {k: value.props[k] for k in sorted(value.props)}}
    if isinstance(value, GraphEdge):
        return {"kind": "edge", "id": value.id, "type": value.type,
                "source": value.from_id, "target": value.to_id,
                "properties": {k: value.props[k] for k in sorted(value.props)}}
    return value
