"""HTTP facade: endpoint behavior, error statuses, parity with library calls."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from patgraph import scoring, search, viz
from patgraph.config import ServiceConfig
from patgraph.csvio import export_annotation_csv
from patgraph.errors import BindFailure, SnapshotLoadFailure
from patgraph.model import FadKnowledgeBase
from patgraph.service import create_app, load_knowledge_base, serve

from conftest import build_corkscrew, sample_lexicon
from test_csvio import CORKSCREW_SHEETS


@pytest.fixture
def client(corpus_kb) -> TestClient:
    return TestClient(create_app(corpus_kb, ServiceConfig()))


@pytest.fixture
def empty_client(kb) -> TestClient:
    return TestClient(create_app(kb, ServiceConfig()))


class TestDesignEndpoints:
    def test_empty_store_listing(self, empty_client):
        response = empty_client.get("/designs")
        assert response.status_code == 200
        body = response.json()
        assert body["items"] == [] and body["total"] == 0

    def test_create_then_fad_round_trip(self, empty_client, kb):
        created = empty_client.post(
            "/designs",
            json={"kind": "emergDesign", "unique_id": "c.sldprt", "title": "C"},
        )
        assert created.status_code == 201
        design = created.json()
        product = empty_client.post(
            f"/designs/{design['unique_id']}/products",
            json={"product_id": "P1", "name": "thing"},
        ).json()
        for gid, name, typ in (("g1", "latch", "lever"), ("g2", "cover", "lid")):
            response = empty_client.post(
                f"/products/{product['node_id']}/geometries",
                json={"geometric_id": gid, "name": name, "patmine_type": typ},
            )
            assert response.status_code == 201
        response = empty_client.post(
            f"/products/{product['node_id']}/fgis",
            json={"from_id": "g1", "to_id": "g2", "action": "press",
                  "function_ids": ["f1"]},
        )
        assert response.status_code == 201
        fad = empty_client.get("/designs/c.sldprt/fad").json()
        # parity with the library's own document
        assert fad == _fad_via_library(kb, "c.sldprt")
        assert len(fad["products"][0]["geometries"]) == 2
        assert len(fad["products"][0]["fgis"]) == 1

    def test_listing_pages_match_library(self, client, corpus_kb):
        body = client.get("/designs", params={"page_size": 2}).json()
        page = search.list_designs(corpus_kb, page_size=2)
        assert body["total"] == page.total
        assert [i["unique_id"] for i in body["items"]] == [
            i.unique_id for i in page.items
        ]
        assert body["last_page"] == page.last_page

    def test_unknown_design_404(self, client):
        assert client.get("/designs/ghost/fad").status_code == 404

    def test_duplicate_product_409(self, client):
        fad = client.get("/designs/corkscrew.sldprt/fad").json()
        node_id = fad["products"][0]["node_id"]
        response = client.post(
            "/designs/corkscrew.sldprt/products",
            json={"product_id": "P1", "name": "again"},
        )
        assert response.status_code == 409
        # store unchanged: still one product
        fad_after = client.get("/designs/corkscrew.sldprt/fad").json()
        assert len(fad_after["products"]) == 1
        assert fad_after["products"][0]["node_id"] == node_id

    def test_missing_field_400(self, client):
        assert client.post("/designs", json={"kind": "patent"}).status_code == 400

    def test_delete(self, client):
        assert client.delete("/designs/corkscrew.sldprt").status_code == 204
        assert client.get("/designs/corkscrew.sldprt/fad").status_code == 404

    def test_put_updates_title(self, client):
        response = client.put("/designs/US0000001", json={"title": "Renamed"})
        assert response.status_code == 200
        assert response.json()["title"] == "Renamed"

    def test_bad_function_id_400(self, client):
        fad = client.get("/designs/corkscrew.sldprt/fad").json()
        node_id = fad["products"][0]["node_id"]
        response = client.post(
            f"/products/{node_id}/fgis",
            json={"from_id": "g1", "to_id": "g2", "action": "x",
                  "function_ids": ["nope"]},
        )
        assert response.status_code == 400


class TestImportExport:
    def test_multipart_import(self, empty_client):
        files = [
            ("files", (name, text.encode(), "text/csv"))
            for name, text in CORKSCREW_SHEETS.items()
        ]
        response = empty_client.post("/import", files=files)
        assert response.status_code == 200
        body = response.json()
        assert body["ok"] is True
        assert body["created"]["geometries.csv"] == 3
        assert empty_client.get("/designs/corkscrew.sldprt/fad").status_code == 200

    def test_export_parity(self, client, corpus_kb):
        body = client.get("/designs/corkscrew.sldprt/export").json()
        assert body["files"] == export_annotation_csv(corpus_kb, "corkscrew.sldprt")

    def test_import_report_carries_row_errors(self, empty_client):
        sheets = dict(CORKSCREW_SHEETS)
        sheets["fgis.csv"] += "P1,g1,g99,cuts,f2,\n"
        files = [
            ("files", (name, text.encode(), "text/csv"))
            for name, text in sheets.items()
        ]
        body = empty_client.post("/import", files=files).json()
        assert body["ok"] is False
        assert body["errors"][0]["sheet"] == "fgis.csv"


class TestSearchEndpoint:
    def test_fulltext_parity(self, client, corpus_kb):
        body = client.post(
            "/search", json={"mode": "fulltext", "keywords": ["latch"]}
        ).json()
        hits = search.fulltext_search(corpus_kb, ["latch"])
        assert [h["unique_id"] for h in body["hits"]] == [h.unique_id for h in hits]
        assert body["hits"][0]["match_rank"] == hits[0].match_rank

    def test_semantic_empty_returns_all(self, client):
        body = client.post("/search", json={"mode": "semantic", "fields": {}}).json()
        assert len(body["hits"]) == 3

    def test_raw_query_rows(self, client):
        body = client.post(
            "/search",
            json={"mode": "raw",
                  "raw_query": "match (g1)-[r1:hasFGI]->(g2) return g1, r1, g2"},
        ).json()
        assert body["columns"] == ["g1", "r1", "g2"]
        assert len(body["rows"]) == 5  # corkscrew 2 + patent twin 2 + spout 1
        assert body["rows"][0]["r1"]["kind"] == "edge"
        assert body["graph"]["edges"]

    def test_raw_parse_error_422_with_position(self, client):
        response = client.post(
            "/search", json={"mode": "raw", "raw_query": "match (g1 return"}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["line"] == 1 and body["col"] == 11
        assert body["expected"]

    def test_raw_mutation_403(self, client):
        response = client.post(
            "/search",
            json={"mode": "raw",
                  "raw_query": 'create (g:geometry {name: "x"}) return g'},
        )
        assert response.status_code == 403

    def test_unknown_mode_400(self, client):
        assert client.post("/search", json={"mode": "psychic"}).status_code == 400


class TestFunctionStructure:
    def test_steps(self, client):
        body = client.get("/functions/f1/structure").json()
        assert len(body["steps"]) == 5  # corkscrew 2 + patent twin 2 + spout 1
        designs = {step["design_id"] for step in body["steps"]}
        assert designs == {"corkscrew.sldprt", "US0640004", "US0000001"}

    def test_unknown_function_empty(self, client):
        assert client.get("/functions/f99/structure").json()["steps"] == []


class TestScoreEndpoint:
    def test_parity_with_library(self, client, corpus_kb):
        body = client.post("/designs/corkscrew.sldprt/score", json={}).json()
        results = scoring.score_corpus(corpus_kb, "corkscrew.sldprt")
        assert [r["unique_id"] for r in body["results"]] == [
            r.unique_id for r in results
        ]
        top = body["results"][0]
        assert top["normalized"] == results[0].score.normalized
        assert top["counts"] == {"geometries": 3, "fgis": 2, "functions": 1}
        assert len(top["overlap"]["geometry_pairs"]) == 3

    def test_weight_override(self, client):
        body = client.post(
            "/designs/corkscrew.sldprt/score",
            json={"weights": {"geometry": 1, "fgi": 1, "function": 1, "divisor": 3}},
        ).json()
        assert body["results"][0]["raw"] == pytest.approx(2.0)

    def test_empty_corpus_400(self, empty_client):
        empty_client.post(
            "/designs", json={"kind": "emergDesign", "unique_id": "solo.sldprt"}
        )
        assert empty_client.post("/designs/solo.sldprt/score", json={}).status_code == 400


class TestVizEndpoint:
    def test_dot(self, client, corpus_kb):
        response = client.get("/designs/corkscrew.sldprt/viz",
                              params={"format": "dot"})
        assert response.status_code == 200
        assert response.text == viz.to_dot(corpus_kb, "corkscrew.sldprt")

    def test_dot_with_highlight(self, client):
        response = client.get(
            "/designs/corkscrew.sldprt/viz",
            params={"format": "dot", "highlight": "US0640004"},
        )
        assert "penwidth=3" in response.text

    def test_graphjson_parity(self, client, corpus_kb):
        body = client.get(
            "/designs/corkscrew.sldprt/viz",
            params={"format": "graphjson", "projection": "geometry"},
        ).json()
        assert body == viz.design_to_graphjson(corpus_kb, "corkscrew.sldprt",
                                               projection="geometry")

    def test_bad_format_400(self, client):
        response = client.get("/designs/corkscrew.sldprt/viz", params={"format": "png"})
        assert response.status_code == 400


class TestLexiconEndpoints:
    def test_get_terms(self, client):
        body = client.get("/lexicon", params={"category": "action"}).json()
        assert any(term["term"] == "press" for term in body["terms"])

    def test_usage_increment(self, client, corpus_kb):
        before = corpus_kb.lexicon.get("action", "press").usage_count
        body = client.post(
            "/lexicon/usage", json={"category": "action", "term": "press"}
        ).json()
        assert body["count"] == before + 1

    def test_new_term_created(self, client):
        response = client.post(
            "/lexicon", json={"category": "action", "term": "crimps", "domain": "metal"}
        )
        assert response.status_code == 201
        assert response.json()["user_defined"] is True

    def test_bad_category_400(self, client):
        response = client.post("/lexicon", json={"category": "nouns", "term": "x"})
        assert response.status_code == 400


class TestDocuments:
    def test_document_served_from_directory(self, corpus_kb, tmp_path):
        (tmp_path / "US0640004.txt").write_text("the patent text")
        config = ServiceConfig(document_dir=str(tmp_path))
        client = TestClient(create_app(corpus_kb, config))
        response = client.get("/patents/US0640004/document")
        assert response.status_code == 200
        assert response.text == "the patent text"

    def test_missing_document_404(self, corpus_kb, tmp_path):
        config = ServiceConfig(document_dir=str(tmp_path))
        client = TestClient(create_app(corpus_kb, config))
        assert client.get("/patents/US0640004/document").status_code == 404


class TestLifecycle:
    def test_snapshot_and_lexicon_persisted_on_shutdown(self, tmp_path):
        kb = FadKnowledgeBase(lexicon=sample_lexicon())
        build_corkscrew(kb)
        config = ServiceConfig(
            snapshot_path=str(tmp_path / "kb.snapshot"),
            lexicon_path=str(tmp_path / "lexicon.csv"),
        )
        with TestClient(create_app(kb, config)) as client:
            assert client.get("/designs").json()["total"] == 1
        reloaded = load_knowledge_base(config)
        assert reloaded.get_fad("corkscrew.sldprt").geometry_count() == 3
        assert reloaded.lexicon.get("action", "press").usage_count == 5

    def test_corrupt_snapshot_refuses_to_start(self, tmp_path):
        snapshot = tmp_path / "kb.snapshot"
        snapshot.write_text("not a snapshot\n")
        config = ServiceConfig(snapshot_path=str(snapshot))
        with pytest.raises(SnapshotLoadFailure):
            load_knowledge_base(config)

    def test_bind_failure(self):
        import socket

        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        try:
            config = ServiceConfig(listen_host="127.0.0.1", listen_port=port)
            with pytest.raises(BindFailure):
                serve(config)
        finally:
            blocker.close()


def _fad_via_library(kb: FadKnowledgeBase, design_id: str) -> dict:
    from patgraph.service import _fad_json

    return json.loads(json.dumps(_fad_json(kb.get_fad(design_id))))
