// Typed client for the patgraph service. Every UI action goes through
// here — the studio never touches the store directly.

import type {
  DesignPage,
  FadDocument,
  FunctionStep,
  GraphJson,
  ImportReport,
  LexiconTerm,
  ParseErrorPayload,
  RawSearchResponse,
  ScoreResponse,
  SearchHitsResponse,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly payload: unknown;

  constructor(status: number, payload: unknown) {
    const detail =
      payload && typeof payload === "object" && "detail" in payload
        ? String((payload as { detail: unknown }).detail)
        : `request failed with status ${status}`;
    super(detail);
    this.status = status;
    this.payload = payload;
  }

  get parseError(): ParseErrorPayload | null {
    if (
      this.status === 422 &&
      this.payload &&
      typeof this.payload === "object" &&
      "line" in this.payload
    ) {
      return this.payload as ParseErrorPayload;
    }
    return null;
  }
}

export class PatgraphClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  // -- designs -----------------------------------------------------------

  createDesign(body: {
    kind: string;
    unique_id: string;
    title?: string;
    extras?: Record<string, unknown>;
  }): Promise<{ node_id: number; kind: string; unique_id: string; title: string }> {
    return this.request("POST", "/designs", body);
  }

  listDesigns(params: { kind?: string; page?: number; page_size?: number } = {}):
      Promise<DesignPage> {
    return this.request("GET", `/designs${query(params)}`);
  }

  getFad(designId: string): Promise<FadDocument> {
    return this.request("GET", `/designs/${encodeURIComponent(designId)}/fad`);
  }

  deleteDesign(designId: string): Promise<void> {
    return this.request("DELETE", `/designs/${encodeURIComponent(designId)}`);
  }

  // -- annotation ----------------------------------------------------------

  addProduct(designId: string, body: { product_id: string; name: string }):
      Promise<{ node_id: number; product_id: string }> {
    return this.request(
      "POST", `/designs/${encodeURIComponent(designId)}/products`, body);
  }

  addClaim(productNodeId: number, body: {
    claim_id: string;
    text: string;
    independent?: boolean;
  }): Promise<{ node_id: number; claim_id: string }> {
    return this.request("POST", `/products/${productNodeId}/claims`, body);
  }

  addGeometry(productNodeId: number, body: {
    geometric_id: string;
    name: string;
    patmine_type: string;
    abstraction_labels?: string[];
  }): Promise<{ node_id: number; geometric_id: string }> {
    return this.request("POST", `/products/${productNodeId}/geometries`, body);
  }

  addFgi(productNodeId: number, body: {
    from_id: string;
    to_id: string;
    action: string;
    function_ids: string[];
    function_name?: string;
  }): Promise<{ edge_id: number }> {
    return this.request("POST", `/products/${productNodeId}/fgis`, body);
  }

  // -- search / scoring ------------------------------------------------------

  searchSemantic(fields: Record<string, string>, kind?: string):
      Promise<SearchHitsResponse> {
    return this.request("POST", "/search", { mode: "semantic", fields, kind });
  }

  searchFulltext(keywords: string[], expandSynonyms = false, kind?: string):
      Promise<SearchHitsResponse> {
    return this.request("POST", "/search", {
      mode: "fulltext",
      keywords,
      expand_synonyms: expandSynonyms,
      kind,
    });
  }

  searchRaw(rawQuery: string): Promise<RawSearchResponse> {
    return this.request("POST", "/search", { mode: "raw", raw_query: rawQuery });
  }

  score(designId: string, body: {
    kind?: string;
    weights?: { geometry: number; fgi: number; function: number; divisor: number };
  } = {}): Promise<ScoreResponse> {
    return this.request(
      "POST", `/designs/${encodeURIComponent(designId)}/score`, body);
  }

  functionStructure(functionId: string):
      Promise<{ function_id: string; steps: FunctionStep[] }> {
    return this.request(
      "GET", `/functions/${encodeURIComponent(functionId)}/structure`);
  }

  // -- visualization & documents ----------------------------------------------

  graphJson(designId: string, projection: "full" | "geometry" = "geometry"):
      Promise<GraphJson> {
    return this.request(
      "GET",
      `/designs/${encodeURIComponent(designId)}/viz` +
        `?format=graphjson&projection=${projection}`);
  }

  documentUrl(patentId: string): string {
    return `${this.base}/patents/${encodeURIComponent(patentId)}/document`;
  }

  exportSheets(designId: string): Promise<{ files: Record<string, string> }> {
    return this.request("GET", `/designs/${encodeURIComponent(designId)}/export`);
  }

  // -- lexicon ------------------------------------------------------------------

  lexicon(category?: string): Promise<{ terms: LexiconTerm[] }> {
    return this.request("GET", `/lexicon${query({ category })}`);
  }

  addLexiconTerm(body: {
    category: string;
    term: string;
    domain?: string;
    synonyms?: string[];
    parent?: string;
  }): Promise<LexiconTerm> {
    return this.request("POST", "/lexicon", body);
  }

  recordUsage(category: string, term: string, domain = ""):
      Promise<{ term: string; count: number }> {
    return this.request("POST", "/lexicon/usage", { category, term, domain });
  }

  importSheets(files: Record<string, string>): Promise<ImportReport> {
    const form = new FormData();
    for (const [name, text] of Object.entries(files)) {
      form.append("files", new Blob([text], { type: "text/csv" }), name);
    }
    return this.requestRaw("POST", "/import", form);
  }

  // -- plumbing ---------------------------------------------------------------------

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    return this.send(path, init);
  }

  private async requestRaw<T>(method: string, path: string, body: BodyInit):
      Promise<T> {
    return this.send(path, { method, body });
  }

  private async send<T>(path: string, init: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (response.status === 204) {
      return undefined as T;
    }
    let payload: unknown = null;
    const text = await response.text();
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = text;
      }
    }
    if (!response.ok) {
      throw new ApiError(response.status, payload);
    }
    return payload as T;
  }
}

function query(params: Record<string, string | number | undefined>): string {
  const parts = Object.entries(params)
    .filter(([, value]) => value !== undefined && value !== "")
    .map(([key, value]) => `${key}=${encodeURIComponent(String(value))}`);
  return parts.length ? `?${parts.join("&")}` : "";
}
