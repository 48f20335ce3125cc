// Payload shapes of the patgraph service endpoints.

export interface DesignSummary {
  unique_id: string;
  kind: string;
  title: string;
  node_id: number;
  product_count: number;
}

export interface DesignPage {
  items: DesignSummary[];
  page: number;
  page_size: number;
  page_count: number;
  total: number;
  first_page: number;
  prev_page: number;
  next_page: number;
  last_page: number;
}

export interface ClaimView {
  node_id: number;
  claim_id: string;
  text: string;
  independent: boolean;
  extras: Record<string, unknown>;
}

export interface GeometryView {
  node_id: number;
  geometric_id: string;
  name: string;
  patmine_type: string;
  abstraction_labels: string[];
  extras: Record<string, unknown>;
}

export interface FgiView {
  edge_id: number;
  from_id: string;
  to_id: string;
  action: string;
  function_ids: string[];
  function_name: string | null;
  extras: Record<string, unknown>;
}

export interface ProductView {
  node_id: number;
  product_id: string;
  name: string;
  extras: Record<string, unknown>;
  claims: ClaimView[];
  geometries: GeometryView[];
  fgis: FgiView[];
}

export interface FadDocument {
  node_id: number;
  kind: string;
  unique_id: string;
  title: string;
  extras: Record<string, unknown>;
  products: ProductView[];
}

export interface MatchedItem {
  element_kind: string;
  element_id: number;
  property_key: string;
  keyword: string;
  source_keyword: string;
  via_synonym: boolean;
  weight: number;
}

export interface RankedHit {
  unique_id: string;
  kind: string;
  match_rank: number;
  items: MatchedItem[];
}

export interface SearchHitsResponse {
  mode: string;
  hits: RankedHit[];
}

export type RawCell =
  | null
  | number
  | string
  | boolean
  | { kind: "node"; id: number; labels: string[]; properties: Record<string, unknown> }
  | { kind: "edge"; id: number; type: string; source: number; target: number;
      properties: Record<string, unknown> };

export interface RawSearchResponse {
  mode: "raw";
  columns: string[];
  rows: Record<string, RawCell>[];
  graph: GraphJson;
}

export interface GraphJsonNode {
  id: number;
  labels: string[];
  properties: Record<string, unknown>;
}

export interface GraphJsonEdge {
  id: number;
  type: string;
  source: number;
  target: number;
  properties: Record<string, unknown>;
}

export interface GraphJson {
  nodes: GraphJsonNode[];
  edges: GraphJsonEdge[];
}

export interface GeometryWitness {
  product_id: string;
  geometric_id: string;
  patmine_type: string;
}

export interface FgiWitness {
  product_id: string;
  edge_id: number;
  from_geometric_id: string;
  to_geometric_id: string;
  source_type: string;
  action: string;
  target_type: string;
}

export interface OverlapPayload {
  geometry_pairs: [GeometryWitness, GeometryWitness][];
  fgi_pairs: [FgiWitness, FgiWitness][];
  function_pairs: [string, string][];
}

export interface ScoreResult {
  unique_id: string;
  kind: string;
  raw: number;
  normalized: number;
  counts: { geometries: number; fgis: number; functions: number };
  overlap: OverlapPayload;
}

export interface ScoreResponse {
  design_id: string;
  results: ScoreResult[];
}

export interface LexiconTerm {
  category: string;
  term: string;
  domain: string;
  usage_count: number;
  parent: string | null;
  synonyms: string[];
  user_defined: boolean;
}

export interface ImportReport {
  created: Record<string, number>;
  merged: Record<string, number>;
  errors: { sheet: string; row: number; message: string }[];
  ok: boolean;
}

export interface FunctionStep {
  design_id: string;
  kind: string;
  product_id: string;
  fgi: FgiView;
}

export interface ParseErrorPayload {
  error: string;
  detail: string;
  line: number;
  col: number;
  expected: string[];
}
