// The three-mode search panel and the result navigation state.

import { ApiError, PatgraphClient } from "./api";
import type {
  GraphJson,
  ParseErrorPayload,
  RankedHit,
  RawSearchResponse,
} from "./types";

export type SearchMode = "semantic" | "fulltext" | "raw";

/** First/Previous/Next/Last navigation over the current hit list. */
export class ResultsViewState {
  private index = 0;

  constructor(private count: number) {}

  get current(): number {
    return this.index;
  }

  get total(): number {
    return this.count;
  }

  first(): number {
    this.index = 0;
    return this.index;
  }

  previous(): number {
    this.index = Math.max(0, this.index - 1);
    return this.index;
  }

  next(): number {
    this.index = Math.min(Math.max(0, this.count - 1), this.index + 1);
    return this.index;
  }

  last(): number {
    this.index = Math.max(0, this.count - 1);
    return this.index;
  }
}

export interface RawErrorView {
  line: number;
  col: number;
  expected: string[];
  message: string;
  /** The offending source line with a caret under the reported column. */
  caret: string;
}

export class SearchFlow {
  mode: SearchMode = "semantic";
  hits: RankedHit[] = [];
  rows: RawSearchResponse | null = null;
  nav = new ResultsViewState(0);
  rawError: RawErrorView | null = null;

  constructor(private client: PatgraphClient) {}

  /** Empty semantic form lists every design in the corpus. */
  async runSemantic(fields: Record<string, string>): Promise<RankedHit[]> {
    this.mode = "semantic";
    const response = await this.client.searchSemantic(fields);
    this.setHits(response.hits);
    return this.hits;
  }

  async runFulltext(keywords: string[], expandSynonyms = false): Promise<RankedHit[]> {
    this.mode = "fulltext";
    const response = await this.client.searchFulltext(keywords, expandSynonyms);
    this.setHits(response.hits);
    return this.hits;
  }

  async runRaw(query: string): Promise<RawSearchResponse | null> {
    this.mode = "raw";
    this.rawError = null;
    try {
      this.rows = await this.client.searchRaw(query);
      return this.rows;
    } catch (error) {
      if (error instanceof ApiError && error.parseError) {
        this.rawError = renderParseError(error.parseError, query);
        this.rows = null;
        return null;
      }
      throw error;
    }
  }

  /** Hits arrive ranked by the service; the client never re-sorts them. */
  private setHits(hits: RankedHit[]): void {
    this.hits = hits;
    this.nav = new ResultsViewState(hits.length);
  }

  currentHit(): RankedHit | null {
    return this.hits[this.nav.current] ?? null;
  }

  /** The FAD graph of the currently shown hit, for the canvas renderer. */
  async currentGraph(): Promise<GraphJson | null> {
    const hit = this.currentHit();
    if (!hit) {
      return null;
    }
    return this.client.graphJson(hit.unique_id);
  }
}

export function renderParseError(payload: ParseErrorPayload, query: string): RawErrorView {
  const lines = query.split("\n");
  const sourceLine = lines[payload.line - 1] ?? "";
  const caret = sourceLine + "\n" + " ".repeat(Math.max(0, payload.col - 1)) + "^";
  return {
    line: payload.line,
    col: payload.col,
    expected: payload.expected,
    message: `${payload.line}:${payload.col} expected ${payload.expected.join(", ")}`,
    caret,
  };
}
