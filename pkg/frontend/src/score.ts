// Similarity chart state: ranked bars from the scoring endpoint, overlap
// drill-down on double click, patent document retrieval on single click.

import { ApiError, PatgraphClient } from "./api";
import type { OverlapPayload, ScoreResult } from "./types";

export interface ScoreBar {
  index: number;
  unique_id: string;
  normalized: number;
  raw: number;
  counts: { geometries: number; fgis: number; functions: number };
}

export interface HighlightSets {
  /** "productId/geometricId" node keys of the probe design's matched geometries. */
  geometryKeys: Set<string>;
  /** hasFGI edge ids of the probe design's matched interactions. */
  edgeIds: Set<number>;
}

export class ScoreFlow {
  designId = "";
  results: ScoreResult[] = [];
  selected: ScoreResult | null = null;
  emptyMessage: string | null = null;

  constructor(private client: PatgraphClient) {}

  /** Bars come back in service rank order and are rendered as-is. */
  async run(designId: string, kind = "patent"): Promise<ScoreBar[]> {
    this.designId = designId;
    this.selected = null;
    this.emptyMessage = null;
    try {
      const response = await this.client.score(designId, { kind });
      this.results = response.results;
    } catch (error) {
      if (error instanceof ApiError && error.status === 400) {
        this.results = [];
        this.emptyMessage =
          "No patents to compare against yet — annotate or import some first.";
        return [];
      }
      throw error;
    }
    return this.bars();
  }

  bars(): ScoreBar[] {
    return this.results.map((result, index) => ({
      index,
      unique_id: result.unique_id,
      normalized: result.normalized,
      raw: result.raw,
      counts: result.counts,
    }));
  }

  /** Double click: open the overlap report for that patent's bar. */
  selectBar(index: number): ScoreResult | null {
    this.selected = this.results[index] ?? null;
    return this.selected;
  }

  /** Single click: the stored patent document of that bar. */
  documentUrl(index: number): string | null {
    const result = this.results[index];
    return result ? this.client.documentUrl(result.unique_id) : null;
  }

  /** Elements of the probe design to highlight in its rendered graph. */
  highlightForProbe(): HighlightSets {
    return highlightSide(this.selected?.overlap ?? null, "a");
  }

  /** Elements of the selected patent to highlight in its graph. */
  highlightForPatent(): HighlightSets {
    return highlightSide(this.selected?.overlap ?? null, "b");
  }
}

function highlightSide(overlap: OverlapPayload | null, side: "a" | "b"): HighlightSets {
  const pick = side === "a" ? 0 : 1;
  const geometryKeys = new Set<string>();
  const edgeIds = new Set<number>();
  if (overlap) {
    for (const pair of overlap.geometry_pairs) {
      const witness = pair[pick];
      geometryKeys.add(`${witness.product_id}/${witness.geometric_id}`);
    }
    for (const pair of overlap.fgi_pairs) {
      edgeIds.add(pair[pick].edge_id);
    }
  }
  return { geometryKeys, edgeIds };
}
