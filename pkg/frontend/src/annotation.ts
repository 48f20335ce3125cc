// The three-tab annotation draft: design/product/claims, geometry rows,
// FGI rows. FGI rows may only reference geometries defined on tab two,
// and submission maps one-to-one onto the service endpoints in
// dependency order.

import { ApiError, PatgraphClient } from "./api";
import type { LexiconTerm } from "./types";

export interface ClaimRow {
  claimId: string;
  text: string;
  independent: boolean;
}

export interface GeometryRow {
  geometricId: string;
  name: string;
  patmineType: string;
  abstractionLabels: string[];
}

export interface FgiRow {
  fromId: string;
  toId: string;
  action: string;
  functionIds: string[];
  functionName?: string;
}

export interface RowIssue {
  tab: "design" | "claims" | "geometries" | "fgis";
  row: number;
  message: string;
}

export interface SubmitResult {
  ok: boolean;
  designId: string;
  productNodeId: number | null;
  issues: RowIssue[];
  requests: string[]; // endpoint log, in issue order
}

const FUNCTION_ID = /^f[1-9][0-9]*(_b[1-9][0-9]*)?$/;

export class AnnotationDraft {
  kind: "patent" | "emergDesign" = "emergDesign";
  uniqueId = "";
  title = "";
  productId = "";
  productName = "";
  claims: ClaimRow[] = [];
  geometries: GeometryRow[] = [];
  fgis: FgiRow[] = [];

  addClaim(row: ClaimRow): void {
    this.claims.push(row);
  }

  addGeometry(row: GeometryRow): void {
    this.geometries.push(row);
  }

  geometryIds(): string[] {
    return this.geometries.map((g) => g.geometricId);
  }

  /** Client-side guard: an FGI may only connect tab-two geometries. */
  addFgi(row: FgiRow): RowIssue | null {
    const known = new Set(this.geometryIds());
    for (const endpoint of [row.fromId, row.toId]) {
      if (!known.has(endpoint)) {
        return {
          tab: "fgis",
          row: this.fgis.length,
          message: `geometry '${endpoint}' is not defined on the geometry tab`,
        };
      }
    }
    this.fgis.push(row);
    return null;
  }

  validate(): RowIssue[] {
    const issues: RowIssue[] = [];
    if (!this.uniqueId) {
      issues.push({ tab: "design", row: 0, message: "design id is required" });
    }
    if (!this.productId) {
      issues.push({ tab: "design", row: 0, message: "product id is required" });
    }
    this.claims.forEach((claim, index) => {
      if (!claim.text.trim()) {
        issues.push({ tab: "claims", row: index, message: "claim text is empty" });
      }
    });
    const seen = new Set<string>();
    this.geometries.forEach((geometry, index) => {
      if (!geometry.geometricId) {
        issues.push({ tab: "geometries", row: index, message: "geometric id is required" });
      } else if (seen.has(geometry.geometricId)) {
        issues.push({
          tab: "geometries", row: index,
          message: `duplicate geometric id '${geometry.geometricId}'`,
        });
      }
      seen.add(geometry.geometricId);
      if (!geometry.patmineType) {
        issues.push({ tab: "geometries", row: index, message: "ontology type is required" });
      }
    });
    this.fgis.forEach((fgi, index) => {
      if (!fgi.functionIds.length) {
        issues.push({ tab: "fgis", row: index, message: "at least one function id" });
      }
      for (const fid of fgi.functionIds) {
        if (!FUNCTION_ID.test(fid)) {
          issues.push({
            tab: "fgis", row: index,
            message: `'${fid}' is not a valid function id (fN or fN_bM)`,
          });
        }
      }
      for (const endpoint of [fgi.fromId, fgi.toId]) {
        if (!seen.has(endpoint)) {
          issues.push({
            tab: "fgis", row: index,
            message: `geometry '${endpoint}' is not defined on the geometry tab`,
          });
        }
      }
    });
    return issues;
  }

  /**
   * Issue the service mutations in dependency order: design, product,
   * claims, geometries, FGIs. Service rejections are attached to the
   * offending row and submission continues with independent rows.
   */
  async submit(client: PatgraphClient): Promise<SubmitResult> {
    const issues = this.validate();
    const requests: string[] = [];
    if (issues.length) {
      return { ok: false, designId: this.uniqueId, productNodeId: null, issues, requests };
    }
    await client.createDesign({
      kind: this.kind,
      unique_id: this.uniqueId,
      title: this.title,
    });
    requests.push("POST /designs");
    const product = await client.addProduct(this.uniqueId, {
      product_id: this.productId,
      name: this.productName,
    });
    requests.push("POST /designs/{id}/products");

    for (const [index, claim] of this.claims.entries()) {
      try {
        await client.addClaim(product.node_id, {
          claim_id: claim.claimId,
          text: claim.text,
          independent: claim.independent,
        });
        requests.push("POST /products/{id}/claims");
      } catch (error) {
        issues.push(serviceIssue("claims", index, error));
      }
    }
    for (const [index, geometry] of this.geometries.entries()) {
      try {
        await client.addGeometry(product.node_id, {
          geometric_id: geometry.geometricId,
          name: geometry.name,
          patmine_type: geometry.patmineType,
          abstraction_labels: geometry.abstractionLabels,
        });
        requests.push("POST /products/{id}/geometries");
      } catch (error) {
        issues.push(serviceIssue("geometries", index, error));
      }
    }
    for (const [index, fgi] of this.fgis.entries()) {
      try {
        await client.addFgi(product.node_id, {
          from_id: fgi.fromId,
          to_id: fgi.toId,
          action: fgi.action,
          function_ids: fgi.functionIds,
          function_name: fgi.functionName,
        });
        requests.push("POST /products/{id}/fgis");
      } catch (error) {
        issues.push(serviceIssue("fgis", index, error));
      }
    }
    return {
      ok: issues.length === 0,
      designId: this.uniqueId,
      productNodeId: product.node_id,
      issues,
      requests,
    };
  }
}

function serviceIssue(tab: RowIssue["tab"], row: number, error: unknown): RowIssue {
  const message = error instanceof ApiError ? error.message : String(error);
  return { tab, row, message };
}

/**
 * Combo-box options for the annotation tabs, pre-filled from the lexicon
 * and sorted by usage so the most voted terms come first.
 */
export class LexiconOptions {
  private terms: LexiconTerm[] = [];

  async load(client: PatgraphClient): Promise<void> {
    this.terms = (await client.lexicon()).terms;
  }

  private options(category: string): string[] {
    return this.terms
      .filter((term) => term.category === category)
      .sort((a, b) => b.usage_count - a.usage_count || a.term.localeCompare(b.term))
      .map((term) => term.term);
  }

  geometryTypes(): string[] {
    return this.options("geometry-type");
  }

  actions(): string[] {
    return this.options("action");
  }

  functionVerbs(): string[] {
    return this.options("function-verb");
  }

  has(category: string, term: string): boolean {
    return this.terms.some((t) => t.category === category && t.term === term);
  }

  /** A user-typed term becomes a lexicon entry; usage counts when used. */
  async addUserTerm(
    client: PatgraphClient, category: string, term: string, domain = "",
  ): Promise<LexiconTerm> {
    const created = await client.addLexiconTerm({ category, term, domain });
    this.terms.push(created);
    return created;
  }
}
