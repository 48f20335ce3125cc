// DOM wiring for the Annotation Studio. All state lives in the flow
// classes; this layer only reads inputs and paints results.

import { PatgraphClient } from "./api";
import { AnnotationDraft, LexiconOptions } from "./annotation";
import { layoutGraph } from "./layout";
import { ScoreFlow } from "./score";
import { SearchFlow } from "./search";
import type { GraphJson } from "./types";
import type { HighlightSets } from "./score";

const client = new PatgraphClient(
  (window as { PATGRAPH_URL?: string }).PATGRAPH_URL ?? "http://127.0.0.1:8765",
);
const options = new LexiconOptions();
const searchFlow = new SearchFlow(client);
const scoreFlow = new ScoreFlow(client);
let draft = new AnnotationDraft();

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

function value(id: string): string {
  return el<HTMLInputElement>(id).value.trim();
}

function setText(id: string, text: string): void {
  el(id).textContent = text;
}

// -- annotation tabs ----------------------------------------------------------

function refreshDraftSummary(): void {
  setText(
    "draft-summary",
    `${draft.uniqueId || "(unnamed)"}: ${draft.claims.length} claims, ` +
      `${draft.geometries.length} geometries, ${draft.fgis.length} FGIs`,
  );
  const pickers = [el<HTMLSelectElement>("fgi-from"), el<HTMLSelectElement>("fgi-to")];
  for (const picker of pickers) {
    picker.innerHTML = "";
    for (const gid of draft.geometryIds()) {
      const option = document.createElement("option");
      option.value = gid;
      option.textContent = gid;
      picker.appendChild(option);
    }
  }
}

function fillCombo(id: string, values: string[]): void {
  const list = el<HTMLDataListElement>(id);
  list.innerHTML = "";
  for (const term of values) {
    const option = document.createElement("option");
    option.value = term;
    list.appendChild(option);
  }
}

async function ensureTerm(category: string, term: string): Promise<void> {
  if (term && !options.has(category, term)) {
    await options.addUserTerm(client, category, term);
    fillCombo("geometry-type-options", options.geometryTypes());
    fillCombo("action-options", options.actions());
  }
}

function wireAnnotation(): void {
  el("add-claim").addEventListener("click", () => {
    draft.addClaim({
      claimId: value("claim-id"),
      text: value("claim-text"),
      independent: el<HTMLInputElement>("claim-independent").checked,
    });
    refreshDraftSummary();
  });
  el("add-geometry").addEventListener("click", async () => {
    const patmineType = value("geometry-type");
    await ensureTerm("geometry-type", patmineType);
    draft.addGeometry({
      geometricId: value("geometry-id"),
      name: value("geometry-name"),
      patmineType,
      abstractionLabels: value("geometry-labels").split(";").filter(Boolean),
    });
    refreshDraftSummary();
  });
  el("add-fgi").addEventListener("click", async () => {
    const action = value("fgi-action");
    await ensureTerm("action", action);
    const issue = draft.addFgi({
      fromId: el<HTMLSelectElement>("fgi-from").value,
      toId: el<HTMLSelectElement>("fgi-to").value,
      action,
      functionIds: value("fgi-function-ids").split(";").filter(Boolean),
      functionName: value("fgi-function-name") || undefined,
    });
    setText("fgi-issue", issue ? issue.message : "");
    refreshDraftSummary();
  });
  el("submit-draft").addEventListener("click", async () => {
    draft.kind = el<HTMLSelectElement>("design-kind").value as "patent" | "emergDesign";
    draft.uniqueId = value("design-id");
    draft.title = value("design-title");
    draft.productId = value("product-id");
    draft.productName = value("product-name");
    const result = await draft.submit(client);
    setText(
      "submit-result",
      result.ok
        ? `saved ${result.designId} (${result.requests.length} requests)`
        : result.issues.map((i) => `${i.tab}[${i.row}]: ${i.message}`).join("; "),
    );
    if (result.ok) {
      const graph = await client.graphJson(result.designId);
      drawGraph(el<HTMLCanvasElement>("draft-canvas"), graph);
      draft = new AnnotationDraft();
      refreshDraftSummary();
    }
  });
}

// -- search panel ----------------------------------------------------------------

function wireSearch(): void {
  el("run-semantic").addEventListener("click", async () => {
    const fields: Record<string, string> = {};
    for (const name of ["title", "product", "function", "action", "geometry"]) {
      const fieldValue = value(`semantic-${name}`);
      if (fieldValue) {
        fields[name] = fieldValue;
      }
    }
    await searchFlow.runSemantic(fields);
    await paintHit();
  });
  el("run-fulltext").addEventListener("click", async () => {
    const keywords = value("fulltext-keywords").split(",").map((k) => k.trim())
      .filter(Boolean);
    await searchFlow.runFulltext(
      keywords, el<HTMLInputElement>("fulltext-synonyms").checked);
    await paintHit();
  });
  el("run-raw").addEventListener("click", async () => {
    const response = await searchFlow.runRaw(
      el<HTMLTextAreaElement>("raw-query").value);
    if (searchFlow.rawError) {
      setText("raw-error", searchFlow.rawError.message + "\n" + searchFlow.rawError.caret);
    } else if (response) {
      setText("raw-error", "");
      setText("raw-rows", JSON.stringify(response.rows, null, 2));
      drawGraph(el<HTMLCanvasElement>("search-canvas"), response.graph);
    }
  });
  for (const action of ["first", "previous", "next", "last"] as const) {
    el(`nav-${action}`).addEventListener("click", async () => {
      searchFlow.nav[action]();
      await paintHit();
    });
  }
}

async function paintHit(): Promise<void> {
  const hit = searchFlow.currentHit();
  setText(
    "hit-summary",
    hit
      ? `${searchFlow.nav.current + 1}/${searchFlow.nav.total} — ` +
        `${hit.unique_id} (rank ${hit.match_rank})`
      : "no results",
  );
  const graph = await searchFlow.currentGraph();
  if (graph) {
    drawGraph(el<HTMLCanvasElement>("search-canvas"), graph);
  }
}

// -- scoring panel ------------------------------------------------------------------

function wireScore(): void {
  el("run-score").addEventListener("click", async () => {
    const bars = await scoreFlow.run(value("score-design-id"));
    const chart = el<HTMLCanvasElement>("score-canvas");
    drawBars(chart, bars.map((bar) => ({ label: bar.unique_id, value: bar.normalized })));
    setText("score-empty", scoreFlow.emptyMessage ?? "");
    chart.onclick = (event) => {
      const index = barIndexAt(chart, bars.length, event.offsetX);
      if (index === null) {
        return;
      }
      const url = scoreFlow.documentUrl(index);
      if (url) {
        window.open(url, "_blank");
      }
    };
    chart.ondblclick = async (event) => {
      const index = barIndexAt(chart, bars.length, event.offsetX);
      if (index === null) {
        return;
      }
      const selected = scoreFlow.selectBar(index);
      if (!selected) {
        return;
      }
      setText("overlap-detail", JSON.stringify(selected.overlap, null, 2));
      const graph = await client.graphJson(scoreFlow.designId);
      drawGraph(el<HTMLCanvasElement>("overlap-canvas"), graph,
                scoreFlow.highlightForProbe());
    };
  });
}

function barIndexAt(canvas: HTMLCanvasElement, count: number, x: number): number | null {
  if (!count) {
    return null;
  }
  const slot = canvas.width / count;
  const index = Math.floor(x / slot);
  return index >= 0 && index < count ? index : null;
}

// -- canvas painting ----------------------------------------------------------------

function drawGraph(canvas: HTMLCanvasElement, graph: GraphJson,
                   highlight?: HighlightSets): void {
  const context = canvas.getContext("2d");
  if (!context) {
    return;
  }
  const layout = layoutGraph(graph, { width: canvas.width, height: canvas.height });
  context.clearRect(0, 0, canvas.width, canvas.height);
  context.font = "11px sans-serif";
  for (const edge of graph.edges) {
    const source = layout.positions.get(edge.source);
    const target = layout.positions.get(edge.target);
    if (!source || !target) {
      continue;
    }
    context.strokeStyle = highlight?.edgeIds.has(edge.id) ? "#c0392b" : "#888";
    context.lineWidth = highlight?.edgeIds.has(edge.id) ? 3 : 1;
    context.beginPath();
    context.moveTo(source.x, source.y);
    context.lineTo(target.x, target.y);
    context.stroke();
    const label = String(edge.properties["action"] ?? edge.type);
    context.fillStyle = "#555";
    context.fillText(label, (source.x + target.x) / 2, (source.y + target.y) / 2);
  }
  for (const node of graph.nodes) {
    const position = layout.positions.get(node.id);
    if (!position) {
      continue;
    }
    const properties = node.properties as Record<string, unknown>;
    const key = `${properties["Product_ID"] ?? ""}/${properties["Geometric_ID"] ?? ""}`;
    const marked = highlight?.geometryKeys.has(key) ?? false;
    context.beginPath();
    context.fillStyle = marked ? "#f5b7b1" : "#aed6f1";
    context.strokeStyle = marked ? "#c0392b" : "#2e86c1";
    context.lineWidth = marked ? 3 : 1;
    context.arc(position.x, position.y, 16, 0, Math.PI * 2);
    context.fill();
    context.stroke();
    context.fillStyle = "#222";
    const label = String(properties["name"] ?? node.labels[0] ?? node.id);
    context.fillText(label, position.x - 14, position.y - 20);
  }
}

function drawBars(canvas: HTMLCanvasElement,
                  bars: { label: string; value: number }[]): void {
  const context = canvas.getContext("2d");
  if (!context) {
    return;
  }
  context.clearRect(0, 0, canvas.width, canvas.height);
  if (!bars.length) {
    return;
  }
  const slot = canvas.width / bars.length;
  context.font = "11px sans-serif";
  bars.forEach((bar, index) => {
    const barHeight = Math.max(2, bar.value * (canvas.height - 30));
    context.fillStyle = "#2e86c1";
    context.fillRect(index * slot + 4, canvas.height - 18 - barHeight,
                     slot - 8, barHeight);
    context.fillStyle = "#222";
    context.fillText(bar.label.slice(0, 12), index * slot + 4, canvas.height - 5);
    context.fillText(bar.value.toFixed(2), index * slot + 4,
                     canvas.height - 24 - barHeight);
  });
}

async function boot(): Promise<void> {
  await options.load(client);
  fillCombo("geometry-type-options", options.geometryTypes());
  fillCombo("action-options", options.actions());
  wireAnnotation();
  wireSearch();
  wireScore();
  refreshDraftSummary();
}

if (typeof document !== "undefined" && document.getElementById("studio")) {
  boot().catch((error) => setText("submit-result", String(error)));
}
