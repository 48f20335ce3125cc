// Force-directed layout: determinism, bounds, and spring behavior.

import { describe, expect, it } from "vitest";

import { layoutGraph } from "../src/layout";
import type { GraphJson } from "../src/types";

function chain(): GraphJson {
  return {
    nodes: [1, 2, 3, 4].map((id) => ({ id, labels: ["geometry"], properties: {} })),
    edges: [
      { id: 10, type: "hasFGI", source: 1, target: 2, properties: {} },
      { id: 11, type: "hasFGI", source: 2, target: 3, properties: {} },
    ],
  };
}

describe("layoutGraph", () => {
  it("is deterministic for a fixed seed", () => {
    const first = layoutGraph(chain(), { seed: 7 });
    const second = layoutGraph(chain(), { seed: 7 });
    for (const [id, position] of first.positions) {
      expect(second.positions.get(id)).toEqual(position);
    }
  });

  it("keeps every node inside the canvas", () => {
    const result = layoutGraph(chain(), { width: 300, height: 200, seed: 3 });
    for (const position of result.positions.values()) {
      expect(position.x).toBeGreaterThanOrEqual(0);
      expect(position.x).toBeLessThanOrEqual(300);
      expect(position.y).toBeGreaterThanOrEqual(0);
      expect(position.y).toBeLessThanOrEqual(200);
    }
  });

  it("pulls connected nodes closer than the disconnected one", () => {
    const result = layoutGraph(chain(), { seed: 11, iterations: 400 });
    const distance = (a: number, b: number) => {
      const pa = result.positions.get(a)!;
      const pb = result.positions.get(b)!;
      return Math.hypot(pa.x - pb.x, pa.y - pb.y);
    };
    const connected = (distance(1, 2) + distance(2, 3)) / 2;
    const detached = Math.min(distance(4, 1), distance(4, 2), distance(4, 3));
    expect(connected).toBeLessThan(detached);
  });

  it("handles empty graphs and self loops", () => {
    expect(layoutGraph({ nodes: [], edges: [] }).positions.size).toBe(0);
    const loop: GraphJson = {
      nodes: [{ id: 1, labels: [], properties: {} }],
      edges: [{ id: 2, type: "hasFGI", source: 1, target: 1, properties: {} }],
    };
    expect(layoutGraph(loop).positions.size).toBe(1);
  });
});
