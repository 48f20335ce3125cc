// Deterministic force-directed layout for GraphJSON documents. Springs
// pull connected nodes together, every pair repels, and a weak centering
// force keeps components on canvas. Seeded so a graph always lays out
// the same way.

import type { GraphJson } from "./types";

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
  springLength?: number;
}

export interface PositionedNode {
  id: number;
  x: number;
  y: number;
}

export interface LayoutResult {
  positions: Map<number, PositionedNode>;
  width: number;
  height: number;
}

export function layoutGraph(graph: GraphJson, options: LayoutOptions = {}): LayoutResult {
  const width = options.width ?? 800;
  const height = options.height ?? 600;
  const iterations = options.iterations ?? 200;
  const springLength = options.springLength ?? Math.min(width, height) / 4;
  const random = mulberry32(options.seed ?? 1);

  const ids = graph.nodes.map((node) => node.id);
  const index = new Map(ids.map((id, position) => [id, position]));
  const xs = ids.map(() => random() * width);
  const ys = ids.map(() => random() * height);

  const springs: [number, number][] = [];
  for (const edge of graph.edges) {
    const source = index.get(edge.source);
    const target = index.get(edge.target);
    if (source !== undefined && target !== undefined && source !== target) {
      springs.push([source, target]);
    }
  }

  const repulsion = springLength * springLength;
  for (let step = 0; step < iterations; step++) {
    const temperature = (1 - step / iterations) * springLength * 0.5 + 1;
    const fx = ids.map(() => 0);
    const fy = ids.map(() => 0);
    for (let a = 0; a < ids.length; a++) {
      for (let b = a + 1; b < ids.length; b++) {
        let dx = xs[a] - xs[b];
        let dy = ys[a] - ys[b];
        let distance = Math.hypot(dx, dy);
        if (distance < 1e-6) {
          dx = random() - 0.5;
          dy = random() - 0.5;
          distance = Math.hypot(dx, dy);
        }
        const push = repulsion / (distance * distance);
        fx[a] += (dx / distance) * push;
        fy[a] += (dy / distance) * push;
        fx[b] -= (dx / distance) * push;
        fy[b] -= (dy / distance) * push;
      }
    }
    for (const [a, b] of springs) {
      const dx = xs[b] - xs[a];
      const dy = ys[b] - ys[a];
      const distance = Math.max(1e-6, Math.hypot(dx, dy));
      const pull = (distance - springLength) * 0.05;
      fx[a] += (dx / distance) * pull;
      fy[a] += (dy / distance) * pull;
      fx[b] -= (dx / distance) * pull;
      fy[b] -= (dy / distance) * pull;
    }
    for (let a = 0; a < ids.length; a++) {
      fx[a] += (width / 2 - xs[a]) * 0.01;
      fy[a] += (height / 2 - ys[a]) * 0.01;
      const magnitude = Math.hypot(fx[a], fy[a]);
      const limited = Math.min(magnitude, temperature);
      if (magnitude > 1e-9) {
        xs[a] += (fx[a] / magnitude) * limited;
        ys[a] += (fy[a] / magnitude) * limited;
      }
      xs[a] = Math.min(width - 10, Math.max(10, xs[a]));
      ys[a] = Math.min(height - 10, Math.max(10, ys[a]));
    }
  }

  const positions = new Map<number, PositionedNode>();
  ids.forEach((id, position) => {
    positions.set(id, { id, x: xs[position], y: ys[position] });
  });
  return { positions, width, height };
}

/** Small deterministic PRNG (mulberry32). */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
