import type { GraphEdge } from "./types.js";

export const LAYOUT = {
  NODE_WIDTH: 170,
  NODE_HEIGHT: 46,
  H_GAP: 70,
  V_GAP: 18,
  PADDING: 24,
};

export interface Position {
  x: number;
  y: number;
  layer: number;
}

/**
 * Deterministic layered DAG layout: a node's layer is the longest path from
 * any source; order inside a layer follows the snapshot's node order.
 */
export function layeredLayout(
  nodeNames: string[],
  edges: GraphEdge[]
): Map<string, Position> {
  const indegree = new Map<string, number>();
  const successors = new Map<string, string[]>();
  for (const name of nodeNames) {
    indegree.set(name, 0);
    successors.set(name, []);
  }
  for (const edge of edges) {
    if (!indegree.has(edge.from) || !indegree.has(edge.to)) continue;
    successors.get(edge.from)!.push(edge.to);
    indegree.set(edge.to, (indegree.get(edge.to) ?? 0) + 1);
  }

  const layer = new Map<string, number>();
  const queue: string[] = [];
  for (const name of nodeNames) {
    if ((indegree.get(name) ?? 0) === 0) {
      layer.set(name, 0);
      queue.push(name);
    }
  }
  while (queue.length) {
    const current = queue.shift()!;
    for (const next of successors.get(current) ?? []) {
      const candidate = (layer.get(current) ?? 0) + 1;
      layer.set(next, Math.max(layer.get(next) ?? 0, candidate));
      indegree.set(next, (indegree.get(next) ?? 0) - 1);
      if ((indegree.get(next) ?? 0) === 0) queue.push(next);
    }
  }
  for (const name of nodeNames) if (!layer.has(name)) layer.set(name, 0);

  const byLayer = new Map<number, string[]>();
  for (const name of nodeNames) {
    const l = layer.get(name)!;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)!.push(name);
  }

  const positions = new Map<string, Position>();
  for (const [l, members] of byLayer) {
    members.forEach((name, row) => {
      positions.set(name, {
        x: LAYOUT.PADDING + l * (LAYOUT.NODE_WIDTH + LAYOUT.H_GAP),
        y: LAYOUT.PADDING + row * (LAYOUT.NODE_HEIGHT + LAYOUT.V_GAP),
        layer: l,
      });
    });
  }
  return positions;
}

export function canvasSize(positions: Map<string, Position>): {
  width: number;
  height: number;
} {
  let width = 0;
  let height = 0;
  for (const pos of positions.values()) {
    width = Math.max(width, pos.x + LAYOUT.NODE_WIDTH + LAYOUT.PADDING);
    height = Math.max(height, pos.y + LAYOUT.NODE_HEIGHT + LAYOUT.PADDING);
  }
  return { width, height };
}
