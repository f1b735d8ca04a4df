/** Payload shapes of the codesign HTTP API. */

export interface GraphNode {
  name: string;
  gate: string | null;
  start: boolean;
  end: boolean;
  attributes: [string, string][];
}

export interface GraphEdge {
  from: string;
  to: string;
}

export interface GraphSnapshot {
  revision: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface DecisionStep {
  node: string;
  options: string[];
  choice: string | null;
  attempts: number;
  args?: Record<string, unknown>;
}

export interface ChatResponse {
  session: string;
  response: string;
  result: Record<string, unknown>;
  trace: DecisionStep[];
  tool: string | null;
  revision: number;
}

/** Highlight sets applied to the graph view. */
export interface Highlights {
  seeded: Set<string>;
  derived: Set<string>;
  spofs: Set<string>;
  onPath: Set<string>;
  diff: Set<string>;
}

export function emptyHighlights(): Highlights {
  return {
    seeded: new Set(),
    derived: new Set(),
    spofs: new Set(),
    onPath: new Set(),
    diff: new Set(),
  };
}
