import { describe, expect, it } from "vitest";

import { canvasSize, layeredLayout } from "../src/layout.js";
import type { GraphEdge } from "../src/types.js";

const edge = (from: string, to: string): GraphEdge => ({ from, to });

describe("layeredLayout", () => {
  it("puts sources on layer 0 and respects edge direction", () => {
    const positions = layeredLayout(
      ["a", "b", "c", "d"],
      [edge("a", "b"), edge("b", "c"), edge("a", "c"), edge("d", "c")]
    );
    expect(positions.get("a")!.layer).toBe(0);
    expect(positions.get("d")!.layer).toBe(0);
    expect(positions.get("b")!.layer).toBe(1);
    // longest path wins: a->b->c makes c layer 2 despite a->c
    expect(positions.get("c")!.layer).toBe(2);
    for (const e of [edge("a", "b"), edge("b", "c"), edge("d", "c")]) {
      expect(positions.get(e.from)!.x).toBeLessThan(positions.get(e.to)!.x);
    }
  });

  it("is deterministic for a given node order", () => {
    const names = ["n1", "n2", "n3", "n4", "n5"];
    const edges = [edge("n1", "n3"), edge("n2", "n3"), edge("n3", "n4")];
    const first = layeredLayout(names, edges);
    const second = layeredLayout(names, edges);
    expect([...first.entries()]).toEqual([...second.entries()]);
  });

  it("keeps isolated nodes on layer 0 and sizes the canvas to fit", () => {
    const positions = layeredLayout(["solo", "x", "y"], [edge("x", "y")]);
    expect(positions.get("solo")!.layer).toBe(0);
    const { width, height } = canvasSize(positions);
    for (const pos of positions.values()) {
      expect(pos.x).toBeLessThan(width);
      expect(pos.y).toBeLessThan(height);
    }
  });

  it("stacks nodes of one layer in snapshot order", () => {
    const positions = layeredLayout(["s1", "s2", "s3"], []);
    expect(positions.get("s1")!.y).toBeLessThan(positions.get("s2")!.y);
    expect(positions.get("s2")!.y).toBeLessThan(positions.get("s3")!.y);
  });
});
