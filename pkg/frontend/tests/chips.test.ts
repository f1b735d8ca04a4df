import { describe, expect, it } from "vitest";

import { extractNodeNames, renderChips } from "../src/chips.js";

const KNOWN = new Set(["GPS", "Map", "SensorFusion", "VehicleController"]);

describe("extractNodeNames", () => {
  it("collects strings, array items and object keys that name nodes", () => {
    const result = {
      spofs: ["GPS", "Map"],
      witness: { GPS: "VehicleController", Map: "VehicleController" },
      note: "not a node",
    };
    expect(extractNodeNames(result, KNOWN)).toEqual([
      "GPS",
      "Map",
      "VehicleController",
    ]);
  });

  it("keeps first-appearance order and deduplicates", () => {
    const result = { a: ["Map", "GPS"], b: ["GPS", "Map"] };
    expect(extractNodeNames(result, KNOWN)).toEqual(["Map", "GPS"]);
  });

  it("ignores names that are not in the current graph", () => {
    expect(extractNodeNames({ target: "Ghost" }, KNOWN)).toEqual([]);
  });
});

describe("renderChips", () => {
  it("renders one button per name and focuses on click", () => {
    const focused: string[] = [];
    const container = renderChips(document, ["GPS", "Map"], (name) =>
      focused.push(name)
    );
    const buttons = container.querySelectorAll("button.chip");
    expect(buttons.length).toBe(2);
    expect(buttons[0].getAttribute("data-node")).toBe("GPS");
    (buttons[1] as HTMLButtonElement).click();
    expect(focused).toEqual(["Map"]);
  });
});
