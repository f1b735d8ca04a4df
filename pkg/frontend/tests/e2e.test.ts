/**
 * Scripted session against a live `codesign serve` on the bundled model
 * (spawned by the global setup): the chat loop, SPOF chips, graph focus,
 * and the post-mutation diff outline.
 */
import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import { BASE_URL } from "./global-setup.js";

function mountPage(): void {
  const html = readFileSync(resolve(process.cwd(), "public/index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/)![1];
  document.body.innerHTML = body;
}

describe("UI loop against the running service", () => {
  let app: App;

  beforeAll(async () => {
    mountPage();
    app = new App(document, BASE_URL);
    await app.init();
  });

  it("renders all 17 components of the loaded model", () => {
    expect(document.querySelectorAll("#graph-svg g.node").length).toBe(17);
    expect(
      document.querySelector('g.node[data-name="ImageProcessor"] text.gate')
        ?.textContent
    ).toBe("2OO3(Camera1,Camera2,Camera3)");
    expect(
      document.querySelector('g.node[data-name="Camera1"] text.name')
        ?.textContent
    ).toContain("[START]");
  });

  it("disables send while the prompt is empty", () => {
    const input = document.querySelector("#prompt") as HTMLInputElement;
    const send = document.querySelector("#send") as HTMLButtonElement;
    input.value = "";
    input.dispatchEvent(new Event("input"));
    expect(send.disabled).toBe(true);
    input.value = "hello";
    input.dispatchEvent(new Event("input"));
    expect(send.disabled).toBe(false);
    input.value = "";
    input.dispatchEvent(new Event("input"));
  });

  it("renders six SPOF chips that focus the graph", async () => {
    await app.send("What are the single points of failure?");
    const turns = document.querySelectorAll(".turn.assistant");
    const last = turns[turns.length - 1];
    const chips = Array.from(last.querySelectorAll(".chip"));
    const names = chips.map((c) => c.getAttribute("data-node"));
    expect(new Set(names)).toEqual(
      new Set([
        "CollisionAvoidance",
        "GPS",
        "Map",
        "PathPlanner",
        "SensorFusion",
        "VehicleController",
      ])
    );
    expect(chips.length).toBe(6);

    const sensorChip = chips.find(
      (c) => c.getAttribute("data-node") === "SensorFusion"
    ) as HTMLButtonElement;
    sensorChip.click();
    const focused = document.querySelector("#graph-svg g.node.focused");
    expect(focused?.getAttribute("data-name")).toBe("SensorFusion");

    // SPOF highlight applied to exactly the six reported nodes
    expect(document.querySelectorAll("#graph-svg g.node.spof").length).toBe(6);

    // structured result and decision trace are attached, collapsed
    const details = last.querySelectorAll("details");
    expect(details.length).toBe(2);
    for (const d of Array.from(details)) {
      expect((d as HTMLDetailsElement).open).toBe(false);
    }
  });

  it("outlines replicas and bumps the revision after a replicate prompt", async () => {
    expect(document.querySelector("#revision-counter")?.textContent).toBe(
      "rev 0"
    );
    await app.send("Replicate SensorFusion.");

    expect(document.querySelector("#revision-counter")?.textContent).toBe(
      "rev 1"
    );
    const outlined = Array.from(
      document.querySelectorAll("#graph-svg g.node.diff-new")
    ).map((g) => g.getAttribute("data-name"));
    expect(new Set(outlined)).toEqual(
      new Set(["SensorFusion_1", "SensorFusion_2"])
    );
    expect(
      document.querySelector('#graph-svg g.node[data-name="SensorFusion"]')
    ).toBeNull();
    expect(document.querySelectorAll("#graph-svg g.node").length).toBe(18);
  });

  it("keeps memory across turns for the last-fault reference", async () => {
    await app.send("What happens if Radar1, Radar2 and IMU have a fault?");
    const seeded = document.querySelectorAll("#graph-svg g.node.faulty-seeded");
    expect(seeded.length).toBe(3);
    const derived = document.querySelectorAll(
      "#graph-svg g.node.faulty-derived"
    );
    expect(
      Array.from(derived).map((g) => g.getAttribute("data-name"))
    ).toEqual(["SignalProcessor"]);

    await app.send("Explain the critical path, given the last fault.");
    const turns = document.querySelectorAll(".turn.assistant");
    const last = turns[turns.length - 1];
    const resultJson = last.querySelector("details.result pre")?.textContent;
    expect(resultJson).toContain('"excluded_faults"');
    expect(resultJson).toContain("SignalProcessor");
  });
});
