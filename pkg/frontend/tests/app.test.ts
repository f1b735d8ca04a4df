/** Unit tests for the page controller with a stubbed fetch (no service). */
import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { App } from "../src/app.js";
import type { GraphSnapshot } from "../src/types.js";

const SNAPSHOT: GraphSnapshot = {
  revision: 0,
  nodes: [
    { name: "A", gate: null, start: true, end: false, attributes: [] },
    { name: "B", gate: "OR(A)", start: false, end: true, attributes: [] },
  ],
  edges: [{ from: "A", to: "B" }],
};

function mountPage(): void {
  const html = readFileSync(resolve(process.cwd(), "public/index.html"), "utf-8");
  document.body.innerHTML = html.match(/<body>([\s\S]*)<\/body>/)![1];
}

const realFetch = globalThis.fetch;

afterEach(() => {
  globalThis.fetch = realFetch;
});

describe("App against a stubbed backend", () => {
  beforeEach(mountPage);

  it("shows an inline error banner and keeps the transcript on failure", async () => {
    globalThis.fetch = vi
      .fn()
      .mockResolvedValueOnce(
        new Response(JSON.stringify(SNAPSHOT), { status: 200 })
      )
      .mockRejectedValue(new TypeError("network down"));

    const app = new App(document, "http://stub");
    await app.init();
    await app.send("What are the single points of failure?");

    const banner = document.querySelector("#error-banner") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(document.querySelector("#error-text")?.textContent).toContain(
      "network down"
    );
    // the user turn stays in the transcript
    expect(document.querySelectorAll(".turn.user").length).toBe(1);
  });

  it("retry resends the failed prompt", async () => {
    const chatResponse = {
      session: "ui",
      response: "B is the single point of failure.",
      result: { spofs: ["B"], witness: { B: "B" } },
      trace: [],
      tool: "FindSpofs",
      revision: 0,
    };
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(
        new Response(JSON.stringify(SNAPSHOT), { status: 200 })
      )
      .mockRejectedValueOnce(new TypeError("flaky"))
      .mockResolvedValueOnce(
        new Response(JSON.stringify(chatResponse), { status: 200 })
      );
    globalThis.fetch = fetchMock;

    const app = new App(document, "http://stub");
    await app.init();
    await app.send("What are the single points of failure?");
    expect(
      (document.querySelector("#error-banner") as HTMLElement).hidden
    ).toBe(false);

    (document.querySelector("#retry") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      expect(document.querySelectorAll(".turn.assistant").length).toBe(1);
    });
    expect(
      (document.querySelector("#error-banner") as HTMLElement).hidden
    ).toBe(true);
    const chip = document.querySelector(".chip");
    expect(chip?.getAttribute("data-node")).toBe("B");
  });

  it("never mutates the model outside of POST /api/chat or replicate", async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(new Response(JSON.stringify(SNAPSHOT), { status: 200 }));
    globalThis.fetch = fetchMock;

    const app = new App(document, "http://stub");
    await app.init();
    const urls = fetchMock.mock.calls.map((call) => String(call[0]));
    expect(urls).toEqual(["http://stub/api/model?format=json"]);
  });
});
