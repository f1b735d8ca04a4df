import { ApiClient } from "./api.js";
import { extractNodeNames, renderChips } from "./chips.js";
import { GraphView } from "./graph.js";
import {
  ChatResponse,
  GraphSnapshot,
  Highlights,
  emptyHighlights,
} from "./types.js";

/**
 * Page controller: chat transcript on the left, live graph on the right.
 * The graph snapshot is refetched whenever a chat response is stamped with
 * a newer model revision; nodes added by the mutation get a diff outline.
 */
export class App {
  readonly api: ApiClient;
  readonly graph: GraphView;
  snapshot: GraphSnapshot | null = null;

  private session = "ui";
  private lastPrompt = "";
  private inFlight = false;

  constructor(private doc: Document, baseUrl = "") {
    this.api = new ApiClient(baseUrl);
    this.graph = new GraphView(
      doc.querySelector("#graph-svg") as SVGSVGElement
    );
    this.wireForm();
  }

  private el<T extends HTMLElement>(selector: string): T {
    const found = this.doc.querySelector(selector);
    if (!found) throw new Error(`missing element ${selector}`);
    return found as T;
  }

  private wireForm(): void {
    const form = this.el<HTMLFormElement>("#chat-form");
    const input = this.el<HTMLInputElement>("#prompt");
    const send = this.el<HTMLButtonElement>("#send");
    input.addEventListener("input", () => {
      send.disabled = input.value.trim() === "" || this.inFlight;
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const prompt = input.value.trim();
      if (!prompt || this.inFlight) return;
      input.value = "";
      send.disabled = true;
      void this.send(prompt);
    });
    this.el<HTMLButtonElement>("#retry").addEventListener("click", () => {
      if (this.lastPrompt && !this.inFlight) void this.send(this.lastPrompt);
    });
  }

  async init(): Promise<void> {
    this.snapshot = await this.api.fetchModel();
    this.graph.render(this.snapshot, emptyHighlights());
    this.setRevision(this.snapshot.revision);
  }

  async send(prompt: string): Promise<void> {
    this.lastPrompt = prompt;
    this.inFlight = true;
    this.hideError();
    this.appendUserTurn(prompt);
    try {
      const response = await this.api.chat(this.session, prompt);
      const diff = await this.syncSnapshot(response.revision);
      const highlights = this.highlightsFor(response);
      highlights.diff = diff;
      if (this.snapshot) this.graph.render(this.snapshot, highlights);
      this.setRevision(response.revision);
      this.appendAssistantTurn(response);
    } catch (error) {
      this.showError(error instanceof Error ? error.message : String(error));
    } finally {
      this.inFlight = false;
    }
  }

  /** Refetches the snapshot on revision mismatch; returns added node names. */
  private async syncSnapshot(revision: number): Promise<Set<string>> {
    if (this.snapshot && this.snapshot.revision === revision) return new Set();
    const before = new Set(this.snapshot?.nodes.map((n) => n.name) ?? []);
    this.snapshot = await this.api.fetchModel();
    return new Set(
      this.snapshot.nodes.map((n) => n.name).filter((n) => !before.has(n))
    );
  }

  private highlightsFor(response: ChatResponse): Highlights {
    const highlights = emptyHighlights();
    const result = response.result as Record<string, unknown>;
    const asSet = (key: string) =>
      new Set(Array.isArray(result[key]) ? (result[key] as string[]) : []);
    switch (response.tool) {
      case "PropagateFaults":
        highlights.seeded = asSet("seeded");
        highlights.derived = asSet("derived");
        break;
      case "FindSpofs":
        highlights.spofs = asSet("spofs");
        break;
      case "CriticalPath":
        highlights.onPath = asSet("node_union");
        break;
      default:
        break;
    }
    return highlights;
  }

  private appendUserTurn(prompt: string): void {
    const turn = this.doc.createElement("div");
    turn.className = "turn user";
    const text = this.doc.createElement("div");
    text.className = "bubble";
    text.textContent = prompt;
    turn.appendChild(text);
    this.transcript().appendChild(turn);
  }

  private appendAssistantTurn(response: ChatResponse): void {
    const turn = this.doc.createElement("div");
    turn.className = "turn assistant";

    const text = this.doc.createElement("div");
    text.className = "bubble";
    text.textContent = response.response;
    turn.appendChild(text);

    const known = new Set(this.snapshot?.nodes.map((n) => n.name) ?? []);
    const names = extractNodeNames(response.result, known);
    if (names.length) {
      turn.appendChild(
        renderChips(this.doc, names, (name) => this.graph.focus(name))
      );
    }

    turn.appendChild(
      this.details("result", "Structured result", response.result)
    );
    turn.appendChild(this.details("trace", "Decision trace", response.trace));
    this.transcript().appendChild(turn);
  }

  private details(kind: string, label: string, payload: unknown): HTMLElement {
    const details = this.doc.createElement("details");
    details.className = kind;
    const summary = this.doc.createElement("summary");
    summary.textContent = label;
    details.appendChild(summary);
    const pre = this.doc.createElement("pre");
    pre.textContent = JSON.stringify(payload, null, 2);
    details.appendChild(pre);
    return details;
  }

  private transcript(): HTMLElement {
    return this.el("#transcript");
  }

  private setRevision(revision: number): void {
    this.el("#revision-counter").textContent = `rev ${revision}`;
  }

  private showError(message: string): void {
    const banner = this.el("#error-banner");
    banner.hidden = false;
    this.el("#error-text").textContent = message;
  }

  private hideError(): void {
    this.el("#error-banner").hidden = true;
  }
}
