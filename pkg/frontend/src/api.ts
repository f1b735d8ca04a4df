import type { ChatResponse, GraphSnapshot } from "./types.js";

/** Thin fetch client; the UI never touches the model except through it. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        detail = body?.error?.message ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new Error(`request failed: ${detail}`);
    }
    return (await response.json()) as T;
  }

  fetchModel(): Promise<GraphSnapshot> {
    return this.request<GraphSnapshot>("/api/model?format=json");
  }

  chat(session: string, prompt: string): Promise<ChatResponse> {
    return this.request<ChatResponse>("/api/chat", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session, prompt }),
    });
  }
}
