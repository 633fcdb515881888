import type { BookDetail, SceneResponse, UploadResult } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed wrapper over the service HTTP API; the only network surface. */
export class ApiClient {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async uploadLibrary(file: Blob, filename = "library.csv"): Promise<UploadResult> {
    const form = new FormData();
    form.append("file", file, filename);
    const response = await this.request("/api/library", { method: "POST", body: form });
    return response.json();
  }

  async getScene(libraryId: string, params: Record<string, string> = {}): Promise<SceneResponse> {
    const query = new URLSearchParams(params).toString();
    const suffix = query ? `?${query}` : "";
    const response = await this.request(`/api/library/${libraryId}/scene${suffix}`);
    return response.json();
  }

  async postMove(libraryId: string, from: number, to: number, revision: number): Promise<SceneResponse> {
    const response = await this.request(`/api/library/${libraryId}/move`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ from, to, revision }),
    });
    return response.json();
  }

  async getBook(libraryId: string, isbn13: string): Promise<BookDetail> {
    const response = await this.request(`/api/library/${libraryId}/book/${isbn13}`);
    return response.json();
  }

  blueprintUrl(libraryId: string): string {
    return `${this.baseUrl}/api/library/${libraryId}/export.svg?labels=true`;
  }

  async fetchBlueprint(libraryId: string): Promise<string> {
    const response = await this.request(`/api/library/${libraryId}/export.svg?labels=true`);
    return response.text();
  }
}
