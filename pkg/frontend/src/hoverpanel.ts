import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type { BookDetail } from "./types.js";

/**
 * Left-hand metadata panel. Hover lookups are debounced and single-flight:
 * at most one detail request is on the wire at a time, and rapid hovers
 * collapse to the most recent target. Responses are cached per
 * (revision, isbn) so re-hovers after unrelated scenes still hit the cache.
 */
export class HoverPanel {
  private revision = 0;
  private libraryId: string | null = null;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private pendingIsbn: string | null = null;
  private cache = new Map<string, BookDetail>();

  constructor(
    private readonly element: HTMLElement,
    private readonly api: ApiClient,
    private readonly delayMs = 120,
  ) {}

  setLibrary(libraryId: string, revision: number): void {
    if (libraryId !== this.libraryId) this.cache.clear();
    this.libraryId = libraryId;
    this.revision = revision;
  }

  hover(isbn13: string): void {
    if (!this.libraryId) return;
    const cached = this.cache.get(this.cacheKey(isbn13));
    if (cached) {
      this.renderDetail(cached);
      return;
    }
    this.pendingIsbn = isbn13;
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.drainPending();
    }, this.delayMs);
  }

  private cacheKey(isbn13: string): string {
    return `${this.revision}:${isbn13}`;
  }

  private async drainPending(): Promise<void> {
    if (this.inFlight || !this.pendingIsbn || !this.libraryId) return;
    const isbn13 = this.pendingIsbn;
    this.pendingIsbn = null;
    this.inFlight = true;
    try {
      const detail = await this.api.getBook(this.libraryId, isbn13);
      this.cache.set(this.cacheKey(isbn13), detail);
      this.renderDetail(detail);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) this.renderUnavailable();
    } finally {
      this.inFlight = false;
    }
    if (this.pendingIsbn) void this.drainPending();
  }

  private renderDetail(detail: BookDetail): void {
    const rating = detail.average_rating === null ? "unrated" : detail.average_rating.toFixed(2);
    this.element.replaceChildren();
    const title = document.createElement("h2");
    title.className = "detail-title";
    title.textContent = detail.title;
    const rows: Array<[string, string]> = [
      ["Author", detail.author_display],
      ["Genre", detail.genre],
      ["Age band", detail.age_band],
      ["Rating", rating],
      ["Size", `${detail.height_mm} mm x ${detail.spine_thickness_mm} mm`],
      ["ISBN-13", detail.isbn13],
    ];
    const list = document.createElement("dl");
    for (const [label, value] of rows) {
      const dt = document.createElement("dt");
      dt.textContent = label;
      const dd = document.createElement("dd");
      dd.textContent = value;
      list.append(dt, dd);
    }
    const swatch = document.createElement("span");
    swatch.className = "spine-swatch";
    swatch.style.backgroundColor = detail.spine_color;
    swatch.title = detail.spine_color;
    this.element.append(title, swatch, list);
  }

  private renderUnavailable(): void {
    const message = document.createElement("p");
    message.className = "detail-missing";
    message.textContent = "metadata unavailable";
    this.element.replaceChildren(message);
  }
}
