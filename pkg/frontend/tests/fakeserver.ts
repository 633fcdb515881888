/**
 * In-memory stand-in for the librarylens service, faithful to the HTTP
 * contract the UI depends on: scene parameters mutate state and bump the
 * revision, moves are optimistic-locked via the revision, sorts discard
 * manual orders with a flag, colors come only from the active encoding.
 */

import type { BookDetail, SceneResponse, ScenePlacement, ShelfSpec } from "../src/types.js";

export interface FakeBook {
  isbn13: string;
  title: string;
  author: string;
  height_mm: number;
  spine_thickness_mm: number;
  genre: string;
  age_band: string;
  average_rating: number | null;
  spine_color: string;
}

const GENRE_COLORS: Record<string, string> = {
  Fantasy: "#6a3d9a",
  SciFi: "#1f78b4",
  Mystery: "#33a02c",
  Horror: "#e31a1c",
  Other: "#999999",
};
const AGE_COLORS: Record<string, string> = {
  Children: "#fee5d9",
  MiddleGrade: "#fcae91",
  YoungAdult: "#fb6a4a",
  Adult: "#a50f15",
};

function ratingColor(rating: number | null): string {
  if (rating === null) return "#808080";
  const t = Math.min(1, Math.max(0, (rating - 1) / 4));
  const channel = (low: number, high: number) => Math.round(low + t * (high - low));
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(channel(215, 26))}${hex(channel(48, 152))}${hex(channel(39, 80))}`;
}

interface LibState {
  id: string;
  order: string[];
  manual: boolean;
  strategy: string;
  encoding: string;
  spec: ShelfSpec;
  revision: number;
}

export interface RequestLogEntry {
  method: string;
  path: string;
}

export class FakeServer {
  readonly books = new Map<string, FakeBook>();
  readonly libraries = new Map<string, LibState>();
  readonly log: RequestLogEntry[] = [];
  detailDelayMs = 0;
  private nextId = 1;

  constructor(books: FakeBook[]) {
    for (const book of books) this.books.set(book.isbn13, book);
  }

  upload(csvText: string): { library_id: string; ingest_report: unknown } {
    const lines = csvText.trim().split("\n");
    const header = lines[0].split(",");
    const isbnCol = header.indexOf("ISBN13");
    const order: string[] = [];
    const rejected: [number, string][] = [];
    lines.slice(1).forEach((line, i) => {
      const isbn13 = line.split(",")[isbnCol]?.replace(/[="]/g, "") ?? "";
      if (this.books.has(isbn13)) order.push(isbn13);
      else rejected.push([i + 1, "checksum"]);
    });
    const id = `lib${this.nextId++}`;
    const state: LibState = {
      id,
      order,
      manual: false,
      strategy: "authorseries",
      encoding: "original",
      spec: { shelf_count: 5, shelf_width_mm: 760, shelf_clearance_mm: 300 },
      revision: 1,
    };
    this.sortOrder(state);
    this.libraries.set(id, state);
    return {
      library_id: id,
      ingest_report: { accepted: order.length, rejected, deduplicated: 0 },
    };
  }

  private sortOrder(state: LibState): void {
    const key = state.strategy.replace(/^-/, "");
    const desc = state.strategy.startsWith("-");
    const value = (isbn13: string): string | number => {
      const book = this.books.get(isbn13)!;
      switch (key) {
        case "alpha":
          return book.title.toLowerCase().replace(/^(a|an|the)\s+/, "");
        case "rating":
          return book.average_rating ?? -1;
        case "genre":
          return book.genre;
        case "age":
          return book.age_band;
        case "size":
          return book.height_mm * 1000 + book.spine_thickness_mm;
        case "color":
          return book.spine_color;
        default:
          return book.author;
      }
    };
    state.order.sort((a, b) => {
      const va = value(a);
      const vb = value(b);
      const sign = desc ? -1 : 1;
      if (va < vb) return -sign;
      if (va > vb) return sign;
      return a < b ? -1 : 1;
    });
  }

  displayColor(book: FakeBook, encoding: string): string {
    switch (encoding) {
      case "age":
        return AGE_COLORS[book.age_band] ?? "#a50f15";
      case "genre":
        return GENRE_COLORS[book.genre] ?? "#999999";
      case "rating":
        return ratingColor(book.average_rating);
      default:
        return book.spine_color;
    }
  }

  scene(state: LibState, manualDiscarded = false): SceneResponse {
    const placements: ScenePlacement[] = [];
    const overflow = [];
    let shelf = 0;
    let used = 0;
    for (const isbn13 of state.order) {
      const book = this.books.get(isbn13)!;
      const width = book.spine_thickness_mm;
      if (used + width > state.spec.shelf_width_mm) {
        shelf += 1;
        used = 0;
      }
      if (shelf >= state.spec.shelf_count) {
        overflow.push({
          isbn13,
          title: book.title,
          author: book.author,
          display_color: this.displayColor(book, state.encoding),
        });
        continue;
      }
      placements.push({
        isbn13,
        shelf_index: shelf,
        x_offset_mm: used,
        orientation: "Upright",
        occupied_width_mm: width,
        height_mm: book.height_mm,
        spine_thickness_mm: book.spine_thickness_mm,
        title: book.title,
        author: book.author,
        display_color: this.displayColor(book, state.encoding),
      });
      used += width;
    }
    return {
      library_id: state.id,
      revision: state.revision,
      manual: state.manual,
      manual_discarded: manualDiscarded,
      strategy: state.strategy,
      encoding: state.encoding,
      spec: { ...state.spec },
      order: [...state.order],
      placements,
      overflow,
    };
  }

  getScene(id: string, params: URLSearchParams): { status: number; body: unknown } {
    const state = this.libraries.get(id);
    if (!state) return { status: 404, body: { detail: "unknown library" } };
    let mutated = false;
    let discarded = false;
    const validSorts = ["size", "color", "alpha", "authorseries", "rating", "genre", "age"];
    const sort = params.get("sort");
    if (params.get("shelves") || params.get("width_mm") || params.get("clearance_mm")) {
      const shelves = Number(params.get("shelves") ?? state.spec.shelf_count);
      const width = Number(params.get("width_mm") ?? state.spec.shelf_width_mm);
      const clearance = Number(params.get("clearance_mm") ?? state.spec.shelf_clearance_mm);
      if (!(shelves >= 1) || !(width >= 50) || !(clearance >= 100)) {
        return { status: 422, body: { detail: "bad shelf spec" } };
      }
      state.spec = { shelf_count: shelves, shelf_width_mm: width, shelf_clearance_mm: clearance };
      mutated = true;
    }
    if (sort !== null) {
      if (!validSorts.includes(sort.replace(/^-/, ""))) {
        return { status: 422, body: { detail: `unknown sort key: ${sort}` } };
      }
      discarded = state.manual;
      state.strategy = sort;
      state.manual = false;
      this.sortOrder(state);
      mutated = true;
    }
    const encoding = params.get("encoding");
    if (encoding !== null) {
      if (!["original", "age", "genre", "rating"].includes(encoding)) {
        return { status: 422, body: { detail: `unknown encoding mode: ${encoding}` } };
      }
      state.encoding = encoding;
      mutated = true;
    }
    if (mutated) state.revision += 1;
    return { status: 200, body: this.scene(state, discarded) };
  }

  move(id: string, payload: { from?: number; to?: number; revision?: number }): { status: number; body: unknown } {
    const state = this.libraries.get(id);
    if (!state) return { status: 404, body: { detail: "unknown library" } };
    const { from, to, revision } = payload;
    if (typeof from !== "number" || typeof to !== "number") {
      return { status: 422, body: { detail: "from and to must be integers" } };
    }
    if (revision !== undefined && revision !== state.revision) {
      return { status: 409, body: { detail: "stale revision" } };
    }
    const n = state.order.length;
    if (from < 0 || from >= n || to < 0 || to >= n) {
      return { status: 422, body: { detail: "move indices out of bounds" } };
    }
    const [item] = state.order.splice(from, 1);
    state.order.splice(to, 0, item);
    state.manual = true;
    state.revision += 1;
    return { status: 200, body: this.scene(state) };
  }

  getBook(id: string, isbn13: string): { status: number; body: unknown } {
    const state = this.libraries.get(id);
    const book = this.books.get(isbn13);
    if (!state || !book || !state.order.includes(isbn13)) {
      return { status: 404, body: { detail: "unknown isbn" } };
    }
    const detail: BookDetail = {
      isbn13: book.isbn13,
      title: book.title,
      author_display: book.author,
      genre: book.genre,
      age_band: book.age_band,
      average_rating: book.average_rating,
      height_mm: book.height_mm,
      spine_thickness_mm: book.spine_thickness_mm,
      spine_color: book.spine_color,
      in_overflow: false,
    };
    return { status: 200, body: detail };
  }

  exportSvg(id: string): { status: number; body: string } {
    const state = this.libraries.get(id);
    if (!state) return { status: 404, body: "unknown library" };
    const scene = this.scene(state);
    const rects = scene.placements
      .map((p) => `<rect class="book" x="${p.x_offset_mm}" width="${p.occupied_width_mm}" fill="${p.display_color}"/>`)
      .join("");
    return {
      status: 200,
      body: `<?xml version="1.0" encoding="UTF-8"?><svg xmlns="http://www.w3.org/2000/svg">${rects}</svg>`,
    };
  }
}

/** Adapt the fake server to the fetch signature ApiClient expects. */
export function fetchFromFake(server: FakeServer): (input: string, init?: RequestInit) => Promise<Response> {
  return async (input, init) => {
    const url = new URL(input, "http://fake");
    const method = (init?.method ?? "GET").toUpperCase();
    server.log.push({ method, path: url.pathname });

    const json = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status, headers: { "content-type": "application/json" } });

    if (method === "POST" && url.pathname === "/api/library") {
      const form = init?.body as FormData;
      const file = form.get("file") as Blob;
      const body = server.upload(await file.text());
      return json(201, body);
    }
    let m = url.pathname.match(/^\/api\/library\/([^/]+)\/scene$/);
    if (method === "GET" && m) {
      const { status, body } = server.getScene(m[1], url.searchParams);
      return json(status, body);
    }
    m = url.pathname.match(/^\/api\/library\/([^/]+)\/move$/);
    if (method === "POST" && m) {
      const payload = JSON.parse(String(init?.body ?? "{}"));
      const { status, body } = server.move(m[1], payload);
      return json(status, body);
    }
    m = url.pathname.match(/^\/api\/library\/([^/]+)\/book\/([^/]+)$/);
    if (method === "GET" && m) {
      if (server.detailDelayMs) await new Promise((r) => setTimeout(r, server.detailDelayMs));
      const { status, body } = server.getBook(m[1], m[2]);
      return json(status, body);
    }
    m = url.pathname.match(/^\/api\/library\/([^/]+)\/export\.svg$/);
    if (method === "GET" && m) {
      const { status, body } = server.exportSvg(m[1]);
      return new Response(body, { status, headers: { "content-type": "image/svg+xml" } });
    }
    return json(404, { detail: "no route" });
  };
}

export function makeBooks(count: number): FakeBook[] {
  const genres = ["Fantasy", "SciFi", "Mystery", "Horror", "Other"];
  const ages = ["Children", "MiddleGrade", "YoungAdult", "Adult"];
  const books: FakeBook[] = [];
  for (let i = 0; i < count; i++) {
    const stem = `978200${String(i).padStart(6, "0")}`;
    let total = 0;
    for (let j = 0; j < 12; j++) total += Number(stem[j]) * (j % 2 ? 3 : 1);
    const isbn13 = stem + String((10 - (total % 10)) % 10);
    books.push({
      isbn13,
      title: `Book ${String.fromCharCode(65 + (i % 26))}${i}`,
      author: `Author ${String.fromCharCode(90 - (i % 26))}`,
      height_mm: 180 + (i % 5) * 12,
      spine_thickness_mm: 14 + (i % 7) * 4,
      genre: genres[i % genres.length],
      age_band: ages[i % ages.length],
      average_rating: i % 9 === 8 ? null : 2 + (i % 30) / 10,
      spine_color: `#${((i * 123457) % 0xffffff).toString(16).padStart(6, "0")}`,
    });
  }
  return books;
}

export function csvFor(books: FakeBook[]): string {
  const lines = ["Title,Author,ISBN13"];
  for (const book of books) lines.push(`${book.title},${book.author},="${book.isbn13}"`);
  return lines.join("\n") + "\n";
}
