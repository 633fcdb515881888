export interface ScenePlacement {
  isbn13: string;
  shelf_index: number;
  x_offset_mm: number;
  orientation: "Upright" | "Flat";
  occupied_width_mm: number;
  height_mm: number;
  spine_thickness_mm: number;
  title: string;
  author: string;
  display_color: string;
}

export interface OverflowEntry {
  isbn13: string;
  title: string;
  author: string;
  display_color: string;
}

export interface ShelfSpec {
  shelf_count: number;
  shelf_width_mm: number;
  shelf_clearance_mm: number;
}

export interface SceneResponse {
  library_id: string;
  revision: number;
  manual: boolean;
  manual_discarded: boolean;
  strategy: string;
  encoding: string;
  spec: ShelfSpec;
  order: string[];
  placements: ScenePlacement[];
  overflow: OverflowEntry[];
}

export interface IngestReport {
  accepted: number;
  rejected: [number, string][];
  deduplicated: number;
}

export interface UploadResult {
  library_id: string;
  ingest_report: IngestReport;
}

export interface BookDetail {
  isbn13: string;
  title: string;
  author_display: string;
  genre: string;
  age_band: string;
  average_rating: number | null;
  height_mm: number;
  spine_thickness_mm: number;
  spine_color: string;
  in_overflow: boolean;
  [key: string]: unknown;
}

export const SORT_KEYS = ["size", "color", "alpha", "authorseries", "rating", "genre", "age"] as const;
export const ENCODINGS = ["original", "age", "genre", "rating"] as const;

export type SortKeyToken = (typeof SORT_KEYS)[number];
export type EncodingToken = (typeof ENCODINGS)[number];
