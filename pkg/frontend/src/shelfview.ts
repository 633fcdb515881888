import type { SceneResponse, ShelfSpec } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CAPTION_BAND_MM = 18;
const OVERFLOW_GAP_MM = 8;

export interface ShelfViewHandlers {
  onHover(isbn13: string): void;
  onDrop(sourceOrderIndex: number, targetOrderIndex: number): void;
}

/** Uniform fit-to-width factor mapping scene millimetres to CSS pixels. */
export function fitScale(spec: ShelfSpec, cssWidthPx: number): number {
  return cssWidthPx / spec.shelf_width_mm;
}

/**
 * The placement slot (index into scene.placements, reading order) a pointer
 * at (shelfIndex, xMm) falls into: before the first spine whose midpoint
 * lies right of the pointer.
 */
export function insertionSlot(scene: SceneResponse, shelfIndex: number, xMm: number): number {
  let slot = 0;
  for (let i = 0; i < scene.placements.length; i++) {
    const placement = scene.placements[i];
    if (placement.shelf_index < shelfIndex) {
      slot = i + 1;
      continue;
    }
    if (placement.shelf_index > shelfIndex) break;
    const midpoint = placement.x_offset_mm + placement.occupied_width_mm / 2;
    if (xMm > midpoint) slot = i + 1;
    else break;
  }
  return slot;
}

/**
 * Convert a placement slot into the move endpoint's target index, i.e. a
 * position in the order after the dragged element has been removed.
 */
export function moveTargetIndex(scene: SceneResponse, fromOrderIndex: number, slot: number): number {
  let orderIndex: number;
  if (slot >= scene.placements.length) {
    const last = scene.placements[scene.placements.length - 1];
    orderIndex = last ? scene.order.indexOf(last.isbn13) + 1 : 0;
  } else {
    orderIndex = scene.order.indexOf(scene.placements[slot].isbn13);
  }
  if (fromOrderIndex < orderIndex) orderIndex -= 1;
  return Math.min(Math.max(orderIndex, 0), Math.max(scene.order.length - 1, 0));
}

/** Renders the server scene as SVG spines and wires hover + drag-and-drop. */
export class ShelfView {
  private scene: SceneResponse | null = null;
  private dragSourceIndex: number | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly handlers: ShelfViewHandlers,
  ) {}

  /** Pointer drop entry point, also used directly by tests (no jsdom layout). */
  dropAt(sourceOrderIndex: number, shelfIndex: number, xMm: number): void {
    if (!this.scene) return;
    const slot = insertionSlot(this.scene, shelfIndex, xMm);
    const target = moveTargetIndex(this.scene, sourceOrderIndex, slot);
    this.handlers.onDrop(sourceOrderIndex, target);
  }

  render(scene: SceneResponse): void {
    this.scene = scene;
    const spec = scene.spec;
    const rowPitch = spec.shelf_clearance_mm + CAPTION_BAND_MM;
    const overflowHeight = scene.overflow.length ? spec.shelf_clearance_mm : 0;
    const totalHeight =
      spec.shelf_count * rowPitch + (overflowHeight ? OVERFLOW_GAP_MM + overflowHeight + CAPTION_BAND_MM : 0);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${spec.shelf_width_mm} ${totalHeight}`);
    svg.setAttribute("class", "shelf-view");
    svg.setAttribute("preserveAspectRatio", "xMidYMin meet");

    for (let i = 0; i < spec.shelf_count; i++) {
      const baseline = i * rowPitch + spec.shelf_clearance_mm;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", "0");
      line.setAttribute("y1", String(baseline));
      line.setAttribute("x2", String(spec.shelf_width_mm));
      line.setAttribute("y2", String(baseline));
      line.setAttribute("class", "shelf-line");
      svg.appendChild(line);
    }

    for (const placement of scene.placements) {
      const baseline = placement.shelf_index * rowPitch + spec.shelf_clearance_mm;
      const h = placement.orientation === "Upright" ? placement.height_mm : placement.spine_thickness_mm;
      const rect = this.spineRect(
        placement.isbn13,
        placement.x_offset_mm,
        baseline - h,
        placement.occupied_width_mm,
        h,
        placement.display_color,
        scene.order.indexOf(placement.isbn13),
        placement.shelf_index,
      );
      svg.appendChild(rect);
    }

    if (scene.overflow.length) {
      const stripBaseline = spec.shelf_count * rowPitch + OVERFLOW_GAP_MM + overflowHeight;
      let x = 0;
      for (const entry of scene.overflow) {
        const width = 20;
        const rect = this.spineRect(
          entry.isbn13,
          x,
          stripBaseline - overflowHeight * 0.8,
          width,
          overflowHeight * 0.8,
          entry.display_color,
          scene.order.indexOf(entry.isbn13),
          -1,
        );
        rect.classList.add("overflow-spine");
        svg.appendChild(rect);
        x += width + 2;
      }
    }

    this.container.replaceChildren(svg);
  }

  private spineRect(
    isbn13: string,
    x: number,
    y: number,
    w: number,
    h: number,
    fill: string,
    orderIndex: number,
    shelfIndex: number,
  ): SVGRectElement {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(x));
    rect.setAttribute("y", String(y));
    rect.setAttribute("width", String(w));
    rect.setAttribute("height", String(h));
    rect.setAttribute("fill", fill);
    rect.setAttribute("class", "spine");
    rect.dataset.isbn = isbn13;
    rect.dataset.orderIndex = String(orderIndex);
    rect.dataset.shelfIndex = String(shelfIndex);

    rect.addEventListener("mouseover", () => this.handlers.onHover(isbn13));
    rect.addEventListener("pointerdown", () => {
      this.dragSourceIndex = orderIndex;
    });
    rect.addEventListener("pointerup", (event) => {
      if (this.dragSourceIndex === null || !this.scene || shelfIndex < 0) return;
      const source = this.dragSourceIndex;
      this.dragSourceIndex = null;
      const point = this.toSceneMm(event);
      this.dropAt(source, shelfIndex, point);
    });
    return rect;
  }

  private toSceneMm(event: PointerEvent): number {
    const svg = this.container.querySelector("svg");
    if (!svg || !this.scene) return 0;
    const bounds = svg.getBoundingClientRect();
    if (bounds.width === 0) return 0;
    const scale = this.scene.spec.shelf_width_mm / bounds.width;
    return (event.clientX - bounds.left) * scale;
  }
}
