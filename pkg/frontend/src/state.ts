import type { SceneResponse } from "./types.js";

export interface DragState {
  sourceIndex: number;
  currentTargetIndex: number;
}

/**
 * Client view state. The scene mirror is server-authoritative: colors and
 * positions are never computed locally, and a scene with a lower revision
 * than one already shown is never applied.
 */
export class ViewStore {
  libraryId: string | null = null;
  scene: SceneResponse | null = null;
  selectedStrategy = "authorseries";
  selectedEncoding = "original";
  hoveredIsbn: string | null = null;
  drag: DragState | null = null;
  /** Revision carried by the in-flight mutation, if any. */
  pendingRevision: number | null = null;

  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((fn) => fn !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Apply a server scene; returns false (and changes nothing) on a stale revision. */
  applyScene(scene: SceneResponse): boolean {
    if (this.scene && scene.library_id === this.scene.library_id && scene.revision < this.scene.revision) {
      return false;
    }
    this.libraryId = scene.library_id;
    this.scene = scene;
    this.selectedStrategy = scene.strategy;
    this.selectedEncoding = scene.encoding;
    if (this.drag && this.drag.sourceIndex >= scene.order.length) this.drag = null;
    this.emit();
    return true;
  }

  beginDrag(sourceIndex: number): void {
    if (!this.scene || sourceIndex < 0 || sourceIndex >= this.scene.order.length) return;
    this.drag = { sourceIndex, currentTargetIndex: sourceIndex };
    this.emit();
  }

  updateDrag(targetIndex: number): void {
    if (!this.drag || !this.scene) return;
    const max = this.scene.order.length - 1;
    this.drag = {
      sourceIndex: this.drag.sourceIndex,
      currentTargetIndex: Math.min(Math.max(targetIndex, 0), max),
    };
    this.emit();
  }

  endDrag(): DragState | null {
    const drag = this.drag;
    this.drag = null;
    if (drag) this.emit();
    return drag;
  }

  setHovered(isbn13: string | null): void {
    this.hoveredIsbn = isbn13;
  }
}
