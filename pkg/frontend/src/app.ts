import { ApiClient, ApiError } from "./api.js";
import { ControlPanel, showToast, type ConfirmFn } from "./controls.js";
import { HoverPanel } from "./hoverpanel.js";
import { ShelfView } from "./shelfview.js";
import { ViewStore } from "./state.js";
import type { UploadResult } from "./types.js";

export interface AppElements {
  shelf: HTMLElement;
  sortPanel: HTMLElement;
  encodingMenu: HTMLElement;
  detailPanel: HTMLElement;
}

export type SaveFn = (svgText: string, filename: string) => void;

function defaultSave(svgText: string, filename: string): void {
  const blob = new Blob([svgText], { type: "image/svg+xml" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export interface AppOptions {
  confirmFn?: ConfirmFn;
  hoverDelayMs?: number;
  saveFn?: SaveFn;
}

/**
 * Wires the server scene to the shelf canvas, control panel, encoding menu
 * and hover panel. The client never reorders or recolors on its own: every
 * change round-trips through the API and lands via ViewStore.applyScene.
 */
export class App {
  readonly store = new ViewStore();
  readonly shelfView: ShelfView;
  readonly controls: ControlPanel;
  readonly hoverPanel: HoverPanel;
  private readonly save: SaveFn;
  private mutationInFlight = false;

  constructor(
    elements: AppElements,
    readonly api: ApiClient,
    options: AppOptions = {},
  ) {
    this.save = options.saveFn ?? defaultSave;
    this.hoverPanel = new HoverPanel(elements.detailPanel, api, options.hoverDelayMs);
    this.shelfView = new ShelfView(elements.shelf, {
      onHover: (isbn13) => this.hover(isbn13),
      onDrop: (from, to) => void this.drop(from, to),
    });
    this.controls = new ControlPanel(
      elements.sortPanel,
      elements.encodingMenu,
      {
        onControlChange: (params) => this.changeControls(params),
        onExport: () => void this.downloadBlueprint(),
      },
      options.confirmFn,
    );
    this.store.subscribe(() => {
      const scene = this.store.scene;
      if (!scene) return;
      this.shelfView.render(scene);
      this.controls.reflect(scene);
      this.hoverPanel.setLibrary(scene.library_id, scene.revision);
    });
  }

  async upload(file: Blob, filename = "library.csv"): Promise<UploadResult> {
    const result = await this.api.uploadLibrary(file, filename);
    const scene = await this.api.getScene(result.library_id);
    this.store.applyScene(scene);
    return result;
  }

  /** Returns false when the server rejected the parameters (controls revert). */
  async changeControls(params: Record<string, string>): Promise<boolean> {
    if (!this.store.libraryId) return false;
    try {
      const scene = await this.api.getScene(this.store.libraryId, params);
      if (scene.manual_discarded) showToast("manual edits were discarded");
      this.store.applyScene(scene);
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        showToast(`rejected: ${error.message}`);
        return false;
      }
      showToast("network error; scene unchanged");
      return false;
    }
  }

  async drop(sourceIndex: number, targetIndex: number): Promise<void> {
    const scene = this.store.scene;
    if (!scene || !this.store.libraryId || this.mutationInFlight) return;
    this.mutationInFlight = true;
    this.store.pendingRevision = scene.revision;
    try {
      const moved = await this.api.postMove(this.store.libraryId, sourceIndex, targetIndex, scene.revision);
      this.store.applyScene(moved);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        const fresh = await this.api.getScene(this.store.libraryId);
        this.store.applyScene(fresh);
        showToast("scene changed elsewhere; drop discarded");
      } else {
        showToast("move failed; scene unchanged");
      }
    } finally {
      this.store.pendingRevision = null;
      this.mutationInFlight = false;
    }
  }

  hover(isbn13: string): void {
    this.store.setHovered(isbn13);
    this.hoverPanel.hover(isbn13);
  }

  async downloadBlueprint(): Promise<string | null> {
    if (!this.store.libraryId) return null;
    try {
      const svgText = await this.api.fetchBlueprint(this.store.libraryId);
      this.save(svgText, "shelves.svg");
      return svgText;
    } catch {
      showToast("export failed");
      return null;
    }
  }
}
