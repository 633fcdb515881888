import type { SceneResponse } from "./types.js";
import { ENCODINGS, SORT_KEYS } from "./types.js";

export type ConfirmFn = (message: string) => boolean;

export interface ControlHandlers {
  onControlChange(params: Record<string, string>): Promise<boolean>;
  onExport(): void;
}

export function showToast(message: string): void {
  const toast = document.createElement("div");
  toast.className = "toast";
  toast.textContent = message;
  document.body.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}

/**
 * Right-hand sort panel, bottom encoding menu, shelf dimension inputs and
 * the export button. Changing a control on a manually edited scene asks for
 * confirmation first; cancel sends no request and reverts the control.
 */
export class ControlPanel {
  private scene: SceneResponse | null = null;
  private sortSelect!: HTMLSelectElement;
  private descendingBox!: HTMLInputElement;
  private encodingButtons = new Map<string, HTMLButtonElement>();
  private shelvesInput!: HTMLInputElement;
  private widthInput!: HTMLInputElement;
  private clearanceInput!: HTMLInputElement;

  constructor(
    private readonly sortRoot: HTMLElement,
    private readonly encodingRoot: HTMLElement,
    private readonly handlers: ControlHandlers,
    private readonly confirmFn: ConfirmFn = (message) => window.confirm(message),
  ) {
    this.buildSortPanel();
    this.buildEncodingMenu();
  }

  private buildSortPanel(): void {
    this.sortSelect = document.createElement("select");
    this.sortSelect.className = "sort-select";
    for (const key of SORT_KEYS) {
      const option = document.createElement("option");
      option.value = key;
      option.textContent = key;
      this.sortSelect.appendChild(option);
    }
    this.descendingBox = document.createElement("input");
    this.descendingBox.type = "checkbox";
    this.descendingBox.className = "sort-desc";

    const apply = () => {
      const token = (this.descendingBox.checked ? "-" : "") + this.sortSelect.value;
      void this.requestChange({ sort: token });
    };
    this.sortSelect.addEventListener("change", apply);
    this.descendingBox.addEventListener("change", apply);

    const descLabel = document.createElement("label");
    descLabel.append(this.descendingBox, document.createTextNode(" descending"));

    this.shelvesInput = this.numberInput("shelves");
    this.widthInput = this.numberInput("width-mm");
    this.clearanceInput = this.numberInput("clearance-mm");
    const applySpec = document.createElement("button");
    applySpec.textContent = "apply dimensions";
    applySpec.className = "apply-spec";
    applySpec.addEventListener("click", () => {
      void this.requestChange({
        shelves: this.shelvesInput.value,
        width_mm: this.widthInput.value,
        clearance_mm: this.clearanceInput.value,
      });
    });

    const exportButton = document.createElement("button");
    exportButton.textContent = "download blueprint";
    exportButton.className = "export-button";
    exportButton.addEventListener("click", () => this.handlers.onExport());

    const sortLabel = document.createElement("label");
    sortLabel.append(document.createTextNode("sort by "), this.sortSelect);
    this.sortRoot.replaceChildren(
      sortLabel, descLabel, this.shelvesInput, this.widthInput, this.clearanceInput, applySpec, exportButton,
    );
  }

  private numberInput(name: string): HTMLInputElement {
    const input = document.createElement("input");
    input.type = "number";
    input.name = name;
    input.className = `spec-${name}`;
    return input;
  }

  private buildEncodingMenu(): void {
    for (const encoding of ENCODINGS) {
      const button = document.createElement("button");
      button.textContent = encoding;
      button.className = "encoding-button";
      button.dataset.encoding = encoding;
      button.addEventListener("click", () => {
        void this.requestChange({ encoding });
      });
      this.encodingButtons.set(encoding, button);
      this.encodingRoot.appendChild(button);
    }
  }

  private async requestChange(params: Record<string, string>): Promise<void> {
    if (this.scene?.manual && !this.confirmFn("This will discard your manual edits. Continue?")) {
      this.reflect(this.scene);
      return;
    }
    const accepted = await this.handlers.onControlChange(params);
    if (!accepted && this.scene) this.reflect(this.scene);
  }

  /** Sync the controls to the authoritative scene. */
  reflect(scene: SceneResponse): void {
    this.scene = scene;
    const primary = scene.strategy.split(",")[0] ?? "authorseries";
    this.descendingBox.checked = primary.startsWith("-");
    const key = primary.replace(/^-/, "");
    if ((SORT_KEYS as readonly string[]).includes(key)) this.sortSelect.value = key;
    for (const [encoding, button] of this.encodingButtons) {
      button.classList.toggle("active", encoding === scene.encoding);
    }
    this.shelvesInput.value = String(scene.spec.shelf_count);
    this.widthInput.value = String(scene.spec.shelf_width_mm);
    this.clearanceInput.value = String(scene.spec.shelf_clearance_mm);
  }
}
