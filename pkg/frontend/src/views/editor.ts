// Edge editor: adjust weights inside [-1, 1] (with validation feedback)
// and save the result as a new model through the service. Node structure
// itself is file-based and not editable here.

import type { ApiClient, ModelDocument } from "../api.js";
import { clear, el } from "../dom.js";
import { validateEdgeWeight } from "../state.js";

export class EdgeEditor {
  readonly root: HTMLElement;
  private api: ApiClient;
  private doc: ModelDocument | null = null;
  private edits = new Map<string, number>();
  private table: HTMLElement;
  private statusLine: HTMLElement;
  private onSaved: (id: string) => void;

  constructor(api: ApiClient, onSaved: (id: string) => void) {
    this.api = api;
    this.onSaved = onSaved;
    this.root = el("div", { class: "edge-editor" });
    this.table = el("div", {});
    this.statusLine = el("div", { class: "status" });
    const save = el("button", { class: "primary" }, ["save as new model"]);
    save.addEventListener("click", () => void this.save());
    this.root.append(this.table, save, this.statusLine);
  }

  setModel(doc: ModelDocument): void {
    this.doc = doc;
    this.edits.clear();
    this.statusLine.textContent = "";
    this.render();
  }

  private key(i: number, j: number): string {
    return `${i},${j}`;
  }

  private render(): void {
    clear(this.table);
    if (!this.doc) return;
    const nodes = this.doc.model.nodes;
    const grid = el("table", { class: "editor-grid" });
    const head = el("tr", {}, [el("th", {}, ["from \\ to"])]);
    for (const node of nodes) head.append(el("th", {}, [node.label]));
    grid.append(head);
    nodes.forEach((rowNode, i) => {
      const row = el("tr", {}, [el("th", {}, [rowNode.label])]);
      nodes.forEach((_, j) => {
        const input = el("input", {
          type: "number",
          min: "-1",
          max: "1",
          step: "0.05",
          value: String(this.doc!.model.edges[i][j]),
          class: "weight-input",
        }) as HTMLInputElement;
        input.addEventListener("change", () => {
          try {
            const value = validateEdgeWeight(input.value);
            this.edits.set(this.key(i, j), value);
            input.classList.remove("invalid");
            this.statusLine.textContent = "";
          } catch (err) {
            input.classList.add("invalid");
            this.statusLine.textContent = String(err);
          }
        });
        row.append(el("td", {}, [input]));
      });
      grid.append(row);
    });
    this.table.append(grid);
  }

  editedDocument(): ModelDocument {
    if (!this.doc) throw new Error("no model loaded");
    const edges = this.doc.model.edges.map((row) => [...row]);
    for (const [key, value] of this.edits) {
      const [i, j] = key.split(",").map(Number);
      edges[i][j] = value;
    }
    return {
      ...this.doc,
      model: {
        ...this.doc.model,
        name: `${this.doc.model.name || "model"}-edited`,
        edges,
      },
    };
  }

  private async save(): Promise<void> {
    try {
      const { id } = await this.api.uploadModel(this.editedDocument());
      this.statusLine.textContent = `saved as ${id}`;
      this.onSaved(id);
    } catch (err) {
      this.statusLine.textContent = `save failed: ${err}`;
    }
  }
}
