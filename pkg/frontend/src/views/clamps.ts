// Clamp panel: per-node on/off/free controls plus a value slider. Every
// change (debounced 250 ms) triggers a fresh equilibrium run through the
// service and re-renders; each answer lands in the scenario history for
// one-click recall.

import type { ApiClient, ModelDocument, RunResult } from "../api.js";
import { SingleFlight, debounce } from "../api.js";
import { clear, el } from "../dom.js";
import { formatEquilibrium } from "../format.js";
import { ClampState, ScenarioHistory } from "../state.js";

export interface ClampPanelOptions {
  api: ApiClient;
  onResult: (result: RunResult, text: string) => void;
  debounceMs?: number;
}

export class ClampPanel {
  readonly root: HTMLElement;
  readonly clamps = new ClampState();
  readonly history = new ScenarioHistory();
  private api: ApiClient;
  private modelId = "";
  private doc: ModelDocument | null = null;
  private onResult: ClampPanelOptions["onResult"];
  private flight = new SingleFlight();
  private scheduleRun: () => void;
  private resultPane: HTMLElement;
  private historyPane: HTMLElement;
  private controls: HTMLElement;

  constructor(options: ClampPanelOptions) {
    this.api = options.api;
    this.onResult = options.onResult;
    this.root = el("div", { class: "clamp-panel" });
    this.controls = el("div", { class: "clamp-controls" });
    this.resultPane = el("pre", { class: "equilibrium" });
    this.historyPane = el("div", { class: "history" });
    this.root.append(
      el("h3", {}, ["Clamps"]),
      this.controls,
      el("h3", {}, ["Equilibrium"]),
      this.resultPane,
      el("h3", {}, ["Scenario history"]),
      this.historyPane,
    );
    this.scheduleRun = debounce(() => void this.runNow(), options.debounceMs ?? 250);
  }

  setModel(modelId: string, doc: ModelDocument): void {
    this.modelId = modelId;
    this.doc = doc;
    this.clamps.replaceAll({});
    this.history.clear();
    this.renderControls();
    this.renderHistory();
    void this.runNow();
  }

  applyScenario(clamps: Record<string, number>): void {
    this.clamps.replaceAll(clamps);
    this.renderControls();
    void this.runNow();
  }

  private async runNow(): Promise<void> {
    if (!this.doc || !this.modelId) return;
    const clamps = this.clamps.asRecord();
    const result = await this.flight.launch((signal) =>
      this.api.run(this.modelId, { clamps }, signal),
    );
    if (result === null) return; // superseded by a newer request
    const text = formatEquilibrium(result);
    this.resultPane.textContent = text;
    this.history.push({ clamps, resultText: text, kind: result.kind });
    this.renderHistory();
    this.onResult(result, text);
  }

  private renderControls(): void {
    clear(this.controls);
    if (!this.doc) return;
    for (const node of this.doc.model.nodes) {
      const row = el("div", { class: "clamp-row" });
      const label = el("span", { class: "clamp-label", title: node.description ?? "" }, [
        node.label,
      ]);
      const select = el("select") as HTMLSelectElement;
      for (const option of ["free", "on", "off", "value"]) {
        select.append(el("option", { value: option }, [option]));
      }
      const slider = el("input", {
        type: "range",
        min: "0",
        max: "1",
        step: "0.05",
        value: "1",
        disabled: "true",
      }) as HTMLInputElement;

      const current = this.clamps.get(node.label);
      if (current === 1) select.value = "on";
      else if (current === 0) select.value = "off";
      else if (current !== undefined) {
        select.value = "value";
        slider.value = String(current);
        slider.removeAttribute("disabled");
      }

      select.addEventListener("change", () => {
        if (select.value === "free") {
          this.clamps.release(node.label);
          slider.setAttribute("disabled", "true");
        } else if (select.value === "on") {
          this.clamps.set(node.label, 1);
          slider.setAttribute("disabled", "true");
        } else if (select.value === "off") {
          this.clamps.set(node.label, 0);
          slider.setAttribute("disabled", "true");
        } else {
          slider.removeAttribute("disabled");
          this.clamps.set(node.label, Number(slider.value));
        }
        this.scheduleRun();
      });
      slider.addEventListener("input", () => {
        this.clamps.set(node.label, Number(slider.value));
        this.scheduleRun();
      });

      row.append(label, select, slider);
      this.controls.append(row);
    }
  }

  private renderHistory(): void {
    clear(this.historyPane);
    const entries = this.history.list();
    entries.forEach((entry, index) => {
      const described =
        Object.entries(entry.clamps)
          .map(([k, v]) => `${k}=${v}`)
          .join(", ") || "(free run)";
      const button = el("button", { class: "history-entry" }, [
        `${index + 1}. ${described} -> ${entry.kind}`,
      ]);
      button.addEventListener("click", () => this.applyScenario(entry.clamps));
      this.historyPane.append(button);
    });
  }
}
