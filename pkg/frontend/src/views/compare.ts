// Side-by-side comparison of a sweep on the model and on its
// sign-quantized counterpart, using the service's compare job.

import type { ApiClient, ModelDocument } from "../api.js";
import { clear, el } from "../dom.js";
import { renderProfileChart, renderReportSummary } from "./sweep.js";

export class CompareView {
  readonly root: HTMLElement;
  private api: ApiClient;
  private modelId = "";
  private doc: ModelDocument | null = null;
  private controls: HTMLElement;
  private progress: HTMLElement;
  private panes: HTMLElement;
  private pollIntervalMs: number;

  constructor(api: ApiClient, pollIntervalMs = 1000) {
    this.api = api;
    this.pollIntervalMs = pollIntervalMs;
    this.root = el("div", { class: "compare-view" });
    this.controls = el("div", {});
    this.progress = el("div", { class: "sweep-progress" });
    this.panes = el("div", { class: "compare-panes" });
    this.root.append(this.controls, this.progress, this.panes);
  }

  setModel(modelId: string, doc: ModelDocument): void {
    this.modelId = modelId;
    this.doc = doc;
    clear(this.panes);
    this.renderControls();
  }

  private renderControls(): void {
    clear(this.controls);
    if (!this.doc) return;
    const labels = this.doc.model.nodes.map((n) => n.label);
    const outcome = el("select") as HTMLSelectElement;
    for (const label of labels) outcome.append(el("option", { value: label }, [label]));
    outcome.value = labels[labels.length - 1];
    const launch = el("button", { class: "primary" }, ["compare vs quantized"]);
    launch.addEventListener("click", () => void this.launch(outcome.value));
    this.controls.append("outcome node: ", outcome, " ", launch);
  }

  private async launch(outcome: string): Promise<void> {
    clear(this.panes);
    this.progress.textContent = "starting...";
    const { job_id } = await this.api.startSweep(this.modelId, {
      outcome,
      compare_quantized: true,
    });
    const status = await this.api.waitForJob(job_id, this.pollIntervalMs, (s) => {
      this.progress.textContent = `scenarios: ${s.scenarios_done} / ${s.scenarios_total}`;
    });
    if (status.status === "error" || !status.original || !status.quantized) {
      this.progress.textContent = `comparison failed: ${status.error ?? "unknown"}`;
      return;
    }
    this.progress.textContent = `done; classification agreement ${(
      100 * (status.agreement_rate ?? 0)
    ).toFixed(2)}%`;
    const left = el("div", { class: "compare-pane" }, [el("h4", {}, ["original"])]);
    left.append(renderReportSummary(status.original), renderProfileChart(status.original, false));
    const right = el("div", { class: "compare-pane" }, [el("h4", {}, ["quantized"])]);
    right.append(
      renderReportSummary(status.quantized),
      renderProfileChart(status.quantized, false),
    );
    this.panes.append(left, right);
  }
}
