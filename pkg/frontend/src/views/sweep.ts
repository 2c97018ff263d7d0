// Sweep launcher: choose inputs and the outcome node, start the job,
// poll progress once a second, then render the outcome fraction and the
// per-class mean-activation bar chart.

import type { ApiClient, ModelDocument, SweepReport } from "../api.js";
import { clear, el } from "../dom.js";
import { formatFraction, formatProfileValue } from "../format.js";

export function renderProfileChart(report: SweepReport, positive: boolean): HTMLElement {
  const chart = el("div", { class: "bar-chart" });
  for (const row of report.profile) {
    const value = positive ? row.positive : row.negative;
    const line = el("div", { class: "bar-row" });
    const bar = el("div", { class: "bar" });
    bar.style.width = `${Math.round(100 * value)}%`;
    line.append(
      el("span", { class: "bar-label" }, [row.label]),
      el("div", { class: "bar-track" }, [bar]),
      el("span", { class: "bar-value" }, [formatProfileValue(value)]),
    );
    chart.append(line);
  }
  return chart;
}

export function renderReportSummary(report: SweepReport): HTMLElement {
  return el("div", { class: "sweep-summary" }, [
    el("div", {}, [`scenarios: ${report.scenario_count}`]),
    el("div", {}, [
      `outcome (${report.outcome_node}) fraction: ${formatFraction(report.positive_fraction)}`,
    ]),
    el("div", {}, [`complement fraction: ${formatFraction(report.negative_fraction)}`]),
    el("div", {}, [`non-converged: ${report.nonconverged_count}`]),
    el("div", {}, [`top complement nodes: ${report.top_negative_nodes.join(", ")}`]),
  ]);
}

export class SweepView {
  readonly root: HTMLElement;
  private api: ApiClient;
  private modelId = "";
  private doc: ModelDocument | null = null;
  private form: HTMLElement;
  private progress: HTMLElement;
  private results: HTMLElement;
  private pollIntervalMs: number;

  constructor(api: ApiClient, pollIntervalMs = 1000) {
    this.api = api;
    this.pollIntervalMs = pollIntervalMs;
    this.root = el("div", { class: "sweep-view" });
    this.form = el("div", { class: "sweep-form" });
    this.progress = el("div", { class: "sweep-progress" });
    this.results = el("div", { class: "sweep-results" });
    this.root.append(this.form, this.progress, this.results);
  }

  setModel(modelId: string, doc: ModelDocument): void {
    this.modelId = modelId;
    this.doc = doc;
    clear(this.progress);
    clear(this.results);
    this.renderForm();
  }

  private renderForm(): void {
    clear(this.form);
    if (!this.doc) return;
    const labels = this.doc.model.nodes.map((n) => n.label);

    const outcome = el("select") as HTMLSelectElement;
    for (const label of labels) outcome.append(el("option", { value: label }, [label]));
    outcome.value = labels[labels.length - 1];

    const mode = el("select") as HTMLSelectElement;
    mode.append(el("option", { value: "on-off" }, ["on-off"]));
    mode.append(el("option", { value: "on-free" }, ["on-free"]));

    const inputBoxes = new Map<string, HTMLInputElement>();
    const inputs = el("div", { class: "sweep-inputs" });
    for (const label of labels) {
      const box = el("input", { type: "checkbox" }) as HTMLInputElement;
      box.checked = label !== outcome.value;
      inputBoxes.set(label, box);
      inputs.append(el("label", { class: "sweep-input" }, [box, label]));
    }
    outcome.addEventListener("change", () => {
      for (const [label, box] of inputBoxes) box.checked = label !== outcome.value;
    });

    const launch = el("button", { class: "primary" }, ["run sweep"]);
    launch.addEventListener("click", () =>
      void this.launch(
        outcome.value,
        labels.filter((l) => inputBoxes.get(l)!.checked && l !== outcome.value),
        mode.value as "on-off" | "on-free",
      ),
    );

    this.form.append(
      el("div", {}, ["outcome node: ", outcome, "  clamp mode: ", mode]),
      el("div", {}, ["inputs:"]),
      inputs,
      launch,
    );
  }

  private async launch(
    outcome: string,
    inputs: string[],
    mode: "on-off" | "on-free",
  ): Promise<void> {
    clear(this.results);
    this.progress.textContent = "starting...";
    const { job_id } = await this.api.startSweep(this.modelId, {
      outcome,
      inputs,
      mode,
    });
    const status = await this.api.waitForJob(job_id, this.pollIntervalMs, (s) => {
      this.progress.textContent = `scenarios: ${s.scenarios_done} / ${s.scenarios_total}`;
    });
    if (status.status === "error" || !status.report) {
      this.progress.textContent = `sweep failed: ${status.error ?? "unknown"}`;
      return;
    }
    this.progress.textContent = "done";
    this.results.append(
      renderReportSummary(status.report),
      el("h4", {}, [`complement-class mean activations`]),
      renderProfileChart(status.report, false),
    );
  }
}
