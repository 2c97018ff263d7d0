// @vitest-environment jsdom
//
// DOM-level smoke tests for the views, with the service stubbed out.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { ApiClient, ModelDocument, RunResult, SweepReport } from "../src/api.js";
import { ClampPanel } from "../src/views/clamps.js";
import { EdgeEditor } from "../src/views/editor.js";
import { GraphView } from "../src/views/graph.js";
import { renderProfileChart, renderReportSummary } from "../src/views/sweep.js";

const DOC: ModelDocument = {
  format_version: 1,
  model: {
    name: "mini",
    nodes: [
      { label: "a", activation: { kind: "hard-threshold", threshold: 0 } },
      { label: "b", activation: { kind: "hard-threshold", threshold: 0 } },
    ],
    edges: [
      [0, 1],
      [-0.5, 0],
    ],
  },
  presets: {},
  initial_states: {},
};

const RESULT: RunResult = {
  kind: "fixed-point",
  iterations: 1,
  transient: [],
  cycle: [{ t: 0, values: [1, 1] }],
};

function stubApi(run = vi.fn(async () => RESULT)): {
  api: ApiClient;
  run: typeof run;
} {
  return { api: { run } as unknown as ApiClient, run };
}

describe("ClampPanel", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("runs once per model load and records history", async () => {
    const { api, run } = stubApi();
    const panel = new ClampPanel({ api, onResult: () => {} });
    panel.setModel("id1", DOC);
    await vi.runAllTimersAsync();
    expect(run).toHaveBeenCalledTimes(1);
    expect(panel.history.list()).toHaveLength(1);
    expect(panel.root.querySelector(".equilibrium")!.textContent).toContain(
      "kind: fixed-point",
    );
  });

  it("debounces a burst of clamp changes into one run", async () => {
    const { api, run } = stubApi();
    const panel = new ClampPanel({ api, onResult: () => {} });
    panel.setModel("id1", DOC);
    await vi.runAllTimersAsync();
    run.mockClear();

    const select = panel.root.querySelector("select") as HTMLSelectElement;
    for (const value of ["on", "off", "on"]) {
      select.value = value;
      select.dispatchEvent(new Event("change"));
      vi.advanceTimersByTime(100); // inside the 250 ms window
    }
    await vi.runAllTimersAsync();
    expect(run).toHaveBeenCalledTimes(1);
    expect(run.mock.calls[0][1]).toEqual({ clamps: { a: 1 } });
  });

  it("recalling a history entry replays its clamps", async () => {
    const { api, run } = stubApi();
    const panel = new ClampPanel({ api, onResult: () => {} });
    panel.setModel("id1", DOC);
    await vi.runAllTimersAsync();
    panel.applyScenario({ b: 1 });
    await vi.runAllTimersAsync();
    run.mockClear();

    const entry = panel.root.querySelector(".history-entry") as HTMLButtonElement;
    entry.click(); // first entry: the free run
    await vi.runAllTimersAsync();
    expect(run).toHaveBeenCalledWith("id1", { clamps: {} }, expect.anything());
  });
});

describe("GraphView", () => {
  it("renders a circle per node and a path per nonzero edge", () => {
    const view = new GraphView();
    view.setModel(DOC);
    const svg = view.root.querySelector("svg")!;
    expect(svg.querySelectorAll("circle")).toHaveLength(2);
    expect(svg.querySelectorAll("path:not(marker path)").length).toBeGreaterThanOrEqual(2);
  });

  it("heatmap toggle swaps in the matrix table", () => {
    const view = new GraphView();
    view.setModel(DOC);
    (view.root.querySelector("button.toggle") as HTMLButtonElement).click();
    expect(view.root.querySelector("table.heatmap")).not.toBeNull();
  });
});

describe("EdgeEditor", () => {
  it("collects valid edits into a renamed document", () => {
    const { api } = stubApi();
    const editor = new EdgeEditor(api, () => {});
    editor.setModel(DOC);
    const input = editor.root.querySelectorAll(
      "input.weight-input",
    )[1] as HTMLInputElement; // edge (0, 1)
    input.value = "0.25";
    input.dispatchEvent(new Event("change"));
    const doc = editor.editedDocument();
    expect(doc.model.edges[0][1]).toBe(0.25);
    expect(doc.model.name).toBe("mini-edited");
  });

  it("flags out-of-range weights instead of accepting them", () => {
    const { api } = stubApi();
    const editor = new EdgeEditor(api, () => {});
    editor.setModel(DOC);
    const input = editor.root.querySelectorAll(
      "input.weight-input",
    )[1] as HTMLInputElement;
    input.value = "1.7";
    input.dispatchEvent(new Event("change"));
    expect(input.classList.contains("invalid")).toBe(true);
    expect(editor.editedDocument().model.edges[0][1]).toBe(1); // unchanged
  });
});

describe("sweep rendering", () => {
  const REPORT: SweepReport = {
    outcome_node: "b",
    clamp_mode: "on-off",
    outcome_rule: "active-in-any-cycle-state",
    inputs: ["a"],
    scenario_count: 2,
    positive_count: 1,
    negative_count: 1,
    nonconverged_count: 0,
    positive_fraction: 0.5,
    negative_fraction: 0.5,
    profile: [
      { label: "a", positive: 1, negative: 0 },
      { label: "b", positive: 1, negative: 0.1234567 },
    ],
    top_negative_nodes: ["a"],
  };

  it("bar chart shows one row per node at display rounding", () => {
    const chart = renderProfileChart(REPORT, false);
    const values = Array.from(chart.querySelectorAll(".bar-value")).map(
      (n) => n.textContent,
    );
    expect(values).toEqual(["0.0000", "0.1235"]);
  });

  it("summary lists fractions and top nodes", () => {
    const summary = renderReportSummary(REPORT);
    expect(summary.textContent).toContain("scenarios: 2");
    expect(summary.textContent).toContain("0.500000 (50.0%)");
    expect(summary.textContent).toContain("top complement nodes: a");
  });
});
