// Workbench shell: model picker on top, clamp panel on the left driving
// the graph and equilibrium, tabbed views for stepping, sweeps,
// quantized comparison, and edge editing.

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { ClampPanel } from "./views/clamps.js";
import { CompareView } from "./views/compare.js";
import { EdgeEditor } from "./views/editor.js";
import { GraphView } from "./views/graph.js";
import { StepView } from "./views/step.js";
import { SweepView } from "./views/sweep.js";

const api = new ApiClient("");

const graph = new GraphView();
const clampPanel = new ClampPanel({
  api,
  onResult: (result) => {
    const last =
      result.cycle.length > 0
        ? result.cycle[result.cycle.length - 1]
        : result.transient[result.transient.length - 1];
    if (last) graph.setActivations(last.values);
  },
});
const stepView = new StepView(
  api,
  () => clampPanel.clamps.asRecord(),
  (values) => graph.setActivations(values),
);
const sweepView = new SweepView(api);
const compareView = new CompareView(api);
const editor = new EdgeEditor(api, () => void refreshModels());

let currentModelId = "";

async function selectModel(id: string): Promise<void> {
  currentModelId = id;
  const doc = await api.getModel(id);
  graph.setModel(doc);
  clampPanel.setModel(id, doc);
  stepView.setModel(id, doc);
  sweepView.setModel(id, doc);
  compareView.setModel(id, doc);
  editor.setModel(doc);
}

async function refreshModels(): Promise<void> {
  const picker = document.getElementById("model-picker") as HTMLSelectElement;
  const models = await api.listModels();
  clear(picker);
  for (const m of models) {
    picker.append(el("option", { value: m.id }, [`${m.name} (${m.origin}, n=${m.n})`]));
  }
  if (models.length > 0) {
    const keep = models.find((m) => m.id === currentModelId);
    const chosen = keep ? keep.id : models[0].id;
    picker.value = chosen;
    await selectModel(chosen);
  }
}

function tabbed(panes: Record<string, HTMLElement>): HTMLElement {
  const bar = el("div", { class: "tab-bar" });
  const body = el("div", { class: "tab-body" });
  const names = Object.keys(panes);
  const show = (name: string) => {
    clear(body);
    body.append(panes[name]);
    for (const button of Array.from(bar.children)) {
      button.classList.toggle("active", button.textContent === name);
    }
  };
  for (const name of names) {
    const button = el("button", { class: "tab" }, [name]);
    button.addEventListener("click", () => show(name));
    bar.append(button);
  }
  const wrap = el("div", { class: "tabs" }, [bar, body]);
  show(names[0]);
  return wrap;
}

export function mount(root: HTMLElement): void {
  const picker = el("select", { id: "model-picker" }) as HTMLSelectElement;
  picker.addEventListener("change", () => void selectModel(picker.value));
  const header = el("header", {}, [
    el("h1", {}, ["FCM workbench"]),
    el("label", {}, ["model: ", picker]),
  ]);
  const layout = el("div", { class: "layout" }, [
    el("aside", {}, [clampPanel.root]),
    el("main", {}, [
      tabbed({
        graph: graph.root,
        step: stepView.root,
        sweep: sweepView.root,
        compare: compareView.root,
        "edit edges": editor.root,
      }),
    ]),
  ]);
  root.append(header, layout);
  void refreshModels();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!);
}
