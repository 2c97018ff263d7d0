// Time-slice strip: successive states laid out as columns, with
// play / pause / single-step controls. Every new state comes from the
// service's step endpoint; nothing is simulated client side.

import type { ApiClient, ModelDocument, StatePayload } from "../api.js";
import { clear, el } from "../dom.js";
import { activationFill } from "./graph.js";

export class StepView {
  readonly root: HTMLElement;
  private api: ApiClient;
  private modelId = "";
  private doc: ModelDocument | null = null;
  private states: StatePayload[] = [];
  private clampSource: () => Record<string, number>;
  private timer: ReturnType<typeof setInterval> | null = null;
  private strip: HTMLElement;
  private onState?: (values: number[]) => void;

  constructor(
    api: ApiClient,
    clampSource: () => Record<string, number>,
    onState?: (values: number[]) => void,
  ) {
    this.api = api;
    this.clampSource = clampSource;
    this.onState = onState;
    this.root = el("div", { class: "step-view" });
    this.strip = el("div", { class: "slice-strip" });

    const stepBtn = el("button", {}, ["step"]);
    stepBtn.addEventListener("click", () => void this.step());
    const playBtn = el("button", {}, ["play"]);
    const pauseBtn = el("button", {}, ["pause"]);
    playBtn.addEventListener("click", () => this.play());
    pauseBtn.addEventListener("click", () => this.pause());
    const resetBtn = el("button", {}, ["reset"]);
    resetBtn.addEventListener("click", () => this.reset());

    this.root.append(
      el("div", { class: "controls" }, [stepBtn, playBtn, pauseBtn, resetBtn]),
      this.strip,
    );
  }

  setModel(modelId: string, doc: ModelDocument): void {
    this.pause();
    this.modelId = modelId;
    this.doc = doc;
    this.reset();
  }

  reset(): void {
    this.pause();
    if (!this.doc) return;
    const zeros = this.doc.model.nodes.map(() => 0);
    const clamps = this.clampSource();
    const start = zeros.map((v, i) => {
      const label = this.doc!.model.nodes[i].label;
      return clamps[label] ?? v;
    });
    this.states = [{ t: 0, values: start }];
    this.render();
  }

  async step(): Promise<void> {
    if (!this.doc || this.states.length === 0) return;
    const last = this.states[this.states.length - 1];
    const next = await this.api.step(this.modelId, last.values, this.clampSource());
    this.states.push(next);
    if (this.states.length > 24) this.states.shift();
    this.render();
    this.onState?.(next.values);
  }

  play(intervalMs = 600): void {
    this.pause();
    this.timer = setInterval(() => void this.step(), intervalMs);
  }

  pause(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private render(): void {
    clear(this.strip);
    if (!this.doc) return;
    const labels = el("div", { class: "slice labels" });
    labels.append(el("div", { class: "slice-head" }, ["t"]));
    for (const node of this.doc.model.nodes) {
      labels.append(el("div", { class: "slice-cell label" }, [node.label]));
    }
    this.strip.append(labels);
    for (const state of this.states) {
      const column = el("div", { class: "slice" });
      column.append(el("div", { class: "slice-head" }, [String(state.t)]));
      state.values.forEach((value) => {
        const cell = el("div", { class: "slice-cell", title: value.toFixed(3) });
        cell.style.background = activationFill(value);
        column.append(cell);
      });
      this.strip.append(column);
    }
  }
}
