// Digraph view: force layout, edge color and thickness by sign and
// magnitude, node fill by current activation, optional adjacency-matrix
// heatmap toggle.

import type { ModelDocument } from "../api.js";
import { clear, el, svgEl } from "../dom.js";
import { forceLayout, type Point } from "../layout.js";

const WIDTH = 760;
const HEIGHT = 520;

export function edgeColor(weight: number): string {
  return weight >= 0 ? "#1a7f37" : "#c03030";
}

export function edgeWidth(weight: number): number {
  return 0.6 + 2.8 * Math.abs(weight);
}

export function activationFill(value: number): string {
  const level = Math.round(235 - 170 * value);
  return `rgb(${level}, ${Math.round(225 - 90 * value)}, 255)`;
}

export class GraphView {
  readonly root: HTMLElement;
  private doc: ModelDocument | null = null;
  private points: Point[] = [];
  private activations: number[] = [];
  private heatmap = false;

  constructor() {
    this.root = el("div", { class: "graph-view" });
  }

  setModel(doc: ModelDocument): void {
    this.doc = doc;
    this.points = forceLayout(doc.model.nodes.length, doc.model.edges, {
      width: WIDTH,
      height: HEIGHT,
    });
    this.activations = doc.model.nodes.map(() => 0);
    this.render();
  }

  setActivations(values: number[]): void {
    this.activations = values;
    this.render();
  }

  toggleHeatmap(): void {
    this.heatmap = !this.heatmap;
    this.render();
  }

  private render(): void {
    clear(this.root);
    if (!this.doc) return;
    const toggle = el("button", { class: "toggle" }, [
      this.heatmap ? "show digraph" : "show edge matrix",
    ]);
    toggle.addEventListener("click", () => this.toggleHeatmap());
    this.root.append(toggle);
    this.root.append(this.heatmap ? this.renderHeatmap() : this.renderDigraph());
  }

  private renderDigraph(): SVGSVGElement {
    const doc = this.doc!;
    const svg = svgEl("svg", {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      class: "digraph",
    });
    const defs = svgEl("defs");
    for (const [name, color] of [
      ["arrow-pos", "#1a7f37"],
      ["arrow-neg", "#c03030"],
    ] as const) {
      const marker = svgEl("marker", {
        id: name,
        viewBox: "0 0 10 10",
        refX: "9",
        refY: "5",
        markerWidth: "7",
        markerHeight: "7",
        orient: "auto-start-reverse",
      });
      const path = svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z" });
      path.setAttribute("fill", color);
      marker.append(path);
      defs.append(marker);
    }
    svg.append(defs);

    const n = doc.model.nodes.length;
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < n; j++) {
        const w = doc.model.edges[i][j];
        if (w === 0) continue;
        const a = this.points[i];
        const b = this.points[j];
        if (i === j) {
          const loop = svgEl("path", {
            d: `M ${a.x} ${a.y - 16} C ${a.x - 34} ${a.y - 52}, ${a.x + 34} ${a.y - 52}, ${a.x + 4} ${a.y - 17}`,
            fill: "none",
            stroke: edgeColor(w),
            "stroke-width": String(edgeWidth(w)),
            "marker-end": w >= 0 ? "url(#arrow-pos)" : "url(#arrow-neg)",
          });
          svg.append(loop);
          continue;
        }
        const dx = b.x - a.x;
        const dy = b.y - a.y;
        const d = Math.max(Math.hypot(dx, dy), 1);
        const trim = 18;
        const sx = a.x + (dx / d) * trim;
        const sy = a.y + (dy / d) * trim;
        const tx = b.x - (dx / d) * trim;
        const ty = b.y - (dy / d) * trim;
        const bend = 0.12 * d;
        const mx = (sx + tx) / 2 - (dy / d) * bend;
        const my = (sy + ty) / 2 + (dx / d) * bend;
        const path = svgEl("path", {
          d: `M ${sx} ${sy} Q ${mx} ${my} ${tx} ${ty}`,
          fill: "none",
          stroke: edgeColor(w),
          "stroke-width": String(edgeWidth(w)),
          "marker-end": w >= 0 ? "url(#arrow-pos)" : "url(#arrow-neg)",
          opacity: "0.85",
        });
        const title = svgEl("title");
        title.textContent = `${doc.model.nodes[i].label} -> ${doc.model.nodes[j].label}: ${w}`;
        path.append(title);
        svg.append(path);
      }
    }

    doc.model.nodes.forEach((node, i) => {
      const p = this.points[i];
      const group = svgEl("g", { class: "node" });
      const circle = svgEl("circle", {
        cx: String(p.x),
        cy: String(p.y),
        r: "16",
        fill: activationFill(this.activations[i] ?? 0),
        stroke: "#2a3a4a",
        "stroke-width": "1.5",
      });
      const title = svgEl("title");
      title.textContent = `${node.label}: ${node.description ?? ""}`;
      circle.append(title);
      const text = svgEl("text", {
        x: String(p.x),
        y: String(p.y - 22),
        "text-anchor": "middle",
        class: "node-label",
      });
      text.textContent = node.label;
      group.append(circle, text);
      svg.append(group);
    });
    return svg;
  }

  private renderHeatmap(): HTMLElement {
    const doc = this.doc!;
    const n = doc.model.nodes.length;
    const table = el("table", { class: "heatmap" });
    const head = el("tr", {}, [el("th")]);
    for (const node of doc.model.nodes) head.append(el("th", {}, [node.label]));
    table.append(head);
    for (let i = 0; i < n; i++) {
      const row = el("tr", {}, [el("th", {}, [doc.model.nodes[i].label])]);
      for (let j = 0; j < n; j++) {
        const w = doc.model.edges[i][j];
        const cell = el("td", { title: `${w}` });
        if (w !== 0) {
          const alpha = (0.15 + 0.85 * Math.abs(w)).toFixed(3);
          cell.style.background =
            w > 0 ? `rgba(26,127,55,${alpha})` : `rgba(192,48,48,${alpha})`;
        }
        row.append(cell);
      }
      table.append(row);
    }
    return table;
  }
}
