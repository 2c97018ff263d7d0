import { describe, expect, it, vi } from "vitest";

import { SingleFlight, debounce } from "../src/api.js";
import { ClampState, ScenarioHistory, validateEdgeWeight } from "../src/state.js";
import { forceLayout } from "../src/layout.js";
import { activationFill, edgeColor, edgeWidth } from "../src/views/graph.js";

describe("ScenarioHistory", () => {
  it("recall returns an independent copy", () => {
    const history = new ScenarioHistory();
    history.push({ clamps: { a: 1 }, resultText: "x", kind: "fixed-point" });
    const recalled = history.recall(0);
    recalled.clamps.a = 0;
    expect(history.recall(0).clamps.a).toBe(1);
  });

  it("keeps insertion order and trims to the limit", () => {
    const history = new ScenarioHistory(3);
    for (let k = 0; k < 5; k++) {
      history.push({ clamps: { n: k }, resultText: "", kind: "k" });
    }
    expect(history.list().map((e) => e.clamps.n)).toEqual([2, 3, 4]);
  });
});

describe("ClampState", () => {
  it("rejects out-of-range values", () => {
    const clamps = new ClampState();
    expect(() => clamps.set("a", 1.5)).toThrow();
    expect(() => clamps.set("a", -0.1)).toThrow();
  });

  it("release removes the entry", () => {
    const clamps = new ClampState();
    clamps.set("a", 1);
    clamps.release("a");
    expect(clamps.asRecord()).toEqual({});
  });
});

describe("validateEdgeWeight", () => {
  it("accepts the closed interval", () => {
    expect(validateEdgeWeight("-1")).toBe(-1);
    expect(validateEdgeWeight("0.35")).toBe(0.35);
  });

  it("rejects out-of-range and garbage", () => {
    expect(() => validateEdgeWeight("1.2")).toThrow();
    expect(() => validateEdgeWeight("much")).toThrow();
  });
});

describe("SingleFlight", () => {
  it("aborts the previous request when a new one launches", async () => {
    const flight = new SingleFlight();
    const outcomes: (string | null)[] = [];

    const slow = flight.launch(
      (signal) =>
        new Promise<string>((resolve, reject) => {
          signal.addEventListener("abort", () => reject(new Error("aborted")));
        }),
    );
    const fast = flight.launch(async () => "second");
    outcomes.push(await fast, await slow);
    expect(outcomes).toEqual(["second", null]);
  });

  it("propagates real failures", async () => {
    const flight = new SingleFlight();
    await expect(
      flight.launch(async () => {
        throw new Error("boom");
      }),
    ).rejects.toThrow("boom");
  });
});

describe("debounce", () => {
  it("collapses bursts into the final call", async () => {
    vi.useFakeTimers();
    const hits: number[] = [];
    const bump = debounce((v: number) => hits.push(v), 250);
    bump(1);
    bump(2);
    bump(3);
    vi.advanceTimersByTime(249);
    expect(hits).toEqual([]);
    vi.advanceTimersByTime(2);
    expect(hits).toEqual([3]);
    vi.useRealTimers();
  });
});

describe("forceLayout", () => {
  const edges = [
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 0],
  ];

  it("is deterministic for a given model", () => {
    const a = forceLayout(3, edges, { width: 400, height: 300 });
    const b = forceLayout(3, edges, { width: 400, height: 300 });
    expect(a).toEqual(b);
  });

  it("keeps every node inside the viewport", () => {
    const points = forceLayout(8, Array(8).fill(Array(8).fill(0.5)), {
      width: 400,
      height: 300,
    });
    for (const p of points) {
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(400);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(300);
    }
  });

  it("separates distinct nodes", () => {
    const points = forceLayout(3, edges, { width: 400, height: 300 });
    for (let i = 0; i < 3; i++) {
      for (let j = i + 1; j < 3; j++) {
        const d = Math.hypot(points[i].x - points[j].x, points[i].y - points[j].y);
        expect(d).toBeGreaterThan(10);
      }
    }
  });
});

describe("graph styling helpers", () => {
  it("colors by sign and widens with magnitude", () => {
    expect(edgeColor(0.5)).not.toBe(edgeColor(-0.5));
    expect(edgeWidth(1)).toBeGreaterThan(edgeWidth(0.1));
  });

  it("fills darker with higher activation", () => {
    expect(activationFill(0)).not.toBe(activationFill(1));
  });
});
