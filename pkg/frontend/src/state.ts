// Client-side session state: the active model, its clamp assignment, and
// the history of tried scenarios. History entries store the inputs that
// produced a displayed equilibrium so any scenario can be recalled with
// one click (and replayed against a fresh session to the same result,
// since the service is stateless and the engine deterministic).

export interface ScenarioEntry {
  clamps: Record<string, number>;
  initialState?: string;
  resultText: string;
  kind: string;
}

export class ScenarioHistory {
  private entries: ScenarioEntry[] = [];
  private limit: number;

  constructor(limit = 50) {
    this.limit = limit;
  }

  push(entry: ScenarioEntry): void {
    this.entries.push({ ...entry, clamps: { ...entry.clamps } });
    if (this.entries.length > this.limit) this.entries.shift();
  }

  list(): readonly ScenarioEntry[] {
    return this.entries;
  }

  recall(index: number): ScenarioEntry {
    const entry = this.entries[index];
    if (!entry) throw new Error(`no history entry ${index}`);
    return { ...entry, clamps: { ...entry.clamps } };
  }

  clear(): void {
    this.entries = [];
  }
}

/** Current clamp assignment for a model, keyed by node label. */
export class ClampState {
  private values = new Map<string, number>();

  set(label: string, value: number): void {
    if (value < 0 || value > 1) {
      throw new Error(`clamp value ${value} outside [0, 1]`);
    }
    this.values.set(label, value);
  }

  release(label: string): void {
    this.values.delete(label);
  }

  get(label: string): number | undefined {
    return this.values.get(label);
  }

  asRecord(): Record<string, number> {
    return Object.fromEntries(this.values);
  }

  replaceAll(clamps: Record<string, number>): void {
    this.values = new Map(Object.entries(clamps));
  }

  get size(): number {
    return this.values.size;
  }
}

export function validateEdgeWeight(raw: string): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) throw new Error(`not a number: ${raw}`);
  if (value < -1 || value > 1) {
    throw new Error(`edge weight ${value} outside [-1, 1]`);
  }
  return value;
}
