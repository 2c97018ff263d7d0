// Typed client for the FCM workbench service. The UI never computes node
// dynamics itself: every displayed state comes from one of these calls.

export interface ActivationSpec {
  kind: "hard-threshold" | "logistic";
  threshold?: number;
  c?: number;
}

export interface NodeSpec {
  label: string;
  description?: string;
  activation?: ActivationSpec;
}

export interface ModelDocument {
  format_version: number;
  model: {
    name: string;
    citation?: string;
    notes?: string;
    nodes: NodeSpec[];
    edges: number[][];
  };
  presets: Record<string, Record<string, number>>;
  initial_states: Record<string, number[]>;
}

export interface ModelSummary {
  id: string;
  name: string;
  n: number;
  origin: string;
}

export interface StatePayload {
  t: number;
  values: number[];
}

export interface RunResult {
  kind: "fixed-point" | "limit-cycle" | "not-converged";
  iterations: number;
  transient: StatePayload[];
  cycle: StatePayload[];
}

export interface RunRequest {
  initial?: number[];
  initial_state?: string;
  clamps?: Record<string, number>;
  clamp_preset?: string;
  max_iters?: number;
}

export interface SweepRequest {
  outcome: string;
  inputs?: string[];
  mode?: "on-off" | "on-free";
  rule?: "any" | "all";
  max_iters?: number;
  compare_quantized?: boolean;
}

export interface ProfileRow {
  label: string;
  positive: number;
  negative: number;
}

export interface SweepReport {
  outcome_node: string;
  clamp_mode: string;
  outcome_rule: string;
  inputs: string[];
  scenario_count: number;
  positive_count: number;
  negative_count: number;
  nonconverged_count: number;
  positive_fraction: number;
  negative_fraction: number;
  profile: ProfileRow[];
  top_negative_nodes: string[];
}

export interface JobStatus {
  job_id: string;
  status: "running" | "done" | "error";
  scenarios_done: number;
  scenarios_total: number;
  report?: SweepReport;
  original?: SweepReport;
  quantized?: SweepReport;
  agreement_rate?: number;
  error?: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: string[] = [],
  ) {
    super(message);
  }
}

async function request<T>(
  base: string,
  path: string,
  init?: RequestInit,
): Promise<T> {
  const response = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let code = "http";
    let message = `${response.status} ${response.statusText}`;
    let details: string[] = [];
    try {
      const body = await response.json();
      code = body.code ?? code;
      message = body.message ?? message;
      details = body.details ?? [];
    } catch {
      // keep the generic message when the body is not the error shape
    }
    throw new ApiError(response.status, code, message, details);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(public base: string = "") {}

  listModels(): Promise<ModelSummary[]> {
    return request(this.base, "/models");
  }

  getModel(id: string): Promise<ModelDocument> {
    return request(this.base, `/models/${id}`);
  }

  uploadModel(doc: ModelDocument): Promise<{ id: string }> {
    return request(this.base, "/models", {
      method: "POST",
      body: JSON.stringify(doc),
    });
  }

  step(
    id: string,
    state: number[],
    clamps: Record<string, number>,
  ): Promise<StatePayload> {
    return request(this.base, `/models/${id}/step`, {
      method: "POST",
      body: JSON.stringify({ state, clamps }),
    });
  }

  run(id: string, req: RunRequest, signal?: AbortSignal): Promise<RunResult> {
    return request(this.base, `/models/${id}/run`, {
      method: "POST",
      body: JSON.stringify(req),
      signal,
    });
  }

  startSweep(id: string, req: SweepRequest): Promise<{ job_id: string }> {
    return request(this.base, `/models/${id}/sweep`, {
      method: "POST",
      body: JSON.stringify(req),
    });
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return request(this.base, `/jobs/${jobId}`);
  }

  quantize(id: string): Promise<{ id: string }> {
    return request(this.base, `/models/${id}/quantize`, { method: "POST" });
  }

  combine(modelIds: string[], weights?: number[]): Promise<{ id: string }> {
    return request(this.base, "/combine", {
      method: "POST",
      body: JSON.stringify({ model_ids: modelIds, weights }),
    });
  }

  /** Poll a job until it leaves the running state. */
  async waitForJob(
    jobId: string,
    intervalMs = 1000,
    onProgress?: (status: JobStatus) => void,
  ): Promise<JobStatus> {
    for (;;) {
      const status = await this.jobStatus(jobId);
      onProgress?.(status);
      if (status.status !== "running") return status;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}

/**
 * At most one request in flight: launching a new one aborts the previous.
 * Aborted calls resolve to null so callers can simply ignore them.
 */
export class SingleFlight {
  private controller: AbortController | null = null;

  async launch<T>(fn: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      return await fn(controller.signal);
    } catch (err) {
      if (controller.signal.aborted) return null;
      throw err;
    } finally {
      if (this.controller === controller) this.controller = null;
    }
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) clearTimeout(handle);
    handle = setTimeout(() => fn(...args), waitMs);
  };
}
