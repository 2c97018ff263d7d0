// Canonical text rendering of equilibria and profile numbers.
//
// formatEquilibrium must stay byte-identical to the CLI's trace output:
// the parity suite compares the two through the shared service.

import type { RunResult, StatePayload } from "./api.js";

export function formatStateValues(values: number[]): string {
  // integral activations print as bare integers, fractional ones with six
  // decimals; the Python CLI applies the identical rule
  return values
    .map((v) => (Number.isInteger(v) ? String(v) : v.toFixed(6)))
    .join(" ");
}

function section(states: StatePayload[]): string[] {
  if (states.length === 0) return ["  (none)"];
  return states.map((s) => `  t=${s.t}  ${formatStateValues(s.values)}`);
}

export function formatEquilibrium(result: RunResult): string {
  const lines = [
    `kind: ${result.kind}`,
    `iterations: ${result.iterations}`,
    "transient:",
    ...section(result.transient),
    "cycle:",
    ...section(result.cycle),
  ];
  return lines.join("\n") + "\n";
}

/** Bar-chart display value: profile means shown to four decimals. */
export function formatProfileValue(value: number): string {
  return value.toFixed(4);
}

export function formatFraction(value: number): string {
  return `${value.toFixed(6)} (${(100 * value).toFixed(1)}%)`;
}
