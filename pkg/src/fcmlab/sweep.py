"""Exhaustive clamped-scenario sweeps and outcome statistics.

A sweep enumerates every clamp assignment over a designated set of input
nodes, runs each scenario to equilibrium from the all-zeros state (clamps
applied), classifies the attractor by whether the outcome node fires, and
aggregates counts plus per-class mean activation profiles.  All scenarios
are weighted equally; non-convergent scenarios are counted and flagged,
never dropped.  Scenarios are independent, so chunks of the enumeration
can run in parallel and their partial reports merge deterministically.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ClampSpec, FcmError, FcmModel
from .fusion import quantize
from .inference import (
    DEFAULT_MAX_ITERS,
    NOT_CONVERGED,
    EquilibriumResult,
    StateVector,
    run,
)

ON_OFF = "on-off"
ON_FREE = "on-free"
CLAMP_MODES = (ON_OFF, ON_FREE)

ACTIVE_IN_ANY = "active-in-any-cycle-state"
ACTIVE_IN_ALL = "active-in-all-cycle-states"
OUTCOME_RULES = (ACTIVE_IN_ANY, ACTIVE_IN_ALL)

#: a node counts as firing when its activation strictly exceeds this level
ACTIVE_LEVEL = 0.5

#: refuse sweeps beyond this many input nodes (2**22 scenarios)
MAX_SWEEP_INPUTS = 22


class SweepConfigError(FcmError):
    """The sweep configuration is unusable for the given model."""


@dataclass(frozen=True)
class SweepConfig:
    """Which nodes to clamp, how, and what counts as the outcome.

    ``on-off`` clamps every input to 0 or 1; ``on-free`` either clamps an
    input to 1 or leaves it free.  Scenario ids enumerate assignments with
    input k reading bit k.
    """

    input_nodes: tuple[int, ...]
    outcome_node: int
    clamp_mode: str = ON_OFF
    outcome_rule: str = ACTIVE_IN_ANY
    max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        object.__setattr__(self, "input_nodes", tuple(int(i) for i in self.input_nodes))
        if not self.input_nodes:
            raise SweepConfigError("input_nodes must be nonempty")
        if len(set(self.input_nodes)) != len(self.input_nodes):
            raise SweepConfigError("input_nodes must be distinct")
        if self.outcome_node in self.input_nodes:
            raise SweepConfigError("outcome node cannot be clamped as an input")
        if self.clamp_mode not in CLAMP_MODES:
            raise SweepConfigError(f"unknown clamp mode {self.clamp_mode!r}")
        if self.outcome_rule not in OUTCOME_RULES:
            raise SweepConfigError(f"unknown outcome rule {self.outcome_rule!r}")
        if len(self.input_nodes) > MAX_SWEEP_INPUTS:
            raise SweepConfigError(
                f"{len(self.input_nodes)} inputs would enumerate "
                f"2^{len(self.input_nodes)} scenarios; the cap is "
                f"2^{MAX_SWEEP_INPUTS}"
            )

    def check_against(self, model: FcmModel) -> None:
        for i in (*self.input_nodes, self.outcome_node):
            if not (0 <= i < model.n):
                raise SweepConfigError(
                    f"node id {i} out of range for {model.n}-node model"
                )

    @property
    def scenario_count(self) -> int:
        return 1 << len(self.input_nodes)

    def clamps_for(self, scenario_id: int) -> ClampSpec:
        if not (0 <= scenario_id < self.scenario_count):
            raise ValueError(f"scenario id {scenario_id} out of range")
        entries = []
        for k, node in enumerate(self.input_nodes):
            bit = (scenario_id >> k) & 1
            if self.clamp_mode == ON_OFF:
                entries.append((node, float(bit)))
            elif bit:
                entries.append((node, 1.0))
        return ClampSpec(tuple(entries))


@dataclass(frozen=True)
class ScenarioRecord:
    """Classification of one scenario; ``positive`` is None when the
    scenario did not converge."""

    scenario_id: int
    kind: str
    positive: bool | None


@dataclass(frozen=True)
class SweepReport:
    """Aggregate result of one sweep."""

    config: SweepConfig
    labels: tuple[str, ...]
    scenario_count: int
    positive_count: int
    negative_count: int
    nonconverged_count: int
    positive_profile: tuple[float, ...]
    negative_profile: tuple[float, ...]
    records: tuple[ScenarioRecord, ...]

    @property
    def outcome_fraction(self) -> float:
        return self.positive_count / self.scenario_count

    @property
    def negative_fraction(self) -> float:
        return self.negative_count / self.scenario_count

    def profile(self, positive: bool) -> tuple[float, ...]:
        return self.positive_profile if positive else self.negative_profile

    def top_nodes(self, positive: bool, k: int = 5) -> tuple[str, ...]:
        """Labels of the k highest mean activations in one class,
        ties broken by label so the answer is deterministic."""
        prof = self.profile(positive)
        order = sorted(range(len(prof)), key=lambda i: (-prof[i], self.labels[i]))
        return tuple(self.labels[i] for i in order[:k])

    def profile_rows(self) -> list[tuple[str, float, float]]:
        """(label, positive-class mean, negative-class mean) rows for
        bar-chart style output."""
        return [
            (lbl, self.positive_profile[i], self.negative_profile[i])
            for i, lbl in enumerate(self.labels)
        ]


def classify(result: EquilibriumResult, outcome_node: int, rule: str) -> bool | None:
    """Apply the outcome rule to the attractor; None when not converged."""
    if result.kind == NOT_CONVERGED:
        return None
    fires = [s.values[outcome_node] > ACTIVE_LEVEL for s in result.cycle]
    return any(fires) if rule == ACTIVE_IN_ANY else all(fires)


def run_scenario(
    model: FcmModel,
    conditions: ClampSpec,
    outcome_node: int,
    outcome_rule: str = ACTIVE_IN_ANY,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> tuple[EquilibriumResult, bool | None]:
    """Run one named what-if scenario from the all-zeros state."""
    zeros = StateVector((0.0,) * model.n)
    result = run(model, zeros, conditions, max_iters=max_iters)
    return result, classify(result, outcome_node, outcome_rule)


@dataclass
class _Partial:
    positive: int = 0
    negative: int = 0
    nonconverged: int = 0
    positive_profile_sum: np.ndarray | None = None
    negative_profile_sum: np.ndarray | None = None
    records: list[ScenarioRecord] | None = None

    def merge(self, other: "_Partial") -> None:
        self.positive += other.positive
        self.negative += other.negative
        self.nonconverged += other.nonconverged
        self.positive_profile_sum += other.positive_profile_sum
        self.negative_profile_sum += other.negative_profile_sum
        self.records.extend(other.records)


def _sweep_chunk(model: FcmModel, config: SweepConfig, start: int, stop: int) -> _Partial:
    n = model.n
    part = _Partial(
        positive_profile_sum=np.zeros(n),
        negative_profile_sum=np.zeros(n),
        records=[],
    )
    zeros = StateVector((0.0,) * n)
    for sid in range(start, stop):
        clamps = config.clamps_for(sid)
        result = run(model, zeros, clamps, max_iters=config.max_iters)
        positive = classify(result, config.outcome_node, config.outcome_rule)
        part.records.append(ScenarioRecord(sid, result.kind, positive))
        if positive is None:
            part.nonconverged += 1
            continue
        cycle_mean = np.mean([s.values for s in result.cycle], axis=0)
        if positive:
            part.positive += 1
            part.positive_profile_sum += cycle_mean
        else:
            part.negative += 1
            part.negative_profile_sum += cycle_mean
    return part


def run_sweep(
    model: FcmModel,
    config: SweepConfig,
    jobs: int = 1,
    progress=None,
) -> SweepReport:
    """Enumerate every scenario and aggregate the classification.

    ``jobs`` > 1 splits the enumeration into contiguous chunks executed in
    worker processes; partials merge in scenario order, so the report is
    identical whatever the parallelism.  ``progress`` (if given) is called
    with (scenarios_done, scenarios_total) as chunks complete.
    """
    config.check_against(model)
    total_scenarios = config.scenario_count
    chunk = max(1, min(4096, (total_scenarios + 63) // 64))
    bounds = [
        (lo, min(lo + chunk, total_scenarios))
        for lo in range(0, total_scenarios, chunk)
    ]

    parts: list[_Partial] = []
    done = 0
    if jobs > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_chunk, model, config, lo, hi) for lo, hi in bounds]
            for (lo, hi), fut in zip(bounds, futures):
                parts.append(fut.result())
                done += hi - lo
                if progress:
                    progress(done, total_scenarios)
    else:
        for lo, hi in bounds:
            parts.append(_sweep_chunk(model, config, lo, hi))
            done += hi - lo
            if progress:
                progress(done, total_scenarios)

    acc = parts[0]
    for part in parts[1:]:
        acc.merge(part)

    def profile(total_sum, count):
        if count == 0:
            return tuple(0.0 for _ in range(model.n))
        return tuple(float(v) for v in total_sum / count)

    return SweepReport(
        config=config,
        labels=model.labels,
        scenario_count=total_scenarios,
        positive_count=acc.positive,
        negative_count=acc.negative,
        nonconverged_count=acc.nonconverged,
        positive_profile=profile(acc.positive_profile_sum, acc.positive),
        negative_profile=profile(acc.negative_profile_sum, acc.negative),
        records=tuple(acc.records),
    )


@dataclass(frozen=True)
class SweepComparison:
    """A sweep on a model paired with the same sweep on its quantization."""

    original: SweepReport
    quantized: SweepReport
    agreement_rate: float
    agreement_counts: tuple[tuple[int, ...], ...]

    CLASSES = ("positive", "negative", "not-converged")


def compare_quantized(
    model: FcmModel, config: SweepConfig, jobs: int = 1, progress=None
) -> SweepComparison:
    """Sweep the model and its sign-quantized counterpart under the same
    configuration and tabulate per-scenario agreement."""

    def stage(done, total):
        if progress:
            progress(done, 2 * total)

    def stage2(done, total):
        if progress:
            progress(total + done, 2 * total)

    original = run_sweep(model, config, jobs=jobs, progress=stage)
    quantized = run_sweep(quantize(model), config, jobs=jobs, progress=stage2)

    def bucket(record: ScenarioRecord) -> int:
        if record.positive is None:
            return 2
        return 0 if record.positive else 1

    counts = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    agree = 0
    for a, b in zip(original.records, quantized.records):
        counts[bucket(a)][bucket(b)] += 1
        if bucket(a) == bucket(b):
            agree += 1
    return SweepComparison(
        original=original,
        quantized=quantized,
        agreement_rate=agree / original.scenario_count,
        agreement_counts=tuple(tuple(row) for row in counts),
    )
