"""Estimating causal edges from time-series node data.

Co-movement stands in for causation: correlating node activities gives the
classic Hebbian law, correlating one-step differences gives the
differential law that distinguishes "rose together" from "merely active
together", and the two combine in a hybrid.  The native discrete law
updates an edge only on steps where the source node actually moved and
freezes it otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DimensionMismatchError, EdgeMatrix, FcmError

HEBBIAN = "hebbian"
DHL = "dhl"
HYBRID = "hybrid"
DISCRETE_DHL = "discrete-dhl"
LEARNING_LAWS = (HEBBIAN, DHL, HYBRID, DISCRETE_DHL)

#: mean difference products within this band count as "no co-movement"
SIGN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ColumnScale:
    """Min-max normalization record for one node's raw series."""

    minimum: float
    spread: float

    @property
    def zero_range(self) -> bool:
        return self.spread == 0.0


@dataclass(frozen=True)
class TimeSeries:
    """Ordered per-node samples with values in [0, 1].

    ``times`` must be strictly increasing integers.  ``normalization``
    records the per-node min-max scale when the series was ingested from
    raw data (None for series built directly in range).
    """

    labels: tuple[str, ...]
    times: tuple[int, ...]
    values: np.ndarray
    normalization: tuple[ColumnScale, ...] | None = None

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "times", tuple(int(t) for t in self.times))
        if arr.ndim != 2 or arr.shape[1] != len(self.labels):
            raise DimensionMismatchError(
                f"values shape {arr.shape} does not match {len(self.labels)} labels"
            )
        if arr.shape[0] != len(self.times):
            raise DimensionMismatchError(
                f"{arr.shape[0]} rows but {len(self.times)} sample times"
            )
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")
        if arr.size and ((arr < 0) | (arr > 1)).any():
            raise ValueError("series values must lie in [0, 1]")

    @classmethod
    def from_raw(cls, labels, rows) -> "TimeSeries":
        """Build a series from raw data, min-max normalizing each node.

        A constant column has no usable range and normalizes to all zeros
        with its ``zero_range`` flag set.
        """
        arr = np.array(rows, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("raw series must be a 2-d table")
        mins = arr.min(axis=0)
        spreads = arr.max(axis=0) - mins
        scales = tuple(ColumnScale(float(m), float(s)) for m, s in zip(mins, spreads))
        safe = np.where(spreads == 0, 1.0, spreads)
        norm = (arr - mins) / safe
        norm[:, spreads == 0] = 0.0
        return cls(tuple(labels), tuple(range(arr.shape[0])), norm, scales)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    def differences(self) -> np.ndarray:
        """One-step backward differences, row t holding C(t) - C(t-1)."""
        return np.diff(self.values, axis=0)


@dataclass(frozen=True)
class LearningConfig:
    """Which law to run and with what constants.

    ``mu`` is the discrete-law learning rate in (0, 1]; ``h`` the Euler
    step for the continuous laws; ``iterations`` the number of passes over
    the series.
    """

    law: str = DISCRETE_DHL
    mu: float = 0.1
    h: float = 0.1
    iterations: int = 1

    def __post_init__(self):
        if self.law not in LEARNING_LAWS:
            raise FcmError(f"unknown learning law {self.law!r}")
        if not (0.0 < self.mu <= 1.0):
            raise FcmError(f"mu must lie in (0, 1], got {self.mu!r}")
        if not self.h > 0:
            raise FcmError(f"h must be positive, got {self.h!r}")
        if self.iterations < 1:
            raise FcmError("iterations must be >= 1")


@dataclass
class LearningTrace:
    """Per-update values of selected edges, one row per processed sample."""

    edges: tuple[tuple[int, int], ...]
    steps: list[tuple[int, int]] = field(default_factory=list)
    values: list[tuple[float, ...]] = field(default_factory=list)

    def record(self, pass_no: int, t: int, matrix: np.ndarray) -> None:
        if not self.edges:
            return
        self.steps.append((pass_no, t))
        self.values.append(tuple(float(matrix[i, j]) for i, j in self.edges))

    def series_for(self, i: int, j: int) -> list[float]:
        k = self.edges.index((i, j))
        return [row[k] for row in self.values]


def learn_edges(
    series: TimeSeries,
    config: LearningConfig,
    init: EdgeMatrix,
    trace_edges=(),
) -> tuple[EdgeMatrix, LearningTrace]:
    """Sweep the series (repeating for the configured number of passes)
    and update every edge under the chosen law.

    Continuous laws take an Euler step ``h`` toward the law's target each
    sample; the discrete differential law moves edge (i, j) a fraction
    ``mu`` toward the difference product only when the source node i moved
    on that step, leaving it bit-identical otherwise.  The returned matrix
    is clipped to [-1, 1]; the trace keeps the raw update path.
    """
    n = series.n_nodes
    if init.n != n:
        raise DimensionMismatchError(
            f"initial matrix is {init.n}-dim but the series has {n} nodes"
        )
    if series.n_samples == 0:
        raise FcmError("cannot learn from an empty series")
    needs_diff = config.law in (DHL, HYBRID, DISCRETE_DHL)
    if needs_diff and series.n_samples < 2:
        raise FcmError(f"law {config.law!r} needs at least 2 samples")

    e = init.weights.copy()
    values = series.values
    trace_obj = LearningTrace(tuple(trace_edges))

    for pass_no in range(config.iterations):
        for t in range(1, series.n_samples):
            c = values[t]
            d = c - values[t - 1]
            if config.law == HEBBIAN:
                e += config.h * (-e + np.outer(c, c))
            elif config.law == DHL:
                e += config.h * (-e + np.outer(d, d))
            elif config.law == HYBRID:
                e += config.h * (-e + np.outer(c, c) + np.outer(d, d))
            else:  # discrete differential law
                moved = d != 0.0
                target = np.outer(d, d)
                e[moved, :] += config.mu * (target[moved, :] - e[moved, :])
            trace_obj.record(pass_no, t, e)

    return EdgeMatrix(np.clip(e, -1.0, 1.0)), trace_obj


def infer_edge_sign(series: TimeSeries, i: int, j: int) -> int:
    """Sign of the average difference product over steps where node i moved.

    +1 when i and j tend to rise or fall together, -1 when one rises as
    the other falls, 0 when i never moves or the co-movement washes out.
    """
    n = series.n_nodes
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range for {n}-node series")
    if series.n_samples < 2:
        raise FcmError("sign inference needs at least 2 samples")
    d = series.differences()
    moved = d[:, i] != 0.0
    if not moved.any():
        return 0
    mean = float(np.mean(d[moved, i] * d[moved, j]))
    if abs(mean) <= SIGN_TOLERANCE:
        return 0
    return 1 if mean > 0 else -1
