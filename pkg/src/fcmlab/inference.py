"""Synchronous forward inference for fuzzy cognitive maps.

Each step feeds the full state vector through the edge matrix and the node
nonlinearities at once (all nodes update from the same prior state), then
writes clamped values over the result.  Repeated stepping must revisit a
previous state for threshold models, so ``run`` classifies the trajectory
into a transient prefix plus a repeating attractor: a fixed point (cycle of
length one) or a longer limit cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EMPTY_CLAMPS,
    HARD_THRESHOLD,
    LOGISTIC,
    ClampSpec,
    DimensionMismatchError,
    FcmError,
    FcmModel,
    StateVector,
)

FIXED_POINT = "fixed-point"
LIMIT_CYCLE = "limit-cycle"
NOT_CONVERGED = "not-converged"

DEFAULT_MAX_ITERS = 1000

#: componentwise recurrence tolerance for models with logistic nodes;
#: threshold models are compared exactly.
STATE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EquilibriumResult:
    """Outcome of running a model to equilibrium.

    ``transient`` holds the states visited before the attractor is entered
    (the initial state included); ``cycle`` is the repeating attractor in
    order.  ``iterations_used`` counts update steps performed until the
    recurrence was detected (or ``max_iters`` when not converged, in which
    case ``cycle`` is empty and ``transient`` is the whole trajectory).
    """

    transient: tuple[StateVector, ...]
    cycle: tuple[StateVector, ...]
    kind: str
    iterations_used: int

    @property
    def converged(self) -> bool:
        return self.kind != NOT_CONVERGED

    @property
    def states(self) -> tuple[StateVector, ...]:
        return self.transient + self.cycle


class _Compiled:
    """Per-model arrays so the hot loop never touches Python objects."""

    __slots__ = ("weights", "all_hard", "thresholds", "hard_mask", "steepness")

    def __init__(self, model: FcmModel):
        model_n = model.n
        if model.edges.n != model_n:
            raise DimensionMismatchError(
                f"model has {model_n} nodes but a {model.edges.n}-dim edge matrix"
            )
        self.weights = model.edges.weights
        kinds = [node.activation.kind for node in model.nodes]
        for kind in kinds:
            if kind not in (HARD_THRESHOLD, LOGISTIC):
                raise FcmError(f"cannot run inference with activation {kind!r}")
        self.all_hard = all(k == HARD_THRESHOLD for k in kinds)
        self.hard_mask = np.array([k == HARD_THRESHOLD for k in kinds])
        self.thresholds = np.array(
            [node.activation.threshold for node in model.nodes]
        )
        self.steepness = np.array([node.activation.c for node in model.nodes])

    def advance(self, values: np.ndarray) -> np.ndarray:
        x = values @ self.weights
        if self.all_hard:
            return (x > self.thresholds).astype(np.float64)
        z = self.steepness * x
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])  # stable branch for large negative inputs
        out[~pos] = ez / (1.0 + ez)
        if self.hard_mask.any():
            hard = (x > self.thresholds).astype(np.float64)
            out = np.where(self.hard_mask, hard, out)
        return out


def _clamp_arrays(model: FcmModel, clamps: ClampSpec):
    clamps.check_against(model)
    if not clamps.entries:
        return None, None
    idx = np.array([i for i, _ in clamps.entries], dtype=np.intp)
    vals = np.array([v for _, v in clamps.entries], dtype=np.float64)
    return idx, vals


def _check_state(model: FcmModel, state: StateVector) -> np.ndarray:
    if state.n != model.n:
        raise DimensionMismatchError(
            f"state has {state.n} values for a {model.n}-node model"
        )
    return state.as_array()


def step(
    model: FcmModel, state: StateVector, clamps: ClampSpec = EMPTY_CLAMPS
) -> StateVector:
    """One synchronous update: activate every node, then apply clamps."""
    comp = _Compiled(model)
    values = _check_state(model, state)
    idx, vals = _clamp_arrays(model, clamps)
    new = comp.advance(values)
    if idx is not None:
        new[idx] = vals
    return StateVector(tuple(new), state.t + 1)


def trace(
    model: FcmModel,
    initial: StateVector,
    clamps: ClampSpec = EMPTY_CLAMPS,
    n_steps: int = 1,
) -> list[StateVector]:
    """The initial state plus exactly ``n_steps`` successive states.

    No cycle detection; clamps are applied to the initial state as well.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    comp = _Compiled(model)
    values = _check_state(model, initial)
    idx, vals = _clamp_arrays(model, clamps)
    if idx is not None:
        values = values.copy()
        values[idx] = vals
    out = [StateVector(tuple(values), initial.t)]
    for k in range(1, n_steps + 1):
        values = comp.advance(values)
        if idx is not None:
            values[idx] = vals
        out.append(StateVector(tuple(values), initial.t + k))
    return out


def run(
    model: FcmModel,
    initial: StateVector,
    clamps: ClampSpec = EMPTY_CLAMPS,
    max_iters: int = DEFAULT_MAX_ITERS,
    state_tol: float = STATE_TOLERANCE,
) -> EquilibriumResult:
    """Iterate until a previously seen state recurs, then split the
    trajectory into transient and cycle.

    Threshold models are matched exactly; once any node is logistic the
    recurrence test compares componentwise within ``state_tol``.  Returns a
    ``not-converged`` result when no recurrence shows up in ``max_iters``
    steps.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    comp = _Compiled(model)
    values = _check_state(model, initial)
    idx, vals = _clamp_arrays(model, clamps)
    if idx is not None:
        values = values.copy()
        values[idx] = vals

    traj = [values]
    seen: dict | None = {values.tobytes(): 0} if comp.all_hard else None

    for it in range(1, max_iters + 1):
        values = comp.advance(values)
        if idx is not None:
            values[idx] = vals
        if seen is not None:
            start = seen.get(values.tobytes())
        else:
            start = next(
                (
                    k
                    for k, prev in enumerate(traj)
                    if np.all(np.abs(prev - values) <= state_tol)
                ),
                None,
            )
        if start is not None:
            return _split(traj, start, it, initial.t)
        if seen is not None:
            seen[values.tobytes()] = len(traj)
        traj.append(values)

    states = tuple(
        StateVector(tuple(v), initial.t + k) for k, v in enumerate(traj)
    )
    return EquilibriumResult(states, (), NOT_CONVERGED, max_iters)


def _split(traj, start: int, iterations: int, t0: int) -> EquilibriumResult:
    states = [StateVector(tuple(v), t0 + k) for k, v in enumerate(traj)]
    transient = tuple(states[:start])
    cycle = tuple(states[start:])
    kind = FIXED_POINT if len(cycle) == 1 else LIMIT_CYCLE
    return EquilibriumResult(transient, cycle, kind, iterations)
