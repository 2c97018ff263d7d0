"""Core domain types for fuzzy cognitive maps.

A fuzzy cognitive map (FCM) is a signed directed graph whose nodes are
nonlinear activation units with values in [0, 1] and whose edges carry
causal weights in [-1, 1].  Everything here is an immutable value object;
models can be shared freely between threads and processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

HARD_THRESHOLD = "hard-threshold"
LOGISTIC = "logistic"
ACTIVATION_KINDS = (HARD_THRESHOLD, LOGISTIC)

DEFAULT_LOGISTIC_STEEPNESS = 5.0


class FcmError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(FcmError):
    """A state, clamp set, or matrix does not match the model dimension."""


class NonDifferentiableActivationError(FcmError):
    """A derivative was requested for a non-smooth activation."""


class ModelValidationError(FcmError):
    """A model failed validation; carries the full violation list."""

    def __init__(self, violations: list["Violation"]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"model is invalid: {lines}")


@dataclass(frozen=True)
class ActivationSpec:
    """Nonlinearity of a concept node.

    ``hard-threshold`` maps the aggregate input x to 0 for x <= threshold
    and to 1 otherwise.  ``logistic`` maps x to 1/(1 + exp(-c*x)), a soft
    threshold with steepness c > 0 that approximates the hard one as c
    grows.  Construction is permissive; ``validate_model`` reports bad
    kinds or parameters as violations.
    """

    kind: str
    threshold: float = 0.0
    c: float = DEFAULT_LOGISTIC_STEEPNESS

    @classmethod
    def hard_threshold(cls, threshold: float = 0.0) -> "ActivationSpec":
        return cls(kind=HARD_THRESHOLD, threshold=float(threshold))

    @classmethod
    def logistic(cls, c: float = DEFAULT_LOGISTIC_STEEPNESS) -> "ActivationSpec":
        return cls(kind=LOGISTIC, c=float(c))

    def problems(self) -> list[str]:
        out = []
        if self.kind not in ACTIVATION_KINDS:
            out.append(f"unknown activation kind {self.kind!r}")
        if self.kind == LOGISTIC and not (self.c > 0 and math.isfinite(self.c)):
            out.append(f"logistic steepness must be a positive real, got {self.c!r}")
        if self.kind == HARD_THRESHOLD and not math.isfinite(self.threshold):
            out.append(f"threshold must be finite, got {self.threshold!r}")
        return out


def activate(spec: ActivationSpec, x: float) -> float:
    """Apply a node nonlinearity to the aggregate input x.

    Total on all finite x.  The hard threshold puts the tie x == threshold
    on the 0 side.
    """
    if spec.kind == HARD_THRESHOLD:
        return 0.0 if x <= spec.threshold else 1.0
    if spec.kind == LOGISTIC:
        z = spec.c * x
        if z >= 0:
            return 1.0 / (1.0 + math.exp(-z))
        ez = math.exp(z)  # stable branch: exp of a negative never overflows
        return ez / (1.0 + ez)
    raise FcmError(f"cannot activate with invalid spec: {spec!r}")


def activation_derivative(spec: ActivationSpec, activation: float) -> float:
    """Derivative of the node output with respect to its input.

    For the logistic unit this is c * C * (1 - C) expressed through the
    current activation value C itself, which is the form causal-influence
    computations need.  Hard thresholds are not differentiable.
    """
    if spec.kind == LOGISTIC:
        return spec.c * activation * (1.0 - activation)
    raise NonDifferentiableActivationError(
        f"activation kind {spec.kind!r} has no derivative; "
        "influence computations need logistic nodes"
    )


_DEFAULT_ACTIVATION = ActivationSpec.hard_threshold()


@dataclass(frozen=True)
class ConceptNode:
    """One concept in the causal web.

    ``id`` equals the node's position in the model's node list and indexes
    the edge matrix; ``label`` is the short unique token used in documents,
    clamp maps, and the CLI.
    """

    id: int
    label: str
    description: str = ""
    activation: ActivationSpec = field(default=_DEFAULT_ACTIVATION)


class EdgeMatrix:
    """n x n causal edge matrix.

    Entry [i, j] is the signed causal weight of the edge from node i to
    node j, so row i is node i's fan-out and column j is node j's fan-in.
    The backing array is read-only.
    """

    __slots__ = ("_weights",)

    def __init__(self, weights) -> None:
        arr = np.array(weights, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatchError(
                f"edge matrix must be square, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "_weights", arr)

    def __setattr__(self, name, value):
        raise AttributeError("EdgeMatrix is immutable")

    def __reduce__(self):
        return (EdgeMatrix, (self._weights,))

    @classmethod
    def zeros(cls, n: int) -> "EdgeMatrix":
        return cls(np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self._weights.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def __getitem__(self, ij) -> float:
        i, j = ij
        return float(self._weights[i, j])

    def row(self, i: int) -> np.ndarray:
        return self._weights[i]

    def column(self, j: int) -> np.ndarray:
        return self._weights[:, j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeMatrix):
            return NotImplemented
        return self._weights.shape == other._weights.shape and bool(
            np.array_equal(self._weights, other._weights)
        )

    def __hash__(self):
        return hash(self._weights.tobytes())

    def __repr__(self) -> str:
        return f"EdgeMatrix(n={self.n})"


@dataclass(frozen=True)
class ModelMeta:
    name: str = ""
    citation: str = ""
    notes: str = ""


class FcmModel:
    """A named FCM: ordered concept nodes plus their edge matrix.

    Construction is permissive so that ``validate_model`` can report
    problems as data; call ``require_valid`` (or validate in loaders)
    before inference.
    """

    __slots__ = ("_nodes", "_edges", "_meta")

    def __init__(self, nodes, edges: EdgeMatrix, meta: ModelMeta | None = None):
        object.__setattr__(self, "_nodes", tuple(nodes))
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_meta", meta or ModelMeta())

    def __setattr__(self, name, value):
        raise AttributeError("FcmModel is immutable")

    def __reduce__(self):
        return (FcmModel, (self._nodes, self._edges, self._meta))

    @classmethod
    def create(
        cls,
        labels,
        rows,
        activation: ActivationSpec | None = None,
        name: str = "",
        descriptions=None,
        activations=None,
    ) -> "FcmModel":
        """Convenience builder from labels and a row-major weight list."""
        default = activation or _DEFAULT_ACTIVATION
        descriptions = descriptions or {}
        activations = activations or {}
        nodes = [
            ConceptNode(
                id=i,
                label=lbl,
                description=descriptions.get(lbl, ""),
                activation=activations.get(lbl, default),
            )
            for i, lbl in enumerate(labels)
        ]
        return cls(nodes, EdgeMatrix(rows), ModelMeta(name=name))

    @property
    def nodes(self) -> tuple[ConceptNode, ...]:
        return self._nodes

    @property
    def edges(self) -> EdgeMatrix:
        return self._edges

    @property
    def meta(self) -> ModelMeta:
        return self._meta

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(node.label for node in self._nodes)

    def index_of(self, label: str) -> int:
        for node in self._nodes:
            if node.label == label:
                return node.id
        raise KeyError(f"no node labeled {label!r}")

    def node(self, ref) -> ConceptNode:
        if isinstance(ref, str):
            return self._nodes[self.index_of(ref)]
        return self._nodes[ref]

    def with_edges(self, edges: EdgeMatrix) -> "FcmModel":
        return FcmModel(self._nodes, edges, self._meta)

    def with_meta(self, meta: ModelMeta) -> "FcmModel":
        return FcmModel(self._nodes, self._edges, meta)

    def require_valid(self) -> "FcmModel":
        violations = validate_model(self)
        if violations:
            raise ModelValidationError(violations)
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, FcmModel):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._edges == other._edges
            and self._meta == other._meta
        )

    def __hash__(self):
        return hash((self._nodes, self._edges, self._meta))

    def __repr__(self) -> str:
        return f"FcmModel(name={self._meta.name!r}, n={self.n})"


@dataclass(frozen=True)
class Violation:
    """One validation finding.  Violations are data, not exceptions."""

    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate_model(model: FcmModel) -> list[Violation]:
    """Check every model invariant and return all violations found.

    An empty list means the model is accepted by every other operation in
    the package.
    """
    out: list[Violation] = []
    n_nodes = len(model.nodes)

    if model.edges.n != n_nodes:
        out.append(
            Violation(
                "dimension-mismatch",
                f"{n_nodes} nodes but a "
                f"{model.edges.n}x{model.edges.n} edge matrix",
            )
        )

    seen: dict[str, int] = {}
    for pos, node in enumerate(model.nodes):
        if node.id != pos:
            out.append(
                Violation(
                    "node-id",
                    f"node {node.label!r} has id {node.id} at position {pos}",
                )
            )
        if not node.label:
            out.append(Violation("node-label", f"node {pos} has an empty label"))
        elif node.label in seen:
            out.append(
                Violation(
                    "duplicate-label",
                    f"label {node.label!r} used by nodes {seen[node.label]} and {pos}",
                )
            )
        else:
            seen[node.label] = pos
        for problem in node.activation.problems():
            out.append(Violation("activation", f"node {node.label!r}: {problem}"))

    weights = model.edges.weights
    bad = ~((weights >= -1.0) & (weights <= 1.0))  # catches NaN as well
    for i, j in zip(*np.nonzero(bad)):
        out.append(
            Violation(
                "edge-range",
                f"edge out of [-1,1] at ({int(i)},{int(j)}): {weights[i, j]!r}",
            )
        )
    return out


@dataclass(frozen=True)
class StateVector:
    """Snapshot of all node activations at discrete step t."""

    values: tuple[float, ...]
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for v in self.values:
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"state value {v!r} outside [0, 1]")
        if self.t < 0:
            raise ValueError(f"step index must be non-negative, got {self.t}")

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def at(self, t: int) -> "StateVector":
        return StateVector(self.values, t)


@dataclass(frozen=True)
class ClampSpec:
    """Per-node forced values that override the dynamics each step.

    Clamping models a sustained exogenous stimulus or policy: the forced
    value is written over the node's activation after every update (and
    over the initial state).
    """

    entries: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        norm = tuple(sorted((int(i), float(v)) for i, v in self.entries))
        object.__setattr__(self, "entries", norm)
        ids = [i for i, _ in norm]
        if len(set(ids)) != len(ids):
            raise ValueError("clamped node ids must be distinct")
        for i, v in norm:
            if i < 0:
                raise ValueError(f"invalid clamped node id {i}")
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"clamp value {v!r} outside [0, 1]")

    @classmethod
    def of(cls, mapping) -> "ClampSpec":
        return cls(tuple(mapping.items()))

    @classmethod
    def from_labels(cls, model: FcmModel, mapping) -> "ClampSpec":
        return cls(tuple((model.index_of(lbl), v) for lbl, v in mapping.items()))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, node_id: int) -> bool:
        return any(i == node_id for i, _ in self.entries)

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def check_against(self, model: FcmModel) -> None:
        for i, _ in self.entries:
            if i >= model.n:
                raise DimensionMismatchError(
                    f"clamped node id {i} out of range for a {model.n}-node model"
                )


EMPTY_CLAMPS = ClampSpec()
