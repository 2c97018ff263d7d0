"""Combining causal knowledge from several maps.

Experts rarely share an identical node set, so fusion first aligns all
inputs onto the union of their labels, zero-padding each edge matrix with
rows and columns for the nodes an expert left out (an absent node is an
implied statement of causal irrelevance).  The aligned matrices are then
mixed with convex weights, elementwise.  Running mean and variance of a
stream of matrices use predictor-corrector updates so large collections
can be folded in one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConceptNode,
    DimensionMismatchError,
    EdgeMatrix,
    FcmError,
    FcmModel,
    ModelMeta,
)

CONVEXITY_TOL = 1e-12

#: label prefix for companion negated concepts
NEGATION_PREFIX = "¬"


class AlignmentError(FcmError):
    """Two inputs describe the same label with conflicting node data."""


class WeightError(FcmError):
    """Fusion weights are missing, mismatched, or not convex."""


@dataclass(frozen=True)
class FusionWeights:
    """Convex mixing weights, one per combined model."""

    w: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))
        if not self.w:
            raise WeightError("at least one weight is required")
        if any(v < 0 for v in self.w):
            raise WeightError(f"weights must be nonnegative: {self.w}")
        total = sum(self.w)
        if abs(total - 1.0) > CONVEXITY_TOL:
            raise WeightError(f"weights must sum to 1, got {total!r}")

    @classmethod
    def equal(cls, m: int) -> "FusionWeights":
        return cls(tuple(1.0 / m for _ in range(m)))

    def __len__(self) -> int:
        return len(self.w)


def _merge_node(label: str, candidates: list[ConceptNode], new_id: int) -> ConceptNode:
    descriptions = {c.description for c in candidates if c.description}
    if len(descriptions) > 1:
        raise AlignmentError(
            f"label {label!r} carries conflicting descriptions: {sorted(descriptions)}"
        )
    activations = {c.activation for c in candidates}
    if len(activations) > 1:
        raise AlignmentError(
            f"label {label!r} carries conflicting activation specs"
        )
    first = candidates[0]
    return ConceptNode(
        id=new_id,
        label=label,
        description=next(iter(descriptions), ""),
        activation=first.activation,
    )


def align(models) -> tuple[tuple[ConceptNode, ...], list[EdgeMatrix]]:
    """Union the node sets (first-seen label order) and zero-pad each
    edge matrix onto the union, permuting rows and columns to match.

    Node identity is the label, case sensitively.  Conflicting node
    descriptors under one label raise ``AlignmentError``.
    """
    models = list(models)
    if not models:
        raise ValueError("align requires at least one model")

    order: list[str] = []
    by_label: dict[str, list[ConceptNode]] = {}
    for model in models:
        for node in model.nodes:
            if node.label not in by_label:
                order.append(node.label)
                by_label[node.label] = []
            by_label[node.label].append(node)

    union = tuple(
        _merge_node(lbl, by_label[lbl], new_id) for new_id, lbl in enumerate(order)
    )
    position = {lbl: i for i, lbl in enumerate(order)}
    n = len(union)

    padded = []
    for model in models:
        target = np.zeros((n, n))
        ids = np.array([position[node.label] for node in model.nodes], dtype=np.intp)
        target[np.ix_(ids, ids)] = model.edges.weights
        padded.append(EdgeMatrix(target))
    return union, padded


def _combined_meta(models, weights: FusionWeights) -> ModelMeta:
    names = [m.meta.name or f"model-{k}" for k, m in enumerate(models)]
    spec = ", ".join(f"{n}*{w:g}" for n, w in zip(names, weights.w))
    return ModelMeta(name="combined(" + ", ".join(names) + ")", notes=spec)


def combine(models, weights: FusionWeights | None = None) -> FcmModel:
    """Weighted average of the aligned edge matrices.

    Convexity keeps every combined entry inside [-1, 1], so the result is
    always a valid model over the union node set.
    """
    models = list(models)
    if weights is None:
        weights = FusionWeights.equal(len(models))
    if len(weights) != len(models):
        raise WeightError(
            f"{len(weights)} weights for {len(models)} models"
        )
    union, padded = align(models)
    total = np.zeros((len(union), len(union)))
    for w, matrix in zip(weights.w, padded):
        total += w * matrix.weights
    return FcmModel(union, EdgeMatrix(total), _combined_meta(models, weights))


def combine_elementwise(models, weight_matrices) -> FcmModel:
    """Combine with a per-edge weight matrix for each model.

    Each weight matrix must match the union dimension, every entry must be
    nonnegative, and the weights for each (i, j) must sum to 1.
    """
    models = list(models)
    mats = [np.asarray(w, dtype=np.float64) for w in weight_matrices]
    if len(mats) != len(models):
        raise WeightError(f"{len(mats)} weight matrices for {len(models)} models")
    union, padded = align(models)
    n = len(union)
    for w in mats:
        if w.shape != (n, n):
            raise DimensionMismatchError(
                f"weight matrix shape {w.shape} does not match union size {n}"
            )
        if (w < 0).any():
            raise WeightError("elementwise weights must be nonnegative")
    stack = np.stack(mats)
    sums = stack.sum(axis=0)
    if np.max(np.abs(sums - 1.0)) > CONVEXITY_TOL:
        raise WeightError("elementwise weights must sum to 1 per edge")
    total = np.zeros((n, n))
    for w, matrix in zip(mats, padded):
        total += w * matrix.weights
    names = [m.meta.name or "model" for m in models]
    meta = ModelMeta(name="combined(" + ", ".join(names) + ")", notes="per-edge weights")
    return FcmModel(union, EdgeMatrix(total), meta)


def fuse_data_expert(
    data_model: FcmModel,
    expert_model: FcmModel,
    w_data: float,
    w_expert: float,
) -> FcmModel:
    """Mix a data-learned map with an expert-elicited one (two-way combine)."""
    return combine([data_model, expert_model], FusionWeights((w_data, w_expert)))


@dataclass(frozen=True)
class EdgeStats:
    """Running per-edge mean and unbiased sample variance over m maps.

    The variance is undefined until two maps have been combined;
    ``var_defined`` records that, with the matrix held at zero meanwhile.
    """

    mean: np.ndarray
    var: np.ndarray
    m: int
    labels: tuple[str, ...]

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64)
        var = np.array(self.var, dtype=np.float64)
        mean.setflags(write=False)
        var.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)

    @property
    def var_defined(self) -> bool:
        return self.m > 1

    @classmethod
    def from_model(cls, model: FcmModel) -> "EdgeStats":
        n = model.edges.n
        return cls(model.edges.weights.copy(), np.zeros((n, n)), 1, model.labels)


def update_stats(stats: EdgeStats, new_model: FcmModel) -> EdgeStats:
    """Fold one more edge matrix into the running statistics.

    Predictor-corrector form: the new mean is the old mean plus 1/(m+1) of
    the innovation; the variance update reuses both the old and the new
    mean so that after any number of steps it equals the batch unbiased
    sample variance.  The new model must already be aligned to the stats
    dimension (run ``align`` first).
    """
    e = new_model.edges.weights
    if e.shape != stats.mean.shape:
        raise DimensionMismatchError(
            f"model dimension {e.shape} does not match stats {stats.mean.shape}"
        )
    m = stats.m
    mean_next = stats.mean + (e - stats.mean) / (m + 1)
    var_next = stats.var + ((e - stats.mean) * (e - mean_next) - stats.var) / m
    return EdgeStats(mean_next, var_next, m + 1, stats.labels)


def quantize(model: FcmModel) -> FcmModel:
    """Map every edge to its sign, giving a trivalent model.

    Nodes and activations are unchanged; quantize is idempotent.
    """
    signs = np.sign(model.edges.weights)
    signs[signs == 0] = 0.0  # normalize -0.0
    return model.with_edges(EdgeMatrix(signs))


def disconcept_transform(model: FcmModel) -> FcmModel:
    """Re-express causal decrease as causal increase of negated concepts.

    Every node C gains a companion dis-concept (label prefixed with
    ``NEGATION_PREFIX``); each negative edge from C_i to C_j becomes a
    positive edge of the same magnitude from C_i to the dis-concept of
    C_j.  Nonnegative edges are copied unchanged, dis-concept rows stay
    zero, and the resulting 2n x 2n matrix has no negative entries.
    """
    n = model.n
    nodes = list(model.nodes)
    for node in model.nodes:
        nodes.append(
            ConceptNode(
                id=n + node.id,
                label=NEGATION_PREFIX + node.label,
                description=f"dis-concept (negation) of {node.label!r}",
                activation=node.activation,
            )
        )
    weights = model.edges.weights
    out = np.zeros((2 * n, 2 * n))
    positive = np.where(weights > 0, weights, 0.0)
    negative = np.where(weights < 0, -weights, 0.0)
    out[:n, :n] = positive
    out[:n, n:] = negative
    meta = model.meta
    return FcmModel(
        nodes,
        EdgeMatrix(out),
        ModelMeta(meta.name and meta.name + "+disconcepts", meta.citation, meta.notes),
    )
