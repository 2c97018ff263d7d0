"""Transitive causal influence between concept nodes.

The effect of an upstream node on a downstream node along one directed
path is the product of the intervening edge weights, scaled by the product
of the downstream nodes' activation derivatives at the operating state.
That weighting is nonnegative for monotone activations, so a path's sign
is decided purely by the parity of its negative edges.  Total influence
sums the per-path effects over every simple directed path; the sum equals
the total derivative of the target with respect to the source when no
cycle touches those paths, and the report raises a warning flag when one
does.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    FcmModel,
    StateVector,
    activation_derivative,
)

DEFAULT_MAX_PATHS = 10_000


@dataclass(frozen=True)
class CausalPath:
    """One directed simple path and its influence decomposition."""

    node_ids: tuple[int, ...]
    edge_product: float
    derivative_weight: float
    influence: float


@dataclass(frozen=True)
class InfluenceReport:
    """All simple paths from ``source`` to ``target`` and their sum.

    ``truncated`` is set when enumeration stopped at the path cap (the
    total is then partial); ``cycle_warning`` is set when some cycle
    touches a source-target path, in which case the acyclicity hypothesis
    behind the path-sum rule does not hold and the total is the acyclic
    contribution only.
    """

    source: int
    target: int
    paths: tuple[CausalPath, ...]
    total: float
    truncated: bool
    cycle_warning: bool


def _check_node(model: FcmModel, node_id: int) -> None:
    if not (0 <= node_id < model.n):
        raise IndexError(f"node id {node_id} out of range for {model.n}-node model")


def enumerate_paths(
    model: FcmModel, source: int, target: int, max_paths: int = DEFAULT_MAX_PATHS
) -> tuple[list[tuple[int, ...]], bool]:
    """All simple directed paths over nonzero edges, depth-first in
    lexicographic node order, cut off at ``max_paths``.

    Returns the paths plus a flag telling whether the cap was hit.
    """
    _check_node(model, source)
    _check_node(model, target)
    if source == target:
        raise ValueError("source and target must differ")
    weights = model.edges.weights
    n = model.n

    paths: list[tuple[int, ...]] = []
    truncated = False
    stack = [source]
    on_path = [False] * n
    on_path[source] = True

    def dfs(node: int) -> bool:
        nonlocal truncated
        for nxt in range(n):
            if weights[node, nxt] == 0.0 or on_path[nxt]:
                continue
            if nxt == target:
                if len(paths) >= max_paths:
                    truncated = True
                    return False
                paths.append(tuple(stack) + (target,))
                continue
            stack.append(nxt)
            on_path[nxt] = True
            keep_going = dfs(nxt)
            stack.pop()
            on_path[nxt] = False
            if not keep_going:
                return False
        return True

    dfs(source)
    return paths, truncated


def path_influence(model: FcmModel, state: StateVector, path) -> CausalPath:
    """Influence transmitted along one explicit path at the given state.

    Every node after the first must have a differentiable (logistic)
    activation; the state supplies the activation values at which the
    derivatives are taken.  A zero edge anywhere annihilates the product.
    """
    path = tuple(int(p) for p in path)
    if len(path) < 2:
        raise ValueError("a causal path needs at least two nodes")
    if len(set(path)) != len(path):
        raise ValueError(f"path revisits a node: {path}")
    for node_id in path:
        _check_node(model, node_id)
    if state.n != model.n:
        raise ValueError(
            f"state has {state.n} values for a {model.n}-node model"
        )

    edge_product = 1.0
    for a, b in zip(path, path[1:]):
        edge_product *= model.edges[a, b]

    derivative_weight = 1.0
    for node_id in path[1:]:
        spec = model.nodes[node_id].activation
        derivative_weight *= activation_derivative(spec, state.values[node_id])

    return CausalPath(
        node_ids=path,
        edge_product=edge_product,
        derivative_weight=derivative_weight,
        influence=edge_product * derivative_weight,
    )


def _reachable(weights, starts, n) -> list[bool]:
    seen = [False] * n
    frontier = list(starts)
    for s in frontier:
        seen[s] = True
    while frontier:
        node = frontier.pop()
        for nxt in range(n):
            if weights[node, nxt] != 0.0 and not seen[nxt]:
                seen[nxt] = True
                frontier.append(nxt)
    return seen


def _cycle_touches_paths(model: FcmModel, source: int, target: int) -> bool:
    """True when a node lying on some source-target path sits on a cycle."""
    weights = model.edges.weights
    n = model.n
    from_source = _reachable(weights, [source], n)
    to_target = [False] * n
    # reachability to target == reachability from target in the transpose
    transpose = weights.T
    seen = [False] * n
    frontier = [target]
    seen[target] = True
    while frontier:
        node = frontier.pop()
        for nxt in range(n):
            if transpose[node, nxt] != 0.0 and not seen[nxt]:
                seen[nxt] = True
                frontier.append(nxt)
    to_target = seen

    for node in range(n):
        if not (from_source[node] and to_target[node]):
            continue
        successors = [k for k in range(n) if weights[node, k] != 0.0]
        if successors and _reachable(weights, successors, n)[node]:
            return True
    return False


def total_influence(
    model: FcmModel,
    state: StateVector,
    source: int,
    target: int,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> InfluenceReport:
    """Sum of path influences over every simple source-target path.

    Paths are evaluated and summed in enumeration (lexicographic) order so
    the reduction is deterministic.
    """
    paths, truncated = enumerate_paths(model, source, target, max_paths)
    evaluated = tuple(path_influence(model, state, p) for p in paths)
    total = sum(p.influence for p in evaluated)
    return InfluenceReport(
        source=source,
        target=target,
        paths=evaluated,
        total=total,
        truncated=truncated,
        cycle_warning=_cycle_touches_paths(model, source, target),
    )
