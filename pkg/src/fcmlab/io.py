"""Serialization: model documents, time-series CSV, sweep report export.

Model documents are a small YAML dialect with a strict schema: unknown
fields are rejected with their line and column, and the canonical writer
is deterministic (fixed key order, shortest round-trip float formatting)
so that saved documents diff cleanly and ``save(load(x))`` is
byte-identical on canonicalized input.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from importlib.resources import files as _package_files

import yaml

from .core import (
    ActivationSpec,
    ClampSpec,
    ConceptNode,
    EdgeMatrix,
    FcmError,
    FcmModel,
    HARD_THRESHOLD,
    LOGISTIC,
    ModelMeta,
    ModelValidationError,
    StateVector,
    Violation,
    validate_model,
)
from .learning import TimeSeries
from .sweep import ON_FREE, SweepReport

FORMAT_VERSION = 1

BUNDLED_MODELS = ("dolphin", "thucydides-reference", "psot-signs")


class DocumentError(FcmError):
    """A document failed to parse or violated the schema."""


@dataclass(frozen=True)
class ModelDocument:
    """A model plus its optional named clamp presets and initial states."""

    model: FcmModel
    presets: dict[str, ClampSpec] = field(default_factory=dict)
    initial_states: dict[str, StateVector] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION


# ---------------------------------------------------------------------------
# strict YAML walking (keeps source positions for every complaint)

_constructor = yaml.constructor.SafeConstructor()


def _loc(node) -> str:
    mark = node.start_mark
    return f"line {mark.line + 1}, column {mark.column + 1}"


def _fail(node, message: str):
    raise DocumentError(f"{_loc(node)}: {message}")


def _mapping_items(node, what: str):
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what} must be a mapping")
    items = []
    for key_node, value_node in node.value:
        if not isinstance(key_node, yaml.ScalarNode):
            _fail(key_node, f"{what} keys must be scalars")
        items.append((str(key_node.value), key_node, value_node))
    return items


def _check_keys(items, allowed: set, required: set, node, what: str):
    seen = set()
    for key, key_node, _ in items:
        if key not in allowed:
            _fail(key_node, f"unknown field {key!r} in {what}")
        if key in seen:
            _fail(key_node, f"duplicate field {key!r} in {what}")
        seen.add(key)
    missing = required - seen
    if missing:
        _fail(node, f"{what} is missing required field(s): {sorted(missing)}")


def _value(node):
    return _constructor.construct_object(node, deep=True)


def _scalar_str(node, what: str) -> str:
    v = _value(node)
    if not isinstance(v, str):
        _fail(node, f"{what} must be a string")
    return v


def _scalar_number(node, what: str) -> float:
    v = _value(node)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(node, f"{what} must be a number")
    return float(v)


def _scalar_int(node, what: str) -> int:
    v = _value(node)
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(node, f"{what} must be an integer")
    return v


def _sequence(node, what: str):
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, f"{what} must be a list")
    return node.value


# ---------------------------------------------------------------------------
# parsing

def _parse_activation(node) -> ActivationSpec:
    items = _mapping_items(node, "activation")
    keys = {k for k, _, _ in items}
    kind_node = next((vn for k, _, vn in items if k == "kind"), None)
    if kind_node is None:
        _fail(node, "activation is missing required field(s): ['kind']")
    kind = _scalar_str(kind_node, "activation kind")
    if kind == HARD_THRESHOLD:
        _check_keys(items, {"kind", "threshold"}, {"kind"}, node, "activation")
        threshold = 0.0
        for k, _, vn in items:
            if k == "threshold":
                threshold = _scalar_number(vn, "threshold")
        return ActivationSpec.hard_threshold(threshold)
    if kind == LOGISTIC:
        _check_keys(items, {"kind", "c"}, {"kind"}, node, "activation")
        c = None
        for k, _, vn in items:
            if k == "c":
                c = _scalar_number(vn, "steepness c")
        return ActivationSpec.logistic(c) if c is not None else ActivationSpec.logistic()
    _fail(kind_node, f"unknown activation kind {kind!r}")


def _parse_node(node, node_id: int) -> ConceptNode:
    items = _mapping_items(node, "node")
    _check_keys(items, {"label", "description", "activation"}, {"label"}, node, "node")
    label = description = ""
    activation = ActivationSpec.hard_threshold()
    for key, _, value_node in items:
        if key == "label":
            label = _scalar_str(value_node, "label")
        elif key == "description":
            description = _scalar_str(value_node, "description")
        elif key == "activation":
            activation = _parse_activation(value_node)
    return ConceptNode(id=node_id, label=label, description=description, activation=activation)


def _parse_edges(node) -> list[list[float]]:
    rows = []
    row_nodes = _sequence(node, "edges")
    for row_node in row_nodes:
        cells = _sequence(row_node, "edge row")
        rows.append([_scalar_number(c, "edge weight") for c in cells])
    if not rows:
        _fail(node, "edges must contain at least one row")
    width = len(rows[0])
    for k, row_node in enumerate(row_nodes):
        if len(rows[k]) != width:
            _fail(row_node, f"edge row {k} has {len(rows[k])} entries, expected {width}")
    if len(rows) != width:
        _fail(node, f"edge matrix must be square, got {len(rows)}x{width}")
    return rows


def _parse_model(node) -> FcmModel:
    items = _mapping_items(node, "model")
    _check_keys(
        items,
        {"name", "citation", "notes", "nodes", "edges"},
        {"nodes", "edges"},
        node,
        "model",
    )
    name = citation = notes = ""
    nodes: list[ConceptNode] = []
    edges: list[list[float]] = []
    for key, _, value_node in items:
        if key == "name":
            name = _scalar_str(value_node, "name")
        elif key == "citation":
            citation = _scalar_str(value_node, "citation")
        elif key == "notes":
            notes = _scalar_str(value_node, "notes")
        elif key == "nodes":
            node_nodes = _sequence(value_node, "nodes")
            nodes = [_parse_node(nn, i) for i, nn in enumerate(node_nodes)]
        elif key == "edges":
            edges = _parse_edges(value_node)
    return FcmModel(nodes, EdgeMatrix(edges), ModelMeta(name, citation, notes))


def _parse_presets(node, model: FcmModel) -> dict[str, ClampSpec]:
    presets = {}
    for name, _, value_node in _mapping_items(node, "presets"):
        entries = []
        for label, label_node, num_node in _mapping_items(value_node, f"preset {name!r}"):
            try:
                idx = model.index_of(label)
            except KeyError:
                _fail(label_node, f"preset {name!r} clamps unknown node {label!r}")
            value = _scalar_number(num_node, "clamp value")
            if not (0.0 <= value <= 1.0):
                _fail(num_node, f"clamp value {value!r} outside [0, 1]")
            entries.append((idx, value))
        presets[name] = ClampSpec(tuple(entries))
    return presets


def _parse_initial_states(node, model: FcmModel) -> dict[str, StateVector]:
    states = {}
    for name, name_node, value_node in _mapping_items(node, "initial_states"):
        cells = _sequence(value_node, f"initial state {name!r}")
        values = [_scalar_number(c, "state value") for c in cells]
        if len(values) != model.n:
            _fail(
                value_node,
                f"initial state {name!r} has {len(values)} values for {model.n} nodes",
            )
        for c_node, v in zip(cells, values):
            if not (0.0 <= v <= 1.0):
                _fail(c_node, f"state value {v!r} outside [0, 1]")
        states[name] = StateVector(tuple(values))
    return states


def loads_document(text: str, source: str = "<string>") -> ModelDocument:
    """Parse and validate a model document from text.

    Schema violations and parse errors carry line/column positions;
    invariant violations (edge range, duplicate labels, dimensions)
    raise ``ModelValidationError`` with the full list.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise DocumentError(f"{where}{getattr(exc, 'problem', exc)}") from exc
    if root is None:
        raise DocumentError(f"{source}: document is empty")

    items = _mapping_items(root, "document")
    _check_keys(
        items,
        {"format_version", "model", "presets", "initial_states"},
        {"format_version", "model"},
        root,
        "document",
    )
    version = FORMAT_VERSION
    model = None
    presets_node = states_node = None
    for key, _, value_node in items:
        if key == "format_version":
            version = _scalar_int(value_node, "format_version")
            if version != FORMAT_VERSION:
                _fail(value_node, f"unsupported format_version {version}")
        elif key == "model":
            model = _parse_model(value_node)
        elif key == "presets":
            presets_node = value_node
        elif key == "initial_states":
            states_node = value_node

    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)

    presets = _parse_presets(presets_node, model) if presets_node is not None else {}
    states = _parse_initial_states(states_node, model) if states_node is not None else {}
    return ModelDocument(model=model, presets=presets, initial_states=states, format_version=version)


def load_document(path) -> ModelDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return loads_document(text, source=str(path))


def load_model(path) -> FcmModel:
    return load_document(path).model


# ---------------------------------------------------------------------------
# canonical emission

_PLAIN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_\-.*]*")
_RESERVED = {
    "true", "false", "null", "yes", "no", "on", "off",
    "True", "False", "Null", "Yes", "No", "On", "Off", "~",
}


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise DocumentError(f"cannot serialize non-finite number {v!r}")
    return repr(float(v))


def _fmt_str(s: str) -> str:
    if s and _PLAIN_RE.fullmatch(s) and s not in _RESERVED:
        try:
            float(s)
        except ValueError:
            return s
    escaped = s.replace("\\", "\\\\").replace('"', '\\"')
    escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _fmt_activation(spec: ActivationSpec) -> str:
    if spec.kind == HARD_THRESHOLD:
        return f"{{kind: hard-threshold, threshold: {_fmt_float(spec.threshold)}}}"
    if spec.kind == LOGISTIC:
        return f"{{kind: logistic, c: {_fmt_float(spec.c)}}}"
    raise DocumentError(f"cannot serialize activation kind {spec.kind!r}")


def dumps_document(doc: ModelDocument) -> str:
    """Canonical text form: fixed key order, stable float formatting,
    presets and named states sorted by name."""
    model = doc.model
    out = [f"format_version: {doc.format_version}", "model:"]
    if model.meta.name:
        out.append(f"  name: {_fmt_str(model.meta.name)}")
    if model.meta.citation:
        out.append(f"  citation: {_fmt_str(model.meta.citation)}")
    if model.meta.notes:
        out.append(f"  notes: {_fmt_str(model.meta.notes)}")
    out.append("  nodes:")
    for node in model.nodes:
        out.append(f"    - label: {_fmt_str(node.label)}")
        if node.description:
            out.append(f"      description: {_fmt_str(node.description)}")
        out.append(f"      activation: {_fmt_activation(node.activation)}")
    out.append("  edges:")
    for row in model.edges.weights:
        cells = ", ".join(_fmt_float(v) for v in row)
        out.append(f"    - [{cells}]")
    if doc.presets:
        out.append("presets:")
        for name in sorted(doc.presets):
            clamps = doc.presets[name]
            cells = ", ".join(
                f"{_fmt_str(model.nodes[i].label)}: {_fmt_float(v)}"
                for i, v in clamps.entries
            )
            out.append(f"  {_fmt_str(name)}: {{{cells}}}")
    if doc.initial_states:
        out.append("initial_states:")
        for name in sorted(doc.initial_states):
            state = doc.initial_states[name]
            cells = ", ".join(_fmt_float(v) for v in state.values)
            out.append(f"  {_fmt_str(name)}: [{cells}]")
    return "\n".join(out) + "\n"


def dumps_model(model: FcmModel) -> str:
    return dumps_document(ModelDocument(model=model))


def save_document(doc: ModelDocument, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_document(doc))


def save_model(model: FcmModel, path) -> None:
    save_document(ModelDocument(model=model), path)


# ---------------------------------------------------------------------------
# time-series CSV

def load_timeseries_csv(path) -> TimeSeries:
    """Read a time-series table: header row of labels with the time column
    first, one numeric row per sample.

    Values are min-max normalized per node (the scale is recorded on the
    series; a constant column normalizes to zeros with its zero-range flag
    set).  The time column must be strictly increasing; samples are
    re-indexed 0..T-1.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise DocumentError(f"{path}: need a header row and at least one sample")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2:
        raise DocumentError(f"{path}: header must name a time column plus node columns")
    labels = header[1:]
    if len(set(labels)) != len(labels):
        raise DocumentError(f"{path}: duplicate node labels in header")

    times: list[float] = []
    data: list[list[float]] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DocumentError(
                f"{path}: row {r}: expected {len(header)} cells, got {len(row)}"
            )
        parsed = []
        for c, cell in enumerate(row):
            text = cell.strip()
            if not text:
                raise DocumentError(
                    f"{path}: row {r}, column {c + 1} ({header[c]}): missing value"
                )
            try:
                parsed.append(float(text))
            except ValueError:
                raise DocumentError(
                    f"{path}: row {r}, column {c + 1} ({header[c]}): "
                    f"not numeric: {cell!r}"
                ) from None
        times.append(parsed[0])
        data.append(parsed[1:])

    for k in range(1, len(times)):
        if times[k] <= times[k - 1]:
            raise DocumentError(
                f"{path}: row {k + 2}: time {times[k]!r} does not increase"
            )
    return TimeSeries.from_raw(labels, data)


# ---------------------------------------------------------------------------
# sweep report export

def dumps_sweep_report(report: SweepReport, model_name: str = "") -> str:
    config = report.config
    out = ["sweep_report:"]
    if model_name:
        out.append(f"  model: {_fmt_str(model_name)}")
    out.append(f"  outcome_node: {_fmt_str(report.labels[config.outcome_node])}")
    out.append(f"  clamp_mode: {config.clamp_mode}")
    out.append(f"  outcome_rule: {config.outcome_rule}")
    inputs = ", ".join(_fmt_str(report.labels[i]) for i in config.input_nodes)
    out.append(f"  inputs: [{inputs}]")
    out.append(f"  scenarios: {report.scenario_count}")
    out.append(f"  positive_count: {report.positive_count}")
    out.append(f"  positive_fraction: {_fmt_float(report.outcome_fraction)}")
    out.append(f"  negative_count: {report.negative_count}")
    out.append(f"  negative_fraction: {_fmt_float(report.negative_fraction)}")
    out.append(f"  nonconverged_count: {report.nonconverged_count}")
    out.append("  positive_profile:")
    for label, pos, _ in report.profile_rows():
        out.append(f"    {_fmt_str(label)}: {_fmt_float(pos)}")
    out.append("  negative_profile:")
    for label, _, neg in report.profile_rows():
        out.append(f"    {_fmt_str(label)}: {_fmt_float(neg)}")
    return "\n".join(out) + "\n"


def save_sweep_report(report: SweepReport, path, model_name: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_sweep_report(report, model_name))


def export_scenarios_csv(report: SweepReport, path) -> None:
    """One row per scenario: clamp assignment, attractor kind, class."""
    config = report.config
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["scenario_id"]
            + [report.labels[i] for i in config.input_nodes]
            + ["kind", "classification"]
        )
        for record in report.records:
            bits = []
            for k in range(len(config.input_nodes)):
                bit = (record.scenario_id >> k) & 1
                if config.clamp_mode == ON_FREE and not bit:
                    bits.append("free")
                else:
                    bits.append(str(bit))
            if record.positive is None:
                cls = "not-converged"
            else:
                cls = "positive" if record.positive else "negative"
            writer.writerow([record.scenario_id] + bits + [record.kind, cls])


def export_profile_csv(report: SweepReport, path) -> None:
    """Bar-chart ready per-class mean activation table."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "positive_mean", "negative_mean"])
        for label, pos, neg in report.profile_rows():
            writer.writerow([label, _fmt_float(pos), _fmt_float(neg)])


# ---------------------------------------------------------------------------
# bundled data

def bundled_data_path(filename: str) -> str:
    resource = _package_files("fcmlab").joinpath("data").joinpath(filename)
    return str(resource)


def load_bundled_document(name: str) -> ModelDocument:
    if name not in BUNDLED_MODELS:
        raise KeyError(f"no bundled model {name!r}; choose from {BUNDLED_MODELS}")
    return load_document(bundled_data_path(f"{name}.fcm.yaml"))


def load_bundled_model(name: str) -> FcmModel:
    return load_bundled_document(name).model


# ---------------------------------------------------------------------------
# edge-sign consistency tables

@dataclass(frozen=True)
class SignEntry:
    source: str
    target: str
    sign: int
    required: bool = True


def load_sign_table(path) -> tuple[SignEntry, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    entries = []
    for row in raw["signs"]:
        entries.append(
            SignEntry(
                source=row["from"],
                target=row["to"],
                sign=int(row["sign"]),
                required=bool(row.get("required", True)),
            )
        )
    return tuple(entries)


def check_edge_signs(model: FcmModel, entries) -> list[Violation]:
    """Verify that a model's edges agree with a sign table.

    Required entries must be present with the stated sign; optional
    entries only need the right sign when the edge exists at all.
    """
    out = []
    for entry in entries:
        i = model.index_of(entry.source)
        j = model.index_of(entry.target)
        w = model.edges[i, j]
        if w == 0.0:
            if entry.required:
                out.append(
                    Violation(
                        "missing-edge",
                        f"expected {entry.source} -> {entry.target} to be present",
                    )
                )
            continue
        actual = 1 if w > 0 else -1
        if actual != entry.sign:
            out.append(
                Violation(
                    "sign-mismatch",
                    f"{entry.source} -> {entry.target} should have sign "
                    f"{entry.sign:+d}, found {w!r}",
                )
            )
    return out
