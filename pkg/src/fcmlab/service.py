"""Stateless HTTP+JSON facade over the engine.

Every endpoint body is a thin translation layer around the library calls,
so responses always agree with what the Python API returns.  Models are
addressed by a content hash of their canonical document, which makes
identical uploads dedupe; the registry lives in memory and can mirror a
directory of documents for restartability.  Sweeps run asynchronously in
a background thread with polled progress; everything else answers
synchronously.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import io as model_io
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
)
from .fusion import FusionWeights, combine, quantize
from .inference import DEFAULT_MAX_ITERS, EquilibriumResult, run, step
from .influence import DEFAULT_MAX_PATHS, total_influence
from .learning import LearningConfig, TimeSeries, learn_edges
from .sweep import (
    ACTIVE_IN_ALL,
    ACTIVE_IN_ANY,
    ON_FREE,
    ON_OFF,
    SweepConfig,
    SweepReport,
    compare_quantized,
    run_sweep,
)


class NotFoundError(FcmError):
    pass


# ---------------------------------------------------------------------------
# payload schemas (mirror the document format, JSON side)

class ActivationPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: str
    threshold: float | None = None
    c: float | None = None


class NodePayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    label: str
    description: str = ""
    activation: ActivationPayload | None = None


class ModelPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str = ""
    citation: str = ""
    notes: str = ""
    nodes: list[NodePayload]
    edges: list[list[float]]


class DocumentPayload(BaseModel):
    model_config = ConfigDict(extra="forbid", protected_namespaces=())
    format_version: int = model_io.FORMAT_VERSION
    model: ModelPayload
    presets: dict[str, dict[str, float]] = Field(default_factory=dict)
    initial_states: dict[str, list[float]] = Field(default_factory=dict)


class StepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    state: list[float]
    clamps: dict[str, float] = Field(default_factory=dict)


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    initial: list[float] | None = None
    initial_state: str | None = None
    clamps: dict[str, float] = Field(default_factory=dict)
    clamp_preset: str | None = None
    max_iters: int = DEFAULT_MAX_ITERS


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    outcome: str
    inputs: list[str] | None = None
    mode: str = ON_OFF
    rule: str = "any"
    max_iters: int = DEFAULT_MAX_ITERS
    compare_quantized: bool = False


class CombineRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model_ids: list[str]
    weights: list[float] | None = None


class SeriesPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    labels: list[str]
    rows: list[list[float]]


class SeriesUpload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    csv: str


class LearnRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    series: SeriesPayload | None = None
    series_id: str | None = None
    law: str = "discrete-dhl"
    mu: float = 0.1
    h: float = 0.1
    iterations: int = 1
    trace_edges: list[tuple[int, int]] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# conversions

def _activation_from_payload(p: ActivationPayload | None) -> ActivationSpec:
    if p is None:
        return ActivationSpec.hard_threshold()
    if p.kind == HARD_THRESHOLD:
        return ActivationSpec.hard_threshold(p.threshold or 0.0)
    if p.kind == LOGISTIC:
        return ActivationSpec.logistic(p.c) if p.c is not None else ActivationSpec.logistic()
    return ActivationSpec(kind=p.kind)  # validate_model reports it


def document_from_payload(payload: DocumentPayload) -> model_io.ModelDocument:
    if payload.format_version != model_io.FORMAT_VERSION:
        raise model_io.DocumentError(
            f"unsupported format_version {payload.format_version}"
        )
    nodes = [
        ConceptNode(
            id=i,
            label=node.label,
            description=node.description,
            activation=_activation_from_payload(node.activation),
        )
        for i, node in enumerate(payload.model.nodes)
    ]
    model = FcmModel(
        nodes,
        EdgeMatrix(payload.model.edges),
        ModelMeta(payload.model.name, payload.model.citation, payload.model.notes),
    )
    model.require_valid()
    presets = {
        name: ClampSpec.from_labels(model, mapping)
        for name, mapping in payload.presets.items()
    }
    states = {
        name: StateVector(tuple(values))
        for name, values in payload.initial_states.items()
    }
    return model_io.ModelDocument(model=model, presets=presets, initial_states=states)


def _activation_payload(spec: ActivationSpec) -> dict:
    if spec.kind == HARD_THRESHOLD:
        return {"kind": spec.kind, "threshold": spec.threshold}
    return {"kind": spec.kind, "c": spec.c}


def document_to_payload(doc: model_io.ModelDocument) -> dict:
    model = doc.model
    return {
        "format_version": doc.format_version,
        "model": {
            "name": model.meta.name,
            "citation": model.meta.citation,
            "notes": model.meta.notes,
            "nodes": [
                {
                    "label": node.label,
                    "description": node.description,
                    "activation": _activation_payload(node.activation),
                }
                for node in model.nodes
            ],
            "edges": [[float(v) for v in row] for row in model.edges.weights],
        },
        "presets": {
            name: {model.nodes[i].label: v for i, v in clamp.entries}
            for name, clamp in doc.presets.items()
        },
        "initial_states": {
            name: list(state.values) for name, state in doc.initial_states.items()
        },
    }


def state_to_payload(state: StateVector) -> dict:
    return {"t": state.t, "values": list(state.values)}


def equilibrium_to_payload(result: EquilibriumResult) -> dict:
    return {
        "kind": result.kind,
        "iterations": result.iterations_used,
        "transient": [state_to_payload(s) for s in result.transient],
        "cycle": [state_to_payload(s) for s in result.cycle],
    }


def report_to_payload(report: SweepReport) -> dict:
    config = report.config
    return {
        "outcome_node": report.labels[config.outcome_node],
        "clamp_mode": config.clamp_mode,
        "outcome_rule": config.outcome_rule,
        "inputs": [report.labels[i] for i in config.input_nodes],
        "scenario_count": report.scenario_count,
        "positive_count": report.positive_count,
        "negative_count": report.negative_count,
        "nonconverged_count": report.nonconverged_count,
        "positive_fraction": report.outcome_fraction,
        "negative_fraction": report.negative_fraction,
        "profile": [
            {"label": label, "positive": pos, "negative": neg}
            for label, pos, neg in report.profile_rows()
        ],
        "top_negative_nodes": list(report.top_nodes(positive=False, k=5)),
    }


# ---------------------------------------------------------------------------
# registry and jobs

@dataclass
class _Entry:
    doc: model_io.ModelDocument
    origin: str


@dataclass
class _Job:
    job_id: str
    status: str = "running"
    done: int = 0
    total: int = 0
    result: dict | None = None
    error: str | None = None


class Registry:
    """Content-addressed model store with optional directory persistence."""

    def __init__(self, model_dir: str | None = None):
        self._lock = threading.Lock()
        self._models: dict[str, _Entry] = {}
        self._series: dict[str, TimeSeries] = {}
        self._jobs: dict[str, _Job] = {}
        self._model_dir = model_dir

    @staticmethod
    def content_id(doc: model_io.ModelDocument) -> str:
        text = model_io.dumps_document(doc)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]

    def add(self, doc: model_io.ModelDocument, origin: str, persist: bool = False) -> str:
        mid = self.content_id(doc)
        with self._lock:
            fresh = mid not in self._models
            if fresh:
                self._models[mid] = _Entry(doc, origin)
        if fresh and persist and self._model_dir:
            model_io.save_document(doc, f"{self._model_dir}/{mid}.fcm.yaml")
        return mid

    def get(self, mid: str) -> model_io.ModelDocument:
        with self._lock:
            entry = self._models.get(mid)
        if entry is None:
            raise NotFoundError(f"no model with id {mid!r}")
        return entry.doc

    def summaries(self) -> list[dict]:
        with self._lock:
            items = sorted(self._models.items())
        return [
            {
                "id": mid,
                "name": entry.doc.model.meta.name,
                "n": entry.doc.model.n,
                "origin": entry.origin,
            }
            for mid, entry in items
        ]

    def add_series(self, series: TimeSeries) -> str:
        sid = uuid.uuid4().hex[:12]
        with self._lock:
            self._series[sid] = series
        return sid

    def get_series(self, sid: str) -> TimeSeries:
        with self._lock:
            series = self._series.get(sid)
        if series is None:
            raise NotFoundError(f"no series with id {sid!r}")
        return series

    def new_job(self, total: int) -> _Job:
        job = _Job(job_id=uuid.uuid4().hex[:12], total=total)
        with self._lock:
            self._jobs[job.job_id] = job
        return job

    def job(self, job_id: str) -> _Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"no job with id {job_id!r}")
        return job


# ---------------------------------------------------------------------------
# app factory

def create_app(model_dir: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="fcm workbench", version="0.1.0")
    registry = Registry(model_dir)
    app.state.registry = registry

    for name in model_io.BUNDLED_MODELS:
        registry.add(model_io.load_bundled_document(name), origin="bundled")
    if model_dir:
        import pathlib

        for path in sorted(pathlib.Path(model_dir).glob("*.yaml")):
            registry.add(model_io.load_document(path), origin="directory")

    def _error(status: int, code: str, message: str, details=()):
        return JSONResponse(
            status_code=status,
            content={"code": code, "message": message, "details": list(details)},
        )

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, "not-found", str(exc))

    @app.exception_handler(ModelValidationError)
    async def _invalid_model(request: Request, exc: ModelValidationError):
        return _error(422, "validation", "model is invalid",
                      [str(v) for v in exc.violations])

    @app.exception_handler(model_io.DocumentError)
    async def _bad_document(request: Request, exc: model_io.DocumentError):
        return _error(422, "document", str(exc))

    @app.exception_handler(FcmError)
    async def _engine_error(request: Request, exc: FcmError):
        return _error(400, "engine", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        details = [
            f"{'.'.join(str(loc) for loc in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        return _error(422, "request-invalid", "request body is invalid", details)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return _error(400, "bad-value", str(exc))

    @app.exception_handler(KeyError)
    async def _key_error(request: Request, exc: KeyError):
        return _error(400, "bad-reference", str(exc.args[0]) if exc.args else "unknown key")

    # -- models ------------------------------------------------------------

    @app.get("/models")
    def list_models():
        return registry.summaries()

    @app.post("/models", status_code=201)
    def upload_model(payload: DocumentPayload):
        doc = document_from_payload(payload)
        mid = registry.add(doc, origin="upload", persist=True)
        return {"id": mid}

    @app.get("/models/{mid}")
    def get_model(mid: str):
        return document_to_payload(registry.get(mid))

    def _clamps(doc: model_io.ModelDocument, preset: str | None, mapping) -> ClampSpec:
        entries: dict[int, float] = {}
        if preset is not None:
            if preset not in doc.presets:
                raise NotFoundError(f"no preset {preset!r}")
            entries.update(doc.presets[preset].as_dict())
        for label, value in (mapping or {}).items():
            entries[doc.model.index_of(label)] = value
        return ClampSpec.of(entries)

    @app.post("/models/{mid}/step")
    def step_model(mid: str, req: StepRequest):
        doc = registry.get(mid)
        clamps = _clamps(doc, None, req.clamps)
        state = StateVector(tuple(req.state))
        return state_to_payload(step(doc.model, state, clamps))

    @app.post("/models/{mid}/run")
    def run_model(mid: str, req: RunRequest):
        doc = registry.get(mid)
        model = doc.model
        if req.initial is not None:
            initial = StateVector(tuple(req.initial))
        elif req.initial_state is not None:
            if req.initial_state not in doc.initial_states:
                raise NotFoundError(f"no initial state {req.initial_state!r}")
            initial = doc.initial_states[req.initial_state]
        else:
            initial = StateVector((0.0,) * model.n)
        clamps = _clamps(doc, req.clamp_preset, req.clamps)
        result = run(model, initial, clamps, max_iters=req.max_iters)
        return equilibrium_to_payload(result)

    def _sweep_config(model: FcmModel, req: SweepRequest) -> SweepConfig:
        outcome_id = model.index_of(req.outcome)
        if req.inputs is None:
            input_ids = tuple(i for i in range(model.n) if i != outcome_id)
        else:
            input_ids = tuple(model.index_of(lbl) for lbl in req.inputs)
        rule = ACTIVE_IN_ANY if req.rule == "any" else ACTIVE_IN_ALL
        config = SweepConfig(
            input_nodes=input_ids,
            outcome_node=outcome_id,
            clamp_mode=req.mode,
            outcome_rule=rule,
            max_iters=req.max_iters,
        )
        config.check_against(model)
        return config

    @app.post("/models/{mid}/sweep", status_code=202)
    def start_sweep(mid: str, req: SweepRequest):
        doc = registry.get(mid)
        config = _sweep_config(doc.model, req)
        total = config.scenario_count * (2 if req.compare_quantized else 1)
        job = registry.new_job(total)

        def progress(done, _total):
            job.done = done

        def work():
            try:
                if req.compare_quantized:
                    comparison = compare_quantized(doc.model, config, progress=progress)
                    job.result = {
                        "original": report_to_payload(comparison.original),
                        "quantized": report_to_payload(comparison.quantized),
                        "agreement_rate": comparison.agreement_rate,
                        "agreement_counts": [list(r) for r in comparison.agreement_counts],
                    }
                else:
                    report = run_sweep(doc.model, config, progress=progress)
                    job.result = {"report": report_to_payload(report)}
                job.done = job.total
                job.status = "done"
            except Exception as exc:  # surfaced through the job record
                job.error = str(exc)
                job.status = "error"

        threading.Thread(target=work, daemon=True).start()
        return {"job_id": job.job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = registry.job(job_id)
        payload = {
            "job_id": job.job_id,
            "status": job.status,
            "scenarios_done": job.done,
            "scenarios_total": job.total,
        }
        if job.status == "done":
            payload.update(job.result)
        if job.status == "error":
            payload["error"] = job.error
        return payload

    # -- derived models ------------------------------------------------------

    @app.post("/combine", status_code=201)
    def combine_models(req: CombineRequest):
        docs = [registry.get(mid) for mid in req.model_ids]
        weights = FusionWeights(tuple(req.weights)) if req.weights else None
        combined = combine([d.model for d in docs], weights)
        mid = registry.add(model_io.ModelDocument(model=combined), origin="combine", persist=True)
        return {"id": mid}

    @app.post("/models/{mid}/quantize", status_code=201)
    def quantize_model(mid: str):
        doc = registry.get(mid)
        quantized = quantize(doc.model)
        new_id = registry.add(
            model_io.ModelDocument(
                model=quantized, presets=doc.presets, initial_states=doc.initial_states
            ),
            origin="quantize",
            persist=True,
        )
        return {"id": new_id}

    # -- influence ----------------------------------------------------------

    @app.get("/models/{mid}/influence")
    def influence(
        mid: str,
        source: str = Query(alias="from"),
        target: str = Query(alias="to"),
        state: str | None = None,
        preset: str | None = None,
        max_paths: int = DEFAULT_MAX_PATHS,
    ):
        doc = registry.get(mid)
        model = doc.model
        if state is not None:
            values = tuple(float(v) for v in state.split(","))
            operating = StateVector(values)
        elif preset is not None:
            if preset not in doc.presets:
                raise NotFoundError(f"no preset {preset!r}")
            result = run(model, StateVector((0.0,) * model.n), doc.presets[preset])
            if not result.converged:
                raise FcmError("preset scenario did not converge")
            cols = zip(*[s.values for s in result.cycle])
            operating = StateVector(tuple(sum(c) / len(result.cycle) for c in cols))
        else:
            operating = StateVector((0.5,) * model.n)
        report = total_influence(
            model, operating, model.index_of(source), model.index_of(target), max_paths
        )
        return {
            "from": source,
            "to": target,
            "state": list(operating.values),
            "paths": [
                {
                    "nodes": [model.nodes[i].label for i in p.node_ids],
                    "edge_product": p.edge_product,
                    "derivative_weight": p.derivative_weight,
                    "influence": p.influence,
                }
                for p in report.paths
            ],
            "total": report.total,
            "truncated": report.truncated,
            "cycle_warning": report.cycle_warning,
        }

    # -- learning -------------------------------------------------------------

    @app.post("/series", status_code=201)
    def upload_series(payload: SeriesUpload):
        import io as stdlib_io
        import csv as stdlib_csv

        rows = [
            row
            for row in stdlib_csv.reader(stdlib_io.StringIO(payload.csv))
            if row and any(cell.strip() for cell in row)
        ]
        if len(rows) < 2:
            raise model_io.DocumentError("need a header row and at least one sample")
        labels = [c.strip() for c in rows[0][1:]]
        try:
            data = [[float(c) for c in row[1:]] for row in rows[1:]]
        except ValueError as exc:
            raise model_io.DocumentError(f"non-numeric cell: {exc}") from exc
        series = TimeSeries.from_raw(labels, data)
        return {"id": registry.add_series(series), "samples": series.n_samples}

    @app.post("/models/{mid}/learn")
    def learn(mid: str, req: LearnRequest):
        doc = registry.get(mid)
        model = doc.model
        if req.series is not None:
            series = TimeSeries.from_raw(tuple(req.series.labels), req.series.rows)
        elif req.series_id is not None:
            series = registry.get_series(req.series_id)
        else:
            raise model_io.DocumentError("learn needs either series or series_id")
        config = LearningConfig(law=req.law, mu=req.mu, h=req.h, iterations=req.iterations)
        init = EdgeMatrix.zeros(series.n_nodes)
        matrix, trace_obj = learn_edges(series, config, init, tuple(req.trace_edges))
        return {
            "labels": list(series.labels),
            "edges": [[float(v) for v in row] for row in matrix.weights],
            "trace": {
                "edges": [list(e) for e in trace_obj.edges],
                "steps": [list(s) for s in trace_obj.steps],
                "values": [list(v) for v in trace_obj.values],
            },
            "model_labels": list(model.labels),
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
