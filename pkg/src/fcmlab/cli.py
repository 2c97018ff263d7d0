"""Batch front door: run, sweep, combine, stats, learn, influence,
quantize, serve.

Exit codes: 0 success, 2 usage, 3 validation, 4 not converged, 5 i/o.
Model references resolve in order: an existing path, a bundled model
name, then a file under the FCM_MODEL_PATH directory.
"""

from __future__ import annotations

import csv
import os
from fractions import Fraction
from pathlib import Path

import click

from . import io as model_io
from .core import (
    ClampSpec,
    EdgeMatrix,
    FcmError,
    FcmModel,
    ModelValidationError,
    StateVector,
)
from .fusion import EdgeStats, FusionWeights, combine, quantize, update_stats, align
from .inference import DEFAULT_MAX_ITERS, NOT_CONVERGED, EquilibriumResult, run
from .influence import DEFAULT_MAX_PATHS, total_influence
from .learning import LearningConfig, learn_edges
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

MODEL_PATH_VAR = "FCM_MODEL_PATH"


class ValidationFailure(click.ClickException):
    exit_code = 3


class NotConvergedFailure(click.ClickException):
    exit_code = 4


class IoFailure(click.ClickException):
    exit_code = 5


def _resolve_document(ref: str) -> model_io.ModelDocument:
    path = Path(ref)
    if path.exists():
        return _load_document(path)
    if ref in model_io.BUNDLED_MODELS:
        return model_io.load_bundled_document(ref)
    search_dir = os.environ.get(MODEL_PATH_VAR)
    if search_dir:
        for candidate in (ref, f"{ref}.fcm.yaml", f"{ref}.yaml"):
            p = Path(search_dir) / candidate
            if p.exists():
                return _load_document(p)
    raise click.UsageError(
        f"model {ref!r} is not a file, a bundled model "
        f"({', '.join(model_io.BUNDLED_MODELS)}), or under ${MODEL_PATH_VAR}"
    )


def _load_document(path: Path) -> model_io.ModelDocument:
    try:
        return model_io.load_document(path)
    except ModelValidationError as exc:
        raise ValidationFailure(str(exc)) from exc
    except model_io.DocumentError as exc:
        raise ValidationFailure(str(exc)) from exc
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _parse_clamps(doc: model_io.ModelDocument, preset: str | None, clamp_args) -> ClampSpec:
    entries: dict[int, float] = {}
    if preset is not None:
        if preset not in doc.presets:
            raise click.UsageError(
                f"unknown preset {preset!r}; document defines {sorted(doc.presets)}"
            )
        entries.update(doc.presets[preset].as_dict())
    for arg in clamp_args:
        label, sep, value = arg.partition("=")
        if not sep:
            raise click.UsageError(f"--clamp expects LABEL=VALUE, got {arg!r}")
        try:
            idx = doc.model.index_of(label)
        except KeyError:
            raise click.UsageError(f"unknown node label {label!r}") from None
        try:
            entries[idx] = float(value)
        except ValueError:
            raise click.UsageError(f"clamp value {value!r} is not a number") from None
    try:
        return ClampSpec.of(entries)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _parse_initial(doc: model_io.ModelDocument, ref: str | None) -> StateVector:
    model = doc.model
    if ref is None:
        return StateVector((0.0,) * model.n)
    if ref in doc.initial_states:
        return doc.initial_states[ref]
    if "," in ref:
        try:
            values = tuple(float(v) for v in ref.split(","))
            state = StateVector(values)
        except ValueError as exc:
            raise click.UsageError(f"bad --init value list: {exc}") from exc
        if state.n != model.n:
            raise click.UsageError(
                f"--init has {state.n} values for a {model.n}-node model"
            )
        return state
    raise click.UsageError(
        f"unknown initial state {ref!r}; document defines {sorted(doc.initial_states)}"
    )


def format_state_values(values) -> str:
    """Integral activations print as bare integers, fractional ones with
    six decimals; the web client applies the identical rule so trace text
    matches byte for byte."""
    return " ".join(
        str(int(v)) if v == int(v) else f"{v:.6f}" for v in values
    )


def format_equilibrium(result: EquilibriumResult) -> str:
    """Canonical equilibrium text.  The web client renders the identical
    format, which the parity tests compare byte for byte."""
    lines = [f"kind: {result.kind}", f"iterations: {result.iterations_used}"]
    lines.append("transient:")
    if result.transient:
        for s in result.transient:
            lines.append(f"  t={s.t}  {format_state_values(s.values)}")
    else:
        lines.append("  (none)")
    lines.append("cycle:")
    if result.cycle:
        for s in result.cycle:
            lines.append(f"  t={s.t}  {format_state_values(s.values)}")
    else:
        lines.append("  (none)")
    return "\n".join(lines) + "\n"


def format_summary(result: EquilibriumResult) -> str:
    return (
        f"kind={result.kind} iterations={result.iterations_used} "
        f"transient={len(result.transient)} cycle={len(result.cycle)}\n"
    )


@click.group()
@click.version_option(package_name="fcmlab", prog_name="fcm")
def main():
    """Fuzzy cognitive map workbench."""


@main.command(name="run")
@click.option("--model", "model_ref", required=True, help="model path or bundled name")
@click.option("--init", "init_ref", default=None,
              help="named initial state or comma-separated values (default: all zeros)")
@click.option("--preset", default=None, help="named clamp preset from the document")
@click.option("--clamp", "clamp_args", multiple=True, metavar="LABEL=VALUE",
              help="clamp one node (repeatable; overrides preset entries)")
@click.option("--max-iters", default=DEFAULT_MAX_ITERS, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["trace", "summary"]), default="trace")
def run_cmd(model_ref, init_ref, preset, clamp_args, max_iters, fmt):
    """Run clamped forward inference to equilibrium."""
    doc = _resolve_document(model_ref)
    clamps = _parse_clamps(doc, preset, clamp_args)
    initial = _parse_initial(doc, init_ref)
    try:
        result = run(doc.model, initial, clamps, max_iters=max_iters)
    except FcmError as exc:
        raise ValidationFailure(str(exc)) from exc
    text = format_equilibrium(result) if fmt == "trace" else format_summary(result)
    click.echo(text, nl=False)
    if result.kind == NOT_CONVERGED:
        raise NotConvergedFailure(
            f"no recurrence within {max_iters} iterations"
        )


def _print_sweep_block(title: str, report: SweepReport):
    click.echo(f"{title}:")
    click.echo(f"  scenarios: {report.scenario_count}")
    click.echo(
        f"  outcome-positive: {report.positive_count}  "
        f"fraction: {report.outcome_fraction:.6f} ({report.outcome_fraction:.1%})"
    )
    click.echo(
        f"  outcome-negative: {report.negative_count}  "
        f"fraction: {report.negative_fraction:.6f} ({report.negative_fraction:.1%})"
    )
    click.echo(f"  non-converged: {report.nonconverged_count}")
    top = ", ".join(report.top_nodes(positive=False, k=5))
    click.echo(f"  top negative-class nodes: {top}")


def _write_sweep_files(prefix: str, report: SweepReport, model_name: str):
    model_io.save_sweep_report(report, f"{prefix}.report.yaml", model_name)
    model_io.export_scenarios_csv(report, f"{prefix}.scenarios.csv")
    model_io.export_profile_csv(report, f"{prefix}.profile.csv")


@main.command(name="sweep")
@click.option("--model", "model_ref", required=True)
@click.option("--outcome", required=True, help="outcome node label")
@click.option("--inputs", default="all",
              help="comma-separated input labels, or 'all' for every non-outcome node")
@click.option("--mode", type=click.Choice([ON_OFF, ON_FREE]), default=ON_OFF, show_default=True)
@click.option("--rule", type=click.Choice(["any", "all"]), default="any", show_default=True,
              help="outcome active in any vs all cycle states")
@click.option("--max-iters", default=DEFAULT_MAX_ITERS, show_default=True)
@click.option("--quantize-compare", is_flag=True,
              help="also sweep the sign-quantized model and report agreement")
@click.option("--jobs", default=1, show_default=True, help="worker processes")
@click.option("--out", "out_prefix", default=None,
              help="write <PREFIX>.report.yaml, .scenarios.csv, .profile.csv")
def sweep_cmd(model_ref, outcome, inputs, mode, rule, max_iters, quantize_compare, jobs, out_prefix):
    """Exhaustively enumerate clamped scenarios and classify outcomes."""
    doc = _resolve_document(model_ref)
    model = doc.model
    try:
        outcome_id = model.index_of(outcome)
    except KeyError:
        raise click.UsageError(f"unknown outcome label {outcome!r}") from None
    if inputs == "all":
        input_ids = tuple(i for i in range(model.n) if i != outcome_id)
    else:
        try:
            input_ids = tuple(model.index_of(lbl.strip()) for lbl in inputs.split(","))
        except KeyError as exc:
            raise click.UsageError(f"unknown input label: {exc}") from None
    rule_name = ACTIVE_IN_ANY if rule == "any" else ACTIVE_IN_ALL
    try:
        config = SweepConfig(
            input_nodes=input_ids,
            outcome_node=outcome_id,
            clamp_mode=mode,
            outcome_rule=rule_name,
            max_iters=max_iters,
        )
        config.check_against(model)
    except FcmError as exc:
        raise ValidationFailure(str(exc)) from exc

    name = model.meta.name or model_ref
    click.echo(f"model: {name}")
    click.echo(f"outcome node: {outcome}")
    if quantize_compare:
        comparison = compare_quantized(model, config, jobs=jobs)
        _print_sweep_block("original", comparison.original)
        _print_sweep_block("quantized", comparison.quantized)
        click.echo(f"classification agreement: {comparison.agreement_rate:.6f}")
        if out_prefix:
            _write_sweep_files(out_prefix, comparison.original, name)
            _write_sweep_files(f"{out_prefix}.quantized", comparison.quantized, name + " (quantized)")
    else:
        report = run_sweep(model, config, jobs=jobs)
        _print_sweep_block("sweep", report)
        if out_prefix:
            _write_sweep_files(out_prefix, report, name)


@main.command(name="combine")
@click.option("--weights", "weights_arg", default=None,
              help="comma-separated convex weights (fractions allowed), default equal")
@click.option("--out", "out_path", default=None, help="write the combined document here")
@click.argument("models", nargs=-1, required=True)
def combine_cmd(weights_arg, out_path, models):
    """Fuse expert maps by weighted averaging of aligned edge matrices."""
    docs = [_resolve_document(ref) for ref in models]
    try:
        weights = None
        if weights_arg is not None:
            try:
                parsed = tuple(float(Fraction(w.strip())) for w in weights_arg.split(","))
            except (ValueError, ZeroDivisionError) as exc:
                raise click.UsageError(f"bad --weights: {exc}") from exc
            weights = FusionWeights(parsed)
        combined = combine([d.model for d in docs], weights)
    except FcmError as exc:
        raise ValidationFailure(str(exc)) from exc
    text = model_io.dumps_model(combined)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command(name="stats")
@click.option("--stream", "stream_dir", required=True,
              help="directory of model documents, combined in name order")
@click.option("--out", "out_prefix", default=None,
              help="write <PREFIX>.mean.csv and <PREFIX>.var.csv")
def stats_cmd(stream_dir, out_prefix):
    """Running per-edge mean and variance over a stream of maps."""
    directory = Path(stream_dir)
    if not directory.is_dir():
        raise IoFailure(f"{stream_dir!r} is not a directory")
    paths = sorted(
        p for p in directory.iterdir()
        if p.suffix in (".yaml", ".yml") and p.is_file()
    )
    if not paths:
        raise IoFailure(f"no model documents under {stream_dir!r}")
    docs = [_load_document(p) for p in paths]
    union, padded = align([d.model for d in docs])
    labels = tuple(node.label for node in union)
    aligned = [FcmModel(union, matrix) for matrix in padded]

    stats = EdgeStats.from_model(aligned[0])
    for model in aligned[1:]:
        stats = update_stats(stats, model)
    click.echo(f"combined maps: {stats.m}")
    click.echo(f"nodes: {len(labels)}")
    click.echo(f"max |mean| edge: {abs(stats.mean).max():.6f}")
    if stats.var_defined:
        click.echo(f"max edge variance: {stats.var.max():.6f}")
    else:
        click.echo("variance undefined for a single map")
    if out_prefix:
        for kind, matrix in (("mean", stats.mean), ("var", stats.var)):
            with open(f"{out_prefix}.{kind}.csv", "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["label", *labels])
                for lbl, row in zip(labels, matrix):
                    writer.writerow([lbl, *(repr(float(v)) for v in row)])
        click.echo(f"wrote {out_prefix}.mean.csv and {out_prefix}.var.csv")


def _parse_edge_list(arg: str, labels) -> list[tuple[int, int]]:
    n = len(labels)
    if arg == "all":
        return [(i, j) for i in range(n) for j in range(n)]
    pairs = []
    for chunk in arg.split(";"):
        i_s, sep, j_s = chunk.partition(",")
        if not sep:
            raise click.UsageError(f"--edges expects 'i,j;i,j' pairs or 'all', got {chunk!r}")
        try:
            pairs.append((int(i_s), int(j_s)))
        except ValueError:
            raise click.UsageError(f"bad edge pair {chunk!r}") from None
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise click.UsageError(f"edge ({i},{j}) out of range for {n} nodes")
    return pairs


@main.command(name="learn")
@click.option("--series", "series_path", required=True, help="time-series CSV")
@click.option("--law", type=click.Choice(["hebbian", "dhl", "hybrid", "discrete-dhl"]),
              default="discrete-dhl", show_default=True)
@click.option("--mu", default=0.1, show_default=True)
@click.option("--h", "h_step", default=0.1, show_default=True)
@click.option("--iterations", default=1, show_default=True)
@click.option("--edges", "edges_arg", default="all", show_default=True,
              help="edges to trace: 'i,j;k,l' pairs or 'all'")
@click.option("--out", "out_path", default=None, help="write the learned map here")
@click.option("--trace-out", "trace_path", default=None, help="write the update trace CSV here")
def learn_cmd(series_path, law, mu, h_step, iterations, edges_arg, out_path, trace_path):
    """Estimate causal edges from time-series data."""
    try:
        series = model_io.load_timeseries_csv(series_path)
    except model_io.DocumentError as exc:
        raise ValidationFailure(str(exc)) from exc
    trace_edges = _parse_edge_list(edges_arg, series.labels)
    try:
        config = LearningConfig(law=law, mu=mu, h=h_step, iterations=iterations)
        matrix, trace_obj = learn_edges(
            series, config, EdgeMatrix.zeros(series.n_nodes), trace_edges
        )
    except FcmError as exc:
        raise ValidationFailure(str(exc)) from exc

    learned = FcmModel.create(series.labels, matrix.weights, name=f"learned-{law}")
    click.echo(f"law: {law}  samples: {series.n_samples}  passes: {iterations}")
    click.echo(f"max |edge|: {abs(matrix.weights).max():.6f}")
    if out_path:
        model_io.save_model(learned, out_path)
        click.echo(f"wrote {out_path}")
    if trace_path:
        with open(trace_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            names = [f"{series.labels[i]}->{series.labels[j]}" for i, j in trace_obj.edges]
            writer.writerow(["pass", "t", *names])
            for (pass_no, t), values in zip(trace_obj.steps, trace_obj.values):
                writer.writerow([pass_no, t, *(repr(v) for v in values)])
        click.echo(f"wrote {trace_path}")


@main.command(name="influence")
@click.option("--model", "model_ref", required=True)
@click.option("--from", "source_label", required=True, help="upstream node label")
@click.option("--to", "target_label", required=True, help="downstream node label")
@click.option("--state", "state_ref", default=None,
              help="named initial state or comma-separated operating point "
                   "(default: 0.5 everywhere)")
@click.option("--equilibrium-of", "equilibrium_preset", default=None,
              help="use the attractor of this clamp preset as the operating point")
@click.option("--max-paths", default=DEFAULT_MAX_PATHS, show_default=True)
def influence_cmd(model_ref, source_label, target_label, state_ref, equilibrium_preset, max_paths):
    """Per-path and total causal influence between two nodes."""
    doc = _resolve_document(model_ref)
    model = doc.model
    try:
        source = model.index_of(source_label)
        target = model.index_of(target_label)
    except KeyError as exc:
        raise click.UsageError(f"unknown node label: {exc}") from None

    if state_ref is not None and equilibrium_preset is not None:
        raise click.UsageError("--state and --equilibrium-of are mutually exclusive")
    if equilibrium_preset is not None:
        clamps = doc.presets.get(equilibrium_preset)
        if clamps is None:
            raise click.UsageError(f"unknown preset {equilibrium_preset!r}")
        result = run(model, StateVector((0.0,) * model.n), clamps)
        if not result.converged:
            raise NotConvergedFailure("the preset scenario did not converge")
        cycle = [s.values for s in result.cycle]
        mean = [sum(col) / len(cycle) for col in zip(*cycle)]
        state = StateVector(tuple(mean))
    elif state_ref is None:
        state = StateVector((0.5,) * model.n)
    else:
        state = _parse_initial(doc, state_ref)

    try:
        report = total_influence(model, state, source, target, max_paths)
    except FcmError as exc:
        raise ValidationFailure(str(exc)) from exc

    click.echo(f"influence of {source_label} on {target_label}")
    click.echo("path  edge-product  derivative-weight  influence")
    for p in report.paths:
        names = "->".join(model.nodes[i].label for i in p.node_ids)
        click.echo(
            f"  {names}  {p.edge_product:+.6f}  {p.derivative_weight:.6f}  "
            f"{p.influence:+.6f}"
        )
    click.echo(f"paths: {len(report.paths)}  truncated: {'yes' if report.truncated else 'no'}")
    if report.cycle_warning:
        click.echo("warning: a cycle touches these paths; the total covers "
                   "simple paths only")
    click.echo(f"total: {report.total:+.6f}")


@main.command(name="quantize")
@click.option("--model", "model_ref", required=True)
@click.option("--out", "out_path", default=None)
def quantize_cmd(model_ref, out_path):
    """Replace every edge with its sign (trivalent model)."""
    doc = _resolve_document(model_ref)
    quantized = quantize(doc.model)
    text = model_io.dumps_model(quantized)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command(name="serve")
@click.option("--model-dir", default=None,
              help="directory of model documents to load and persist uploads into")
@click.option("--listen", default="127.0.0.1:8000", show_default=True, metavar="HOST:PORT")
@click.option("--ui", "ui_dir", default=None, help="serve this static UI build at /ui")
def serve_cmd(model_dir, listen, ui_dir):
    """Start the HTTP API service."""
    import uvicorn

    from .service import create_app

    host, sep, port_s = listen.partition(":")
    if not sep:
        raise click.UsageError("--listen expects HOST:PORT")
    try:
        port = int(port_s)
    except ValueError:
        raise click.UsageError(f"bad port {port_s!r}") from None
    app = create_app(model_dir=model_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
