import json

import numpy as np
import pytest

from fcmlab.core import ModelValidationError, validate_model
from fcmlab.io import (
    BUNDLED_MODELS,
    DocumentError,
    ModelDocument,
    bundled_data_path,
    check_edge_signs,
    dumps_document,
    dumps_sweep_report,
    export_profile_csv,
    export_scenarios_csv,
    load_bundled_document,
    load_bundled_model,
    load_document,
    load_sign_table,
    load_timeseries_csv,
    loads_document,
    save_document,
)
from fcmlab.sweep import SweepConfig, run_sweep

from conftest import DOLPHIN_EDGES

GOOD_DOC = """\
format_version: 1
model:
  name: mini
  nodes:
    - label: a
      activation: {kind: hard-threshold, threshold: 0.0}
    - label: b
      activation: {kind: logistic, c: 2.0}
  edges:
    - [0.0, 0.5]
    - [-0.25, 0.0]
presets:
  push: {a: 1.0}
initial_states:
  start: [0.0, 1.0]
"""


class TestLoad:
    def test_good_document(self):
        doc = loads_document(GOOD_DOC)
        assert doc.model.labels == ("a", "b")
        assert doc.model.edges[0, 1] == 0.5
        assert doc.presets["push"].as_dict() == {0: 1.0}
        assert doc.initial_states["start"].values == (0.0, 1.0)
        assert doc.model.nodes[1].activation.c == 2.0

    def test_unknown_field_reports_position(self):
        bad = GOOD_DOC.replace("  name: mini", "  name: mini\n  shape: round")
        with pytest.raises(DocumentError) as exc:
            loads_document(bad)
        message = str(exc.value)
        assert "shape" in message
        assert "line 4" in message
        assert "column" in message

    def test_unknown_node_field_rejected(self):
        bad = GOOD_DOC.replace("      activation: {kind: logistic, c: 2.0}",
                               "      activation: {kind: logistic, c: 2.0}\n      color: blue")
        with pytest.raises(DocumentError) as exc:
            loads_document(bad)
        assert "color" in str(exc.value)

    def test_threshold_key_rejected_for_logistic(self):
        bad = GOOD_DOC.replace("{kind: logistic, c: 2.0}", "{kind: logistic, threshold: 1.0}")
        with pytest.raises(DocumentError):
            loads_document(bad)

    def test_parse_error_reports_line_and_column(self):
        with pytest.raises(DocumentError) as exc:
            loads_document("model: [unclosed")
        assert "line" in str(exc.value)

    def test_out_of_range_edge_is_validation_error(self):
        bad = GOOD_DOC.replace("[0.0, 0.5]", "[0.0, 2.0]")
        with pytest.raises(ModelValidationError) as exc:
            loads_document(bad)
        assert any("edge out of [-1,1]" in str(v) for v in exc.value.violations)

    def test_unsupported_version_rejected(self):
        with pytest.raises(DocumentError):
            loads_document(GOOD_DOC.replace("format_version: 1", "format_version: 2"))

    def test_unknown_preset_label_reports_position(self):
        bad = GOOD_DOC.replace("push: {a: 1.0}", "push: {zz: 1.0}")
        with pytest.raises(DocumentError) as exc:
            loads_document(bad)
        assert "zz" in str(exc.value)

    def test_wrong_initial_state_length(self):
        bad = GOOD_DOC.replace("start: [0.0, 1.0]", "start: [0.0, 1.0, 0.5]")
        with pytest.raises(DocumentError):
            loads_document(bad)

    def test_nonsquare_edges_rejected(self):
        bad = GOOD_DOC.replace("    - [-0.25, 0.0]\n", "")
        with pytest.raises(DocumentError) as exc:
            loads_document(bad)
        assert "square" in str(exc.value)

    def test_missing_file_is_document_error(self, tmp_path):
        with pytest.raises(DocumentError):
            load_document(tmp_path / "nope.yaml")


class TestRoundTrip:
    def test_canonical_round_trip_bytes(self):
        doc = loads_document(GOOD_DOC)
        canonical = dumps_document(doc)
        again = loads_document(canonical)
        assert dumps_document(again) == canonical

    def test_save_load_identity(self, tmp_path, dolphin_doc):
        path = tmp_path / "dolphin.fcm.yaml"
        save_document(dolphin_doc, path)
        loaded = load_document(path)
        assert loaded.model == dolphin_doc.model
        assert loaded.presets == dolphin_doc.presets
        assert loaded.initial_states == dolphin_doc.initial_states

    def test_bundled_files_are_canonical(self):
        for name in BUNDLED_MODELS:
            raw = open(bundled_data_path(f"{name}.fcm.yaml"), encoding="utf-8").read()
            assert dumps_document(loads_document(raw)) == raw

    def test_float_formatting_is_shortest_round_trip(self):
        doc = loads_document(GOOD_DOC)
        text = dumps_document(doc)
        assert "0.5" in text and "-0.25" in text

    def test_special_labels_survive(self):
        renamed = GOOD_DOC.replace("label: a", 'label: "WAR*"').replace(
            "push: {a: 1.0}", 'push: {"WAR*": 1.0}'
        )
        doc = loads_document(renamed)
        text = dumps_document(doc)
        again = loads_document(text)
        assert again.model.labels[0] == "WAR*"
        assert again.presets["push"].as_dict() == {0: 1.0}


class TestBundledModels:
    def test_dolphin_matches_reference_matrix(self):
        model = load_bundled_model("dolphin")
        assert np.array_equal(model.edges.weights, np.array(DOLPHIN_EDGES, float))

    def test_all_bundled_models_validate(self):
        for name in BUNDLED_MODELS:
            assert validate_model(load_bundled_model(name)) == []

    def test_psot_is_trivalent_node_count(self):
        model = load_bundled_model("psot-signs")
        assert model.n == 34
        w = model.edges.weights
        assert set(np.unique(w)).issubset({-1.0, 0.0, 1.0})
        assert model.labels[-1] == "PSOT*"

    def test_trap_sign_consistency(self, trap):
        table = load_sign_table(bundled_data_path("thucydides-signs.yaml"))
        assert check_edge_signs(trap, table) == []

    def test_sign_check_catches_tampering(self, trap):
        table = load_sign_table(bundled_data_path("thucydides-signs.yaml"))
        w = trap.edges.weights.copy()
        i, j = trap.index_of("NUKE"), trap.index_of("WAR*")
        w[i, j] = 0.5  # flip the deterrent into a driver
        from fcmlab.core import EdgeMatrix

        tampered = trap.with_edges(EdgeMatrix(w))
        problems = check_edge_signs(tampered, table)
        assert any(p.code == "sign-mismatch" for p in problems)

    def test_trap_weights_are_exact_32nds(self, trap):
        scaled = trap.edges.weights * 32
        assert np.array_equal(scaled, np.round(scaled))

    def test_unknown_bundled_name(self):
        with pytest.raises(KeyError):
            load_bundled_document("kraken")

    def test_bundled_documents_satisfy_published_schema(self):
        jsonschema = pytest.importorskip("jsonschema")
        import yaml as pyyaml

        with open(bundled_data_path("model-format.schema.json"), encoding="utf-8") as fh:
            schema = json.load(fh)
        for name in BUNDLED_MODELS:
            with open(bundled_data_path(f"{name}.fcm.yaml"), encoding="utf-8") as fh:
                payload = pyyaml.safe_load(fh)
            jsonschema.validate(payload, schema)


class TestTimeSeriesCsv:
    def test_bundled_sample_has_163_samples(self):
        series = load_timeseries_csv(bundled_data_path("sample-trends.csv"))
        assert series.n_samples == 163
        assert series.labels == ("topic-a", "topic-b", "topic-c")
        assert float(series.values.max()) <= 1.0
        assert float(series.values.min()) >= 0.0

    def test_constant_column_zero_range_flag(self, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text("t,x,y\n0,5,1\n1,5,2\n2,5,3\n")
        series = load_timeseries_csv(path)
        assert series.normalization[0].zero_range
        assert np.all(series.values[:, 0] == 0.0)

    def test_ragged_row_names_row(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("t,x,y\n0,1,2\n1,3\n")
        with pytest.raises(DocumentError) as exc:
            load_timeseries_csv(path)
        assert "row 3" in str(exc.value)

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,x,y\n0,1,2\n1,oops,4\n")
        with pytest.raises(DocumentError) as exc:
            load_timeseries_csv(path)
        assert "row 3" in str(exc.value)
        assert "column 2" in str(exc.value)
        assert "x" in str(exc.value)

    def test_missing_cell_reported(self, tmp_path):
        path = tmp_path / "hole.csv"
        path.write_text("t,x,y\n0,1,2\n1,,4\n")
        with pytest.raises(DocumentError) as exc:
            load_timeseries_csv(path)
        assert "row 3" in str(exc.value)

    def test_time_must_increase(self, tmp_path):
        path = tmp_path / "time.csv"
        path.write_text("t,x\n0,1\n0,2\n")
        with pytest.raises(DocumentError) as exc:
            load_timeseries_csv(path)
        assert "increase" in str(exc.value)


class TestSweepReportExport:
    @pytest.fixture
    def small_report(self, dolphin):
        config = SweepConfig(input_nodes=(3,), outcome_node=0, max_iters=50)
        return run_sweep(dolphin, config)

    def test_report_text_contains_counts(self, small_report):
        text = dumps_sweep_report(small_report, "dolphin")
        assert "scenarios: 2" in text
        assert "positive_profile:" in text
        assert "cluster" in text

    def test_scenarios_csv(self, tmp_path, small_report):
        path = tmp_path / "scenarios.csv"
        export_scenarios_csv(small_report, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "scenario_id,srv-threat,kind,classification"
        assert len(lines) == 3

    def test_profile_csv(self, tmp_path, small_report):
        path = tmp_path / "profile.csv"
        export_profile_csv(small_report, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "label,positive_mean,negative_mean"
        assert len(lines) == 6
