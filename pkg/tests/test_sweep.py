import numpy as np
import pytest

from fcmlab.core import ClampSpec, StateVector
from fcmlab.inference import LIMIT_CYCLE
from fcmlab.sweep import (
    ACTIVE_IN_ALL,
    ACTIVE_IN_ANY,
    ON_FREE,
    ON_OFF,
    SweepConfig,
    SweepConfigError,
    compare_quantized,
    run_scenario,
    run_sweep,
)

from conftest import make_model


@pytest.fixture
def driver_model():
    # input n0 drives outcome n1 through a single positive edge
    return make_model([[0.0, 1.0], [0.0, 0.0]], labels=["input", "outcome"])


class TestConfig:
    def test_rejects_empty_inputs(self):
        with pytest.raises(SweepConfigError):
            SweepConfig(input_nodes=(), outcome_node=0)

    def test_rejects_outcome_in_inputs(self):
        with pytest.raises(SweepConfigError):
            SweepConfig(input_nodes=(0, 1), outcome_node=1)

    def test_rejects_oversized_sweeps(self):
        with pytest.raises(SweepConfigError):
            SweepConfig(input_nodes=tuple(range(23)), outcome_node=23)

    def test_rejects_unknown_modes(self):
        with pytest.raises(SweepConfigError):
            SweepConfig(input_nodes=(0,), outcome_node=1, clamp_mode="soft")

    def test_out_of_range_ids_caught_against_model(self, driver_model):
        config = SweepConfig(input_nodes=(5,), outcome_node=1)
        with pytest.raises(SweepConfigError):
            config.check_against(driver_model)

    def test_on_off_clamps(self):
        config = SweepConfig(input_nodes=(0, 2), outcome_node=1)
        assert config.clamps_for(0b01).as_dict() == {0: 1.0, 2: 0.0}
        assert config.clamps_for(0b10).as_dict() == {0: 0.0, 2: 1.0}

    def test_on_free_clamps(self):
        config = SweepConfig(input_nodes=(0, 2), outcome_node=1, clamp_mode=ON_FREE)
        assert config.clamps_for(0b01).as_dict() == {0: 1.0}
        assert config.clamps_for(0b00).as_dict() == {}


class TestRunSweep:
    def test_single_driver_fraction_half(self, driver_model):
        config = SweepConfig(input_nodes=(0,), outcome_node=1)
        report = run_sweep(driver_model, config)
        assert report.scenario_count == 2
        assert report.positive_count == 1
        assert report.outcome_fraction == 0.5
        by_id = {r.scenario_id: r for r in report.records}
        assert by_id[0].positive is False
        assert by_id[1].positive is True

    def test_every_scenario_recorded_once(self, trap):
        config = SweepConfig(input_nodes=(1, 3, 5), outcome_node=16, max_iters=50)
        report = run_sweep(trap, config)
        assert sorted(r.scenario_id for r in report.records) == list(range(8))

    def test_deterministic_and_parallel_merge_identical(self, driver_model):
        rng = np.random.default_rng(21)
        rows = rng.choice([-1.0, 0.0, 1.0], size=(6, 6))
        model = make_model(rows)
        config = SweepConfig(input_nodes=(0, 1, 2, 3), outcome_node=5)
        serial = run_sweep(model, config)
        parallel = run_sweep(model, config, jobs=2)
        assert serial == parallel

    def test_fraction_invariant_under_relabeling(self):
        rng = np.random.default_rng(22)
        rows = rng.choice([-1.0, 0.0, 1.0], size=(5, 5))
        m1 = make_model(rows, labels=["a", "b", "c", "d", "out"])
        m2 = make_model(rows, labels=["w", "x", "y", "z", "out"])
        config = SweepConfig(input_nodes=(0, 1, 2, 3), outcome_node=4)
        assert (
            run_sweep(m1, config).outcome_fraction
            == run_sweep(m2, config).outcome_fraction
        )

    def test_sign_flip_complements_classification(self):
        # chain input -> mid -> outcome with no other fan-in to the outcome:
        # negating the outcome's fan-in complements on/off scenarios
        rows = np.zeros((3, 3))
        rows[0, 1] = 1.0
        rows[1, 2] = 1.0
        flipped = rows.copy()
        flipped[1, 2] = -1.0
        config = SweepConfig(input_nodes=(0,), outcome_node=2, max_iters=50)
        a = run_sweep(make_model(rows), config)
        b = run_sweep(make_model(flipped), config)
        for ra, rb in zip(a.records, b.records):
            if ra.positive:
                assert not rb.positive

    def test_nonconvergent_scenarios_flagged_not_dropped(self, dolphin):
        config = SweepConfig(input_nodes=(1,), outcome_node=0, max_iters=2)
        report = run_sweep(dolphin, config)
        assert report.nonconverged_count > 0
        assert (
            report.positive_count + report.negative_count + report.nonconverged_count
            == report.scenario_count
        )

    def test_profiles_use_cycle_means(self, dolphin):
        # free dolphin run cycles through 4 states each activating one or
        # two nodes; the profile for that class must be the cycle average
        config = SweepConfig(input_nodes=(3,), outcome_node=0, max_iters=50)
        report = run_sweep(dolphin, config)
        on_record = [r for r in report.records if r.scenario_id == 1][0]
        assert on_record.kind in (LIMIT_CYCLE, "fixed-point")

    def test_progress_callback_monotone(self, trap):
        config = SweepConfig(input_nodes=(1, 3, 5, 7), outcome_node=16, max_iters=50)
        seen = []
        run_sweep(trap, config, progress=lambda done, total: seen.append((done, total)))
        dones = [d for d, _ in seen]
        assert dones == sorted(dones)
        assert seen[-1][0] == seen[-1][1] == 16


class TestOutcomeRules:
    def test_any_vs_all_on_limit_cycle(self, dolphin):
        # free dolphin cycle activates srv-threat in exactly one of four states
        config_any = SweepConfig(
            input_nodes=(0,), outcome_node=3, outcome_rule=ACTIVE_IN_ANY, max_iters=50
        )
        config_all = SweepConfig(
            input_nodes=(0,), outcome_node=3, outcome_rule=ACTIVE_IN_ALL, max_iters=50
        )
        rep_any = run_sweep(dolphin, config_any)
        rep_all = run_sweep(dolphin, config_all)
        assert rep_any.positive_count >= rep_all.positive_count

    def test_run_scenario_wrapper(self, driver_model):
        result, positive = run_scenario(
            driver_model, ClampSpec.of({0: 1.0}), outcome_node=1
        )
        assert positive is True
        result, positive = run_scenario(
            driver_model, ClampSpec.of({0: 0.0}), outcome_node=1
        )
        assert positive is False


class TestTrapScenarios:
    WAR = 16

    def trap_clamps(self, trap_doc, extra=None, drop=None):
        base = dict(trap_doc.presets["trap-scenario"].as_dict())
        for label_id, value in (extra or {}).items():
            base[label_id] = value
        for label_id in drop or ():
            base.pop(label_id)
        return ClampSpec.of(base)

    def test_six_condition_scenario_reaches_war_in_four_iterations(self, trap, trap_doc):
        result, positive = run_scenario(
            trap, trap_doc.presets["trap-scenario"], outcome_node=self.WAR
        )
        assert positive is True
        assert result.kind == "fixed-point"
        assert result.iterations_used == 4

    def test_shared_culture_prevents_war(self, trap, trap_doc):
        result, positive = run_scenario(
            trap, trap_doc.presets["trap-plus-shared-culture"], outcome_node=self.WAR
        )
        assert positive is False

    @pytest.mark.parametrize("drop_label", ["usd", "chnecon"])
    def test_dropping_key_driver_prevents_war(self, trap, trap_doc, drop_label):
        clamps = self.trap_clamps(trap_doc, drop=[trap.index_of(drop_label)])
        _, positive = run_scenario(trap, clamps, outcome_node=self.WAR)
        assert positive is False

    def test_war_robust_to_geography_and_diplomacy_toggles(self, trap, trap_doc):
        with_geod = self.trap_clamps(trap_doc, extra={trap.index_of("geod"): 1.0})
        _, positive = run_scenario(trap, with_geod, outcome_node=self.WAR)
        assert positive is True
        dipl_off = self.trap_clamps(trap_doc, extra={trap.index_of("dipl"): 0.0})
        _, positive = run_scenario(trap, dipl_off, outcome_node=self.WAR)
        assert positive is True


class TestCompareQuantized:
    def test_trivalent_model_agrees_with_itself(self):
        rng = np.random.default_rng(23)
        rows = rng.choice([-1.0, 0.0, 1.0], size=(5, 5))
        model = make_model(rows)
        config = SweepConfig(input_nodes=(0, 1, 2, 3), outcome_node=4, max_iters=64)
        comparison = compare_quantized(model, config)
        assert comparison.agreement_rate == 1.0
        assert comparison.original == comparison.quantized

    def test_agreement_counts_total_to_scenarios(self, trap):
        config = SweepConfig(input_nodes=(1, 3, 5, 7, 9), outcome_node=16, max_iters=64)
        comparison = compare_quantized(trap, config)
        assert sum(sum(row) for row in comparison.agreement_counts) == 32
