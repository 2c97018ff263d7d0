import numpy as np
import pytest

from fcmlab.core import (
    ActivationSpec,
    ClampSpec,
    DimensionMismatchError,
    StateVector,
)
from fcmlab.inference import (
    FIXED_POINT,
    LIMIT_CYCLE,
    NOT_CONVERGED,
    run,
    step,
    trace,
)

from conftest import make_logistic_model, make_model

SHARK = StateVector((0, 0, 0, 1, 0))


def values(states):
    return [s.values for s in states]


class TestStep:
    def test_free_step_from_shark_state(self, dolphin):
        assert step(dolphin, SHARK).values == (1, 0, 0, 0, 1)

    def test_second_free_step(self, dolphin):
        assert step(dolphin, StateVector((1, 0, 0, 0, 1))).values == (0, 1, 0, 0, 0)

    def test_clamped_step_holds_threat(self, dolphin):
        clamps = ClampSpec.of({3: 1.0})
        assert step(dolphin, SHARK, clamps).values == (1, 0, 0, 1, 1)

    def test_dimension_mismatch(self, dolphin):
        with pytest.raises(DimensionMismatchError):
            step(dolphin, StateVector((0, 0)))

    def test_clamp_out_of_range(self, dolphin):
        with pytest.raises(DimensionMismatchError):
            step(dolphin, SHARK, ClampSpec.of({9: 1.0}))

    def test_step_increments_t(self, dolphin):
        assert step(dolphin, SHARK).t == 1


class TestRun:
    def test_dolphin_free_run_four_step_cycle(self, dolphin):
        result = run(dolphin, SHARK)
        assert result.kind == LIMIT_CYCLE
        assert result.transient == ()
        assert values(result.cycle) == [
            (0, 0, 0, 1, 0),
            (1, 0, 0, 0, 1),
            (0, 1, 0, 0, 0),
            (0, 0, 1, 0, 0),
        ]
        assert result.iterations_used == 4

    def test_dolphin_clamped_run(self, dolphin):
        result = run(dolphin, SHARK, ClampSpec.of({3: 1.0}))
        assert result.kind == LIMIT_CYCLE
        assert values(result.transient) == [
            (0, 0, 0, 1, 0),
            (1, 0, 0, 1, 1),
            (0, 1, 0, 1, 1),
        ]
        assert values(result.cycle) == [
            (0, 1, 0, 1, 0),
            (1, 0, 0, 1, 0),
            (1, 1, 0, 1, 1),
        ]
        # two transient states beyond the stimulus itself
        assert len(result.transient[1:]) == 2

    def test_initial_state_gets_clamped_too(self, dolphin):
        result = run(dolphin, StateVector((0, 0, 0, 0, 0)), ClampSpec.of({3: 1.0}))
        assert result.states[0].values == (0, 0, 0, 1, 0)

    def test_fixed_point_when_initial_repeats(self):
        model = make_model(np.zeros((3, 3)))
        result = run(model, StateVector((0, 0, 0)))
        assert result.kind == FIXED_POINT
        assert result.transient == ()
        assert len(result.cycle) == 1
        assert result.iterations_used == 1

    def test_not_converged_when_budget_too_small(self, dolphin):
        result = run(dolphin, SHARK, max_iters=3)
        assert result.kind == NOT_CONVERGED
        assert result.cycle == ()
        assert len(result.transient) == 4
        assert result.iterations_used == 3

    def test_clamped_nodes_hold_value_in_every_state(self, dolphin):
        clamps = ClampSpec.of({3: 1.0})
        result = run(dolphin, StateVector((0, 1, 0, 0, 1)), clamps)
        for s in result.states:
            assert s.values[3] == 1.0

    def test_restepping_cycle_reproduces_it_in_order(self, dolphin):
        result = run(dolphin, SHARK, ClampSpec.of({3: 1.0}))
        cyc = list(result.cycle)
        for k, state in enumerate(cyc):
            successor = cyc[(k + 1) % len(cyc)]
            assert step(dolphin, state, ClampSpec.of({3: 1.0})).values == successor.values

    def test_determinism(self, dolphin):
        a = run(dolphin, SHARK, ClampSpec.of({3: 1.0}))
        b = run(dolphin, SHARK, ClampSpec.of({3: 1.0}))
        assert values(a.states) == values(b.states)
        assert (a.kind, a.iterations_used) == (b.kind, b.iterations_used)

    def test_threshold_models_always_converge_within_state_space(self):
        rng = np.random.default_rng(7)
        n = 4
        for _ in range(60):
            rows = rng.choice([-1.0, 0.0, 1.0], size=(n, n))
            model = make_model(rows)
            initial = StateVector(tuple(rng.integers(0, 2, size=n).astype(float)))
            result = run(model, initial, max_iters=2**n + 1)
            assert result.kind != NOT_CONVERGED

    def test_logistic_recurrence_uses_tolerance(self):
        # a contracting logistic map reaches its fixed point only in the
        # limit; the tolerance check must still detect the recurrence
        model = make_logistic_model([[0.0, 0.5], [0.5, 0.0]], c=1.0)
        result = run(model, StateVector((0.3, 0.9)))
        assert result.kind == FIXED_POINT
        again = step(model, result.cycle[0])
        assert np.allclose(again.values, result.cycle[0].values, atol=1e-8)

    def test_max_iters_must_be_positive(self, dolphin):
        with pytest.raises(ValueError):
            run(dolphin, SHARK, max_iters=0)


class TestTrace:
    def test_four_steps_return_to_start(self, dolphin):
        states = trace(dolphin, SHARK, n_steps=4)
        assert len(states) == 5
        assert states[-1].values == SHARK.values

    def test_zero_steps(self, dolphin):
        assert values(trace(dolphin, SHARK, n_steps=0)) == [SHARK.values]

    def test_clamped_trace_final_state(self, dolphin):
        states = trace(dolphin, SHARK, ClampSpec.of({3: 1.0}), n_steps=6)
        assert states[-1].values == (0, 1, 0, 1, 0)

    def test_segments_compose(self, dolphin):
        clamps = ClampSpec.of({3: 1.0})
        first = trace(dolphin, SHARK, clamps, n_steps=3)
        second = trace(dolphin, first[-1], clamps, n_steps=4)
        combined = trace(dolphin, SHARK, clamps, n_steps=7)
        assert values(first) + values(second[1:]) == values(combined)

    def test_negative_steps_rejected(self, dolphin):
        with pytest.raises(ValueError):
            trace(dolphin, SHARK, n_steps=-1)

    def test_t_indices_are_sequential(self, dolphin):
        states = trace(dolphin, SHARK, n_steps=3)
        assert [s.t for s in states] == [0, 1, 2, 3]
