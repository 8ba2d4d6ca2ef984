import math

import pytest

from mfctrl.errors import ConfigError
from mfctrl.trajectories import (
    ReferenceSpec,
    Segment,
    Sinusoid,
    derivative_consistency_check,
    eval_reference,
    hold,
)


class TestEvalReference:
    def test_hold(self):
        spec = hold(0.7)
        for t in (0.0, 1.0, 1e3):
            sp = eval_reference(spec, t)
            assert sp.y_star == 0.7 and sp.y_star_dot == 0.0

    def test_smoothstep_midpoint(self):
        # cubic smoothstep: h(0.5) = 0.5, h'(0.5) = 1.5
        spec = ReferenceSpec(
            kind="smoothed_step_sequence", segments=(Segment(0.0, 1.0, 1.0),)
        )
        sp = eval_reference(spec, 0.5)
        assert sp.y_star == pytest.approx(0.5)
        assert sp.y_star_dot == pytest.approx(1.5)

    def test_levels_chain_between_segments(self):
        spec = ReferenceSpec(
            kind="smoothed_step_sequence",
            initial=0.1,
            segments=(Segment(1.0, 0.5, 1.0), Segment(4.0, -0.2, 2.0)),
        )
        assert eval_reference(spec, 0.5).y_star == 0.1
        assert eval_reference(spec, 3.0).y_star == 0.5
        assert eval_reference(spec, 10.0).y_star == -0.2

    def test_sinusoid_derivative(self):
        spec = ReferenceSpec(kind="sinusoid_mix", sinusoids=(Sinusoid(1.0, 0.1, 0.0),))
        sp = eval_reference(spec, 0.0)
        assert sp.y_star == pytest.approx(0.0)
        assert sp.y_star_dot == pytest.approx(2.0 * math.pi * 0.1)

    def test_c1_at_transition_boundaries(self):
        spec = ReferenceSpec(
            kind="smoothed_step_sequence", segments=(Segment(1.0, 1.0, 2.0),)
        )
        for tb in (1.0, 3.0):
            left = eval_reference(spec, tb - 1e-12).y_star_dot
            right = eval_reference(spec, tb + 1e-12).y_star_dot
            assert abs(left - right) <= 1e-11


class TestDerivativeConsistency:
    def test_hold_is_exact(self):
        assert derivative_consistency_check(hold(2.0), 0.0, 5.0, 0.01) == 0.0

    def test_smoothstep_second_order(self):
        spec = ReferenceSpec(
            kind="smoothed_step_sequence", segments=(Segment(0.0, 1.0, 1.0),)
        )
        # interior of the ramp, away from the curvature jumps at 0 and 1
        dev = derivative_consistency_check(spec, 0.1, 0.9, 1e-4)
        assert dev <= 1e-6

    def test_sinusoid_second_order(self):
        spec = ReferenceSpec(kind="sinusoid_mix", sinusoids=(Sinusoid(1.0, 1.0, 0.3),))
        dev = derivative_consistency_check(spec, 0.0, 2.0, 1e-4)
        assert dev <= 1e-6

    def test_quadratic_convergence(self):
        spec = ReferenceSpec(kind="sinusoid_mix", sinusoids=(Sinusoid(1.0, 1.0, 0.0),))
        d1 = derivative_consistency_check(spec, 0.0, 1.0, 4e-4)
        d2 = derivative_consistency_check(spec, 0.0, 1.0, 2e-4)
        assert 3.0 <= d1 / d2 <= 5.0

    def test_bad_grid_rejected(self):
        with pytest.raises(ValueError):
            derivative_consistency_check(hold(0.0), 1.0, 1.0, 0.01)


class TestValidation:
    def test_overlapping_segments_rejected(self):
        with pytest.raises(ConfigError):
            ReferenceSpec(
                kind="smoothed_step_sequence",
                segments=(Segment(0.0, 1.0, 2.0), Segment(1.0, 0.0, 1.0)),
            )

    def test_zero_duration_rejected(self):
        with pytest.raises(ConfigError):
            ReferenceSpec(kind="smoothed_step_sequence", segments=(Segment(0.0, 1.0, 0.0),))

    def test_hold_takes_no_segments(self):
        with pytest.raises(ConfigError):
            ReferenceSpec(kind="hold", segments=(Segment(0.0, 1.0, 1.0),))

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            ReferenceSpec(kind="spline")
