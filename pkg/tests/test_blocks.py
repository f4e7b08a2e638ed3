"""Maneuver-block planners against the nonlinear truth propagator."""
import math

import numpy as np
import pytest

from rposim import (
    EciState,
    ForceModelConfig,
    OrbitalElements,
    RelativeElements,
    cart_to_elements,
    elements_to_cart,
    osc_to_mean,
    propagate,
    validate_schedule,
)
from rposim.blocks import (
    Deadbands,
    EccOpParams,
    FiringSchedule,
    PlannerError,
    PlannerParams,
    plan_arglat_correction,
    plan_eccentricity_correction,
    plan_inclination_correction,
    plan_raan_correction,
    predict_effect,
    size_eccentricity_operations,
)

J2_ONLY = ForceModelConfig(j2_enabled=True)
DESIRED = RelativeElements(de=0.001, di=math.radians(0.02))


@pytest.fixture(scope="module")
def target_mean(baseline_target_state):
    return osc_to_mean(cart_to_elements(baseline_target_state))


def make_chaser(baseline, **offsets):
    """Chaser state from the baseline elements plus element offsets."""
    oe = OrbitalElements(
        a=baseline.a + offsets.get("da", 0.0),
        e=baseline.e + offsets.get("de", 0.0),
        i=baseline.i + offsets.get("di", 0.0),
        raan=baseline.raan + offsets.get("draan", 0.0),
        argp=baseline.argp,
        ta=baseline.ta + offsets.get("du", 0.0),
    )
    return elements_to_cart(oe, epoch=0.0, mass=4.0)


def params_for(spacecraft, mass=4.0, **overrides):
    return PlannerParams(spacecraft=spacecraft, mass_kg=mass, desired=DESIRED,
                         **overrides)


def measured_delta(result):
    chaser = osc_to_mean(cart_to_elements(result.final_chaser))
    target = osc_to_mean(cart_to_elements(result.final_target))
    return RelativeElements.between(chaser, target)


def run_schedule(target0, chaser0, schedule, spacecraft, settle_s=600.0):
    return propagate(target0, chaser0, list(schedule.segments), J2_ONLY,
                     spacecraft, (0.0, schedule.t_end + settle_s), 30.0,
                     record_every=100)


def delta_between(target0, chaser0):
    return RelativeElements.between(
        osc_to_mean(cart_to_elements(chaser0)),
        osc_to_mean(cart_to_elements(target0)))


class TestInclinationBlock:
    def test_below_deadband_empty(self, baseline_target_state, spacecraft,
                                  target_mean):
        delta = RelativeElements(di=DESIRED.di - math.radians(0.001))
        schedule = plan_inclination_correction(delta, target_mean,
                                               params_for(spacecraft), 0.0)
        assert schedule.is_empty

    def test_two_firings_reach_the_offset(self, baseline_target_state,
                                          spacecraft, baseline_elements,
                                          target_mean):
        chaser0 = baseline_target_state
        delta = delta_between(baseline_target_state, chaser0)
        schedule = plan_inclination_correction(delta, target_mean,
                                               params_for(spacecraft), 0.0)
        assert 2 <= len(schedule) <= 3
        assert all(s.direction == "+W" for s in schedule.segments)
        res = run_schedule(baseline_target_state, chaser0, schedule, spacecraft)
        after = measured_delta(res)
        assert math.degrees(after.di) == pytest.approx(0.02, abs=0.002)

    def test_single_firing_oracle(self, baseline_target_state, spacecraft,
                                  target_mean):
        # One full cross-track arc: command exactly its effective authority
        # and compare the truth change against the prediction.
        params = params_for(spacecraft)
        delta = RelativeElements(di=DESIRED.di - math.radians(0.0098))
        schedule = plan_inclination_correction(delta, target_mean, params, 0.0)
        assert len(schedule) == 1
        assert schedule.segments[0].duration == pytest.approx(900.0)
        res = run_schedule(baseline_target_state, baseline_target_state,
                           schedule, spacecraft)
        after = measured_delta(res)
        assert after.di == pytest.approx(schedule.predicted.di, rel=0.05)
        assert math.degrees(after.di) == pytest.approx(0.0098, rel=0.05)
        # Orthogonality: inclination work leaves e and a nearly untouched.
        assert abs(after.de) < 1e-5
        assert abs(after.da) < 0.2

    def test_sign_flip(self, spacecraft, target_mean):
        params = params_for(spacecraft)
        up = plan_inclination_correction(
            RelativeElements(di=DESIRED.di - math.radians(0.01)),
            target_mean, params, 0.0)
        down = plan_inclination_correction(
            RelativeElements(di=DESIRED.di + math.radians(0.01)),
            target_mean, params, 0.0)
        assert all(s.direction == "+W" for s in up.segments)
        assert all(s.direction == "-W" for s in down.segments)


class TestEccentricityBlock:
    def test_below_deadband_empty(self, spacecraft, target_mean):
        delta = RelativeElements(de=DESIRED.de - 5e-5)
        schedule = plan_eccentricity_correction(delta, target_mean,
                                                params_for(spacecraft), 0.0)
        assert schedule.is_empty

    def test_single_operation_compensation(self, baseline_target_state,
                                           spacecraft, target_mean):
        # One full triplet raises e by ~3.4e-4 with no net altitude change.
        params = params_for(spacecraft)
        delta = RelativeElements(de=DESIRED.de - 3.42e-4)
        schedule = plan_eccentricity_correction(delta, target_mean, params,
                                                0.0, along_track_bias="none")
        assert len(schedule) in (3, 6)
        res = run_schedule(baseline_target_state, baseline_target_state,
                           schedule, spacecraft)
        after = measured_delta(res)
        assert after.de == pytest.approx(3.42e-4, rel=0.1)
        assert abs(after.da) < 0.1
        assert abs(math.degrees(after.di)) < 0.001
        assert after.de == pytest.approx(schedule.predicted.de, rel=0.1)
        assert abs(after.da - schedule.predicted.da) < 0.1

    def test_positive_bias_walks_forward(self, baseline_target_state,
                                         spacecraft, target_mean):
        # Chaser behind the target: positive bias must close the gap while
        # raising the eccentricity.
        params = params_for(spacecraft)
        delta = RelativeElements(de=DESIRED.de - 6.8e-4,
                                 du=math.radians(-0.35))
        schedule = plan_eccentricity_correction(delta, target_mean, params,
                                                0.0, along_track_bias="positive")
        assert not schedule.is_empty
        assert schedule.predicted.du > 0.0
        res = run_schedule(baseline_target_state,
                           make_chaser(cart_to_elements(baseline_target_state),
                                       du=math.radians(-0.35)),
                           schedule, spacecraft)
        after = measured_delta(res)
        assert abs(math.degrees(after.du)) < 0.35
        assert after.du > math.radians(-0.35)

    def test_walk_only_pair_preserves_e(self, baseline_target_state,
                                        spacecraft, target_mean):
        params = params_for(spacecraft)
        delta = RelativeElements(de=DESIRED.de, du=math.radians(-0.3))
        schedule = plan_eccentricity_correction(delta, target_mean, params,
                                                0.0, along_track_bias="positive")
        assert not schedule.is_empty
        assert abs(schedule.predicted.de) < 5e-5
        assert math.degrees(schedule.predicted.du) == pytest.approx(0.3,
                                                                    rel=0.15)

    def test_lowering_reverses_directions(self, spacecraft, target_mean):
        params = params_for(spacecraft)
        raise_plan = plan_eccentricity_correction(
            RelativeElements(de=DESIRED.de - 3.0e-4), target_mean, params, 0.0)
        lower_plan = plan_eccentricity_correction(
            RelativeElements(de=DESIRED.de + 3.0e-4), target_mean, params, 0.0)
        assert [s.direction for s in lower_plan.segments] == [
            {"+S": "-S", "-S": "+S"}[s.direction]
            for s in raise_plan.segments]

    def test_bad_bias_rejected(self, spacecraft, target_mean):
        with pytest.raises(ValueError, match="along_track_bias"):
            plan_eccentricity_correction(RelativeElements(), target_mean,
                                         params_for(spacecraft), 0.0,
                                         along_track_bias="sideways")

    def test_operation_sizing(self, spacecraft, target_mean):
        params = params_for(spacecraft)
        # Pure eccentricity need splits evenly between the two operations.
        sizing = size_eccentricity_operations(
            RelativeElements(de=DESIRED.de - 6.84e-4), target_mean, params)
        assert sizing.include_op1 and sizing.include_op2
        assert sizing.t_e1 == pytest.approx(sizing.t_e2, rel=1e-9)
        assert sizing.op1_sign == sizing.op2_sign == 1.0
        # Biased sizing skews toward the operation that walks the phase.
        skewed = size_eccentricity_operations(
            RelativeElements(de=DESIRED.de - 6.84e-4, du=math.radians(-0.2)),
            target_mean, params, along_track_bias="positive")
        assert skewed.t_e2 > skewed.t_e1
        # Converged inputs produce the empty sizing.
        idle = size_eccentricity_operations(
            RelativeElements(de=DESIRED.de), target_mean, params)
        assert idle == EccOpParams()

    def test_ecc_op_params_validation(self):
        with pytest.raises(ValueError, match="nonnegative"):
            EccOpParams(t_e1=-1.0)
        with pytest.raises(ValueError, match="signs"):
            EccOpParams(op1_sign=0.5)


class TestNodeBlock:
    def test_zero_error_empty(self, spacecraft, target_mean):
        schedule = plan_raan_correction(RelativeElements(), target_mean,
                                        params_for(spacecraft), 0.0)
        assert schedule.is_empty

    def test_closed_loop_quarter_degree(self, baseline_target_state,
                                        baseline_elements, spacecraft,
                                        target_mean):
        # Five-firing series against a +0.25 degree node error: hold about
        # -12.3 km, coast several days, restore, and land inside the
        # deadbands.
        chaser0 = make_chaser(baseline_elements, draan=math.radians(0.25))
        delta = delta_between(baseline_target_state, chaser0)
        chaser_mean = osc_to_mean(cart_to_elements(chaser0))
        schedule = plan_raan_correction(delta, chaser_mean,
                                        params_for(spacecraft), 0.0,
                                        n_firings=5)
        directions = [s.direction for s in schedule.segments]
        assert directions[:5] == ["-S"] * 5
        assert set(directions[5:]) == {"+S"}
        gaps = [schedule.segments[k + 1].t_start - schedule.segments[k].t_end
                for k in range(len(schedule) - 1)]
        coast = max(gaps)
        assert 4.0 * 86400.0 < coast < 9.0 * 86400.0
        res = run_schedule(baseline_target_state, chaser0, schedule, spacecraft)
        after = measured_delta(res)
        assert abs(math.degrees(after.draan)) < 0.02
        assert abs(after.da) < 0.5

    def test_restore_only_when_node_converged(self, baseline_target_state,
                                              baseline_elements, spacecraft):
        chaser0 = make_chaser(baseline_elements, da=2.0)
        delta = delta_between(baseline_target_state, chaser0)
        chaser_mean = osc_to_mean(cart_to_elements(chaser0))
        schedule = plan_raan_correction(delta, chaser_mean,
                                        params_for(spacecraft), 0.0)
        assert not schedule.is_empty
        assert all(s.direction == "-S" for s in schedule.segments)
        res = run_schedule(baseline_target_state, chaser0, schedule, spacecraft)
        assert abs(measured_delta(res).da) < 0.5

    def test_sign_flip(self, baseline_target_state, baseline_elements,
                       spacecraft):
        params = params_for(spacecraft)
        plans = {}
        for sign in (+1.0, -1.0):
            chaser0 = make_chaser(baseline_elements,
                                  draan=sign * math.radians(0.25))
            delta = delta_between(baseline_target_state, chaser0)
            chaser_mean = osc_to_mean(cart_to_elements(chaser0))
            plans[sign] = plan_raan_correction(delta, chaser_mean, params, 0.0,
                                               n_firings=2)
        flipped = [{"+S": "-S", "-S": "+S"}[s.direction]
                   for s in plans[+1.0].segments]
        assert [s.direction for s in plans[-1.0].segments] == flipped

    def test_infeasible_coast_raises(self, baseline_target_state,
                                     baseline_elements, spacecraft):
        chaser0 = make_chaser(baseline_elements, draan=math.radians(0.25))
        delta = delta_between(baseline_target_state, chaser0)
        chaser_mean = osc_to_mean(cart_to_elements(chaser0))
        tight = params_for(spacecraft, raan_max_coast_s=0.5 * 86400.0,
                           max_series_firings=1)
        with pytest.raises(PlannerError, match="coast"):
            plan_raan_correction(delta, chaser_mean, tight, 0.0)


class TestPhaseBlock:
    def test_zero_error_empty(self, spacecraft, target_mean):
        schedule = plan_arglat_correction(RelativeElements(), target_mean,
                                          params_for(spacecraft), 0.0)
        assert schedule.is_empty

    def test_closed_loop_three_degrees(self, baseline_target_state,
                                       baseline_elements, spacecraft):
        # Chaser 3.1 degrees behind: one firing down, a one-day coast, one
        # firing back.
        chaser0 = make_chaser(baseline_elements, du=math.radians(-3.1))
        delta = delta_between(baseline_target_state, chaser0)
        chaser_mean = osc_to_mean(cart_to_elements(chaser0))
        schedule = plan_arglat_correction(delta, chaser_mean,
                                          params_for(spacecraft), 0.0,
                                          n_firings=1)
        assert [s.direction for s in schedule.segments] == ["-S", "+S"]
        coast = schedule.segments[1].t_start - schedule.segments[0].t_end
        assert coast / 86400.0 == pytest.approx(1.07, abs=0.2)
        res = run_schedule(baseline_target_state, chaser0, schedule, spacecraft)
        after = measured_delta(res)
        assert abs(math.degrees(after.du)) < 0.1
        assert abs(after.da) < 0.5
        # The short coast bounds the node side effect.
        assert abs(math.degrees(after.draan)) < 0.02

    def test_sign_flip(self, baseline_target_state, baseline_elements,
                       spacecraft):
        params = params_for(spacecraft)
        plans = {}
        for sign in (+1.0, -1.0):
            chaser0 = make_chaser(baseline_elements,
                                  du=sign * math.radians(-2.0))
            delta = delta_between(baseline_target_state, chaser0)
            chaser_mean = osc_to_mean(cart_to_elements(chaser0))
            plans[sign] = plan_arglat_correction(delta, chaser_mean, params,
                                                 0.0, n_firings=1)
        flipped = [{"+S": "-S", "-S": "+S"}[s.direction]
                   for s in plans[+1.0].segments]
        assert [s.direction for s in plans[-1.0].segments] == flipped

    def test_coast_cap_partial_correction(self, baseline_target_state,
                                          baseline_elements, spacecraft):
        # A huge phase error with a capped coast: the block must emit a legal
        # partial correction instead of failing.
        chaser0 = make_chaser(baseline_elements, du=math.radians(-40.0))
        delta = delta_between(baseline_target_state, chaser0)
        chaser_mean = osc_to_mean(cart_to_elements(chaser0))
        params = params_for(spacecraft, u_max_coast_s=2.0 * 86400.0,
                            max_series_firings=2)
        schedule = plan_arglat_correction(delta, chaser_mean, params, 0.0)
        assert not schedule.is_empty
        gaps = [schedule.segments[k + 1].t_start - schedule.segments[k].t_end
                for k in range(len(schedule) - 1)]
        # Perigee anchoring may round the coast up by at most one orbit.
        assert max(gaps) <= 2.0 * 86400.0 + baseline_elements.period() + 1.0


class TestPredictEffect:
    def test_empty_schedule(self, spacecraft, target_mean):
        assert predict_effect((), target_mean, params_for(spacecraft)) \
            == RelativeElements()

    def test_prediction_tracks_truth_at_mission_scale(
            self, baseline_target_state, baseline_elements, spacecraft):
        # Each block's headline element lands within 10% of the truth change.
        cases = [
            ("i", plan_inclination_correction,
             RelativeElements(di=DESIRED.di - math.radians(0.015)), {}),
            ("e", plan_eccentricity_correction,
             RelativeElements(de=DESIRED.de - 6.0e-4), {}),
        ]
        for name, planner, delta, kw in cases:
            chaser_mean = osc_to_mean(cart_to_elements(baseline_target_state))
            schedule = planner(delta, chaser_mean,
                               params_for(spacecraft), 0.0, **kw)
            res = run_schedule(baseline_target_state, baseline_target_state,
                               schedule, spacecraft)
            after = measured_delta(res)
            if name == "i":
                assert after.di == pytest.approx(schedule.predicted.di,
                                                 rel=0.1)
            else:
                assert after.de == pytest.approx(schedule.predicted.de,
                                                 rel=0.1)


class TestScheduleLegality:
    def test_every_planner_output_passes_validation(
            self, baseline_target_state, baseline_elements, spacecraft):
        # Random in-regime errors: every emitted schedule obeys the firing
        # limit and charging gaps.
        rng = np.random.default_rng(51)
        period = baseline_elements.period()
        for _ in range(30):
            chaser0 = make_chaser(
                baseline_elements,
                da=float(rng.uniform(-5.0, 5.0)),
                de=float(rng.uniform(-5e-4, 5e-4)),
                di=float(rng.uniform(-0.01, 0.03)) * math.pi / 180.0,
                draan=float(rng.uniform(-0.3, 0.3)) * math.pi / 180.0,
                du=float(rng.uniform(-4.0, 4.0)) * math.pi / 180.0,
            )
            delta = delta_between(baseline_target_state, chaser0)
            chaser_mean = osc_to_mean(cart_to_elements(chaser0))
            params = params_for(spacecraft)
            plans = [
                plan_raan_correction(delta, chaser_mean, params, 0.0),
                plan_arglat_correction(delta, chaser_mean, params, 0.0),
                plan_inclination_correction(delta, chaser_mean, params, 0.0),
                plan_eccentricity_correction(delta, chaser_mean, params, 0.0,
                                             along_track_bias="none"),
            ]
            for schedule in plans:
                violations = validate_schedule(schedule.segments, spacecraft,
                                               period)
                assert violations == [], f"{schedule.block_label}: {violations}"
                assert all(s.duration <= 900.0 + 1e-9
                           for s in schedule.segments)

    def test_block_label_required(self):
        with pytest.raises(ValueError, match="block label"):
            FiringSchedule((), "warp")
