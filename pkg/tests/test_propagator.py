"""Nonlinear propagation: conservation, convergence, thrust, constraints."""
import math

import numpy as np
import pytest

from rposim import (
    CwContext,
    EARTH,
    EciState,
    ForceModelConfig,
    OrbitalElements,
    SpacecraftParams,
    ThrustSegment,
    acceleration,
    cart_to_elements,
    cw_propagate,
    eci_to_relative,
    elements_to_cart,
    osc_to_mean,
    propagate,
    secular_rates,
    validate_schedule,
)
from rposim.propagator import (
    DragConfig,
    PropagationError,
    ScheduleError,
    SrpConfig,
)

TWO_BODY = ForceModelConfig(j2_enabled=False)
J2_ONLY = ForceModelConfig(j2_enabled=True)
DEG_PER_DAY = 86400.0 * 180.0 / math.pi


def specific_energy(r, v):
    return 0.5 * np.sum(v * v, axis=1) - EARTH.mu / np.linalg.norm(r, axis=1)


class TestAcceleration:
    def test_two_body_reference_point(self):
        state = EciState(epoch=0.0, r=[7000.0, 0.0, 0.0], v=[0.0, 7.5, 0.0])
        acc = acceleration(state, TWO_BODY)
        assert acc[0] == pytest.approx(-8.1347e-3, abs=1e-7)
        assert acc[1] == acc[2] == 0.0

    def test_j2_pulls_inward_at_equator(self):
        state = EciState(epoch=0.0, r=[7000.0, 0.0, 0.0], v=[0.0, 7.5, 0.0])
        two_body = acceleration(state, TWO_BODY)
        with_j2 = acceleration(state, J2_ONLY)
        assert with_j2[0] < two_body[0] < 0.0

    def test_thrust_acceleration_magnitude(self):
        state = EciState(epoch=0.0, r=[7000.0, 0.0, 0.0], v=[0.0, 7.5, 0.0],
                         mass=4.0)
        seg = ThrustSegment(t_start=0.0, t_end=900.0, direction="+S",
                            thrust_n=6.0e-3)
        acc = acceleration(state, TWO_BODY, active_thrust=seg)
        thrust_part = acc - acceleration(state, TWO_BODY)
        assert np.linalg.norm(thrust_part) == pytest.approx(1.5e-6, rel=1e-12)
        assert thrust_part[1] == pytest.approx(1.5e-6, rel=1e-12)

    def test_drag_opposes_velocity(self):
        state = EciState(epoch=0.0, r=[6925.0, 0.0, 0.0], v=[0.0, 7.59, 0.0],
                         mass=4.0)
        cfg = ForceModelConfig(j2_enabled=False, drag=DragConfig(
            rho0_kgm3=1e-12, h0_km=500.0))
        drag_part = acceleration(state, cfg) - acceleration(state, TWO_BODY)
        assert drag_part[1] < 0.0
        assert abs(drag_part[0]) < 1e-15

    def test_srp_pushes_away_from_sun(self):
        # At epoch 0 the sun sits on +x; a spacecraft on +y is lit.
        state = EciState(epoch=0.0, r=[0.0, 7000.0, 0.0], v=[-7.5, 0.0, 0.0],
                         mass=4.0)
        cfg = ForceModelConfig(j2_enabled=False, srp=SrpConfig())
        srp_part = acceleration(state, cfg) - acceleration(state, TWO_BODY)
        assert srp_part[0] > 0.0

    def test_srp_shadowed_behind_earth(self):
        state = EciState(epoch=0.0, r=[-7000.0, 0.0, 0.0], v=[0.0, -7.5, 0.0],
                         mass=4.0)
        cfg = ForceModelConfig(j2_enabled=False, srp=SrpConfig(shadow=True))
        srp_part = acceleration(state, cfg) - acceleration(state, TWO_BODY)
        assert np.linalg.norm(srp_part) == 0.0


class TestConservation:
    def test_two_body_energy_and_momentum(self, baseline_target_state,
                                          baseline_elements, spacecraft):
        period = baseline_elements.period()
        res = propagate(baseline_target_state, baseline_target_state, [],
                        TWO_BODY, spacecraft, (0.0, period), 10.0)
        energy = specific_energy(res.r_target, res.v_target)
        assert abs(energy[-1] - energy[0]) / abs(energy[0]) < 1e-10
        h = np.linalg.norm(np.cross(res.r_target, res.v_target), axis=1)
        assert abs(h[-1] - h[0]) / h[0] < 1e-10

    def test_rk4_fourth_order_convergence(self, baseline_target_state,
                                          baseline_elements, spacecraft):
        period = baseline_elements.period()
        ref = propagate(baseline_target_state, baseline_target_state, [],
                        TWO_BODY, spacecraft, (0.0, period), 5.0)
        r10 = propagate(baseline_target_state, baseline_target_state, [],
                        TWO_BODY, spacecraft, (0.0, period), 10.0)
        r20 = propagate(baseline_target_state, baseline_target_state, [],
                        TWO_BODY, spacecraft, (0.0, period), 20.0)
        err10 = np.linalg.norm(r10.r_target[-1] - ref.r_target[-1])
        err20 = np.linalg.norm(r20.r_target[-1] - ref.r_target[-1])
        assert 10.0 < err20 / err10 < 25.0


class TestJ2Secular:
    def test_thirty_day_node_drift_and_flat_sma(self, baseline_target_state,
                                                spacecraft):
        res = propagate(baseline_target_state, baseline_target_state, [],
                        J2_ONLY, spacecraft, (0.0, 30.0 * 86400.0), 15.0,
                        record_every=40)
        mean0 = osc_to_mean(cart_to_elements(res.target_state(0)))
        mean1 = osc_to_mean(cart_to_elements(res.final_target))
        draan = mean1.raan - mean0.raan
        while draan > 0.0:
            draan -= 2.0 * math.pi
        measured = draan * 180.0 / math.pi / 30.0
        analytic = secular_rates(mean0).raan_rate * DEG_PER_DAY
        assert measured == pytest.approx(analytic, rel=0.01)

        # Mean semi-major axis has no secular J2 drift; compare orbit-averaged
        # values at both ends.
        period = mean0.period()
        first = [k for k in range(len(res.t)) if res.t[k] <= period]
        last = [k for k in range(len(res.t)) if res.t[k] >= res.t[-1] - period]
        a_first = np.mean([osc_to_mean(cart_to_elements(res.target_state(k))).a
                           for k in first])
        a_last = np.mean([osc_to_mean(cart_to_elements(res.target_state(k))).a
                          for k in last])
        assert abs(a_last - a_first) * 1000.0 < 10.0

    def test_osculating_a_e_i_have_no_secular_drift(self, baseline_target_state,
                                                    spacecraft):
        res = propagate(baseline_target_state, baseline_target_state, [],
                        J2_ONLY, spacecraft, (0.0, 10.0 * 86400.0), 15.0,
                        record_every=20)
        es, iis = [], []
        for k in range(len(res.t)):
            oe = cart_to_elements(res.target_state(k))
            es.append(oe.e)
            iis.append(oe.i)
        # Oscillation without trend: first and last thirds have similar means.
        third = len(es) // 3
        assert abs(np.mean(es[:third]) - np.mean(es[-third:])) < 5e-5
        assert abs(np.mean(iis[:third]) - np.mean(iis[-third:])) < math.radians(2e-3)


class TestThrustAccounting:
    def test_single_firing_arithmetic(self, baseline_target_state, spacecraft):
        chaser = EciState(epoch=0.0, r=baseline_target_state.r,
                          v=baseline_target_state.v, mass=4.0)
        seg = ThrustSegment(t_start=1000.0, t_end=1900.0, direction="+S",
                            thrust_n=6.0e-3)
        res = propagate(baseline_target_state, chaser, [seg], J2_ONLY,
                        spacecraft, (0.0, 3000.0), 30.0)
        assert res.delta_v_used == pytest.approx(1.35, abs=0.005)
        used_g = (res.chaser_mass[0] - res.chaser_mass[-1]) * 1000.0
        assert used_g == pytest.approx(5.506, abs=0.001)
        assert res.impulse_used_ns == pytest.approx(5.4, abs=1e-6)
        starts = [e for e in res.events if e[1].startswith("firing_start")]
        stops = [e for e in res.events if e[1] == "firing_stop"]
        assert len(starts) == len(stops) == 1

    def test_mass_constant_without_thrust(self, baseline_target_state,
                                          spacecraft):
        res = propagate(baseline_target_state, baseline_target_state, [],
                        J2_ONLY, spacecraft, (0.0, 10000.0), 30.0)
        assert np.all(res.chaser_mass == res.chaser_mass[0])
        assert res.delta_v_used == 0.0

    def test_rocket_equation_identity(self, baseline_target_state, spacecraft):
        chaser = EciState(epoch=0.0, r=baseline_target_state.r,
                          v=baseline_target_state.v, mass=4.0)
        period = 5735.94
        segs = [
            ThrustSegment(1000.0, 1900.0, "+S"),
            ThrustSegment(1900.0 + period, 1900.0 + period + 600.0, "-R"),
            ThrustSegment(1900.0 + 2.5 * period, 1900.0 + 2.5 * period + 900.0,
                          "+W"),
        ]
        res = propagate(baseline_target_state, chaser, segs, J2_ONLY,
                        spacecraft, (0.0, 2.0e4 + 2.0), 30.0)
        rocket = spacecraft.isp_s * spacecraft.g0 * math.log(
            res.chaser_mass[0] / res.chaser_mass[-1])
        assert res.delta_v_used == pytest.approx(rocket, rel=1e-3)

    def test_dv_monotone_and_mass_nonincreasing(self, baseline_target_state,
                                                spacecraft):
        chaser = EciState(epoch=0.0, r=baseline_target_state.r,
                          v=baseline_target_state.v, mass=4.0)
        seg = ThrustSegment(500.0, 1400.0, "-S")
        res = propagate(baseline_target_state, chaser, [seg], J2_ONLY,
                        spacecraft, (0.0, 3000.0), 30.0)
        assert np.all(np.diff(res.delta_v_mps) >= 0.0)
        assert np.all(np.diff(res.chaser_mass) <= 0.0)


class TestLinearizationCrossCheck:
    def test_matches_linear_model_at_one_km(self, baseline_target_state,
                                            baseline_elements, spacecraft):
        t = baseline_target_state
        ctx = CwContext.from_semimajor_axis(baseline_elements.a)
        rel0 = eci_to_relative(t, t)
        # 1 km along-track offset with matched circular motion.
        from rposim import RelativeState, relative_to_eci

        s0 = RelativeState(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)
        chaser = relative_to_eci(t, s0, mass=4.0)
        period = ctx.period
        res = propagate(t, chaser, [], TWO_BODY, spacecraft, (0.0, period),
                        10.0, record_every=10)
        worst = 0.0
        for k in range(len(res.t)):
            rel_true = eci_to_relative(res.target_state(k), res.chaser_state(k))
            rel_lin = cw_propagate(s0, ctx, float(res.t[k]))
            err = np.linalg.norm(rel_true.position - rel_lin.position)
            worst = max(worst, err)
        assert worst < 5e-3  # 5 m


class TestFailureModes:
    def test_decay_detected(self, spacecraft):
        # Apogee start of an orbit whose perigee is underground.
        oe = OrbitalElements(a=6500.0, e=0.05, i=0.5, raan=0.0, argp=0.0,
                             ta=math.pi)
        state = elements_to_cart(oe)
        with pytest.raises(PropagationError, match="decayed"):
            propagate(state, state, [], TWO_BODY, spacecraft,
                      (0.0, 2.0 * oe.period()), 30.0)

    def test_overlapping_segments_rejected(self, baseline_target_state,
                                           spacecraft):
        segs = [ThrustSegment(0.0, 900.0, "+S"),
                ThrustSegment(500.0, 1400.0, "+S")]
        with pytest.raises(ScheduleError) as err:
            propagate(baseline_target_state, baseline_target_state, segs,
                      J2_ONLY, spacecraft, (0.0, 3000.0), 30.0)
        assert any(v.kind == "overlap" for v in err.value.violations)

    def test_overlong_segment_rejected(self, baseline_target_state, spacecraft):
        seg = ThrustSegment(0.0, 901.0, "+S")
        with pytest.raises(ScheduleError) as err:
            propagate(baseline_target_state, baseline_target_state, [seg],
                      J2_ONLY, spacecraft, (0.0, 3000.0), 30.0)
        assert any(v.kind == "firing_limit" for v in err.value.violations)

    def test_budget_overrun_rejected(self, baseline_target_state, spacecraft):
        seg = ThrustSegment(0.0, 900.0, "+S")
        with pytest.raises(ScheduleError) as err:
            propagate(baseline_target_state, baseline_target_state, [seg],
                      J2_ONLY, spacecraft, (0.0, 3000.0), 30.0,
                      impulse_already_used_ns=266.0)
        assert any(v.kind == "impulse_budget" for v in err.value.violations)


class TestValidateSchedule:
    PERIOD = 5735.94

    def test_empty_schedule_ok(self, spacecraft):
        assert validate_schedule([], spacecraft, self.PERIOD) == []

    def test_firing_limit(self, spacecraft):
        violations = validate_schedule(
            [ThrustSegment(0.0, 901.0, "+S")], spacecraft, self.PERIOD)
        assert [v.kind for v in violations] == ["firing_limit"]

    def test_charging_gap(self, spacecraft):
        segs = [ThrustSegment(0.0, 900.0, "+S"),
                ThrustSegment(900.0 + 0.5 * self.PERIOD,
                              1800.0 + 0.5 * self.PERIOD, "+S")]
        violations = validate_schedule(segs, spacecraft, self.PERIOD)
        assert [v.kind for v in violations] == ["charging_gap"]

    def test_exactly_one_period_gap_ok(self, spacecraft):
        segs = [ThrustSegment(0.0, 900.0, "+S"),
                ThrustSegment(900.0 + self.PERIOD, 1800.0 + self.PERIOD, "-S")]
        assert validate_schedule(segs, spacecraft, self.PERIOD) == []

    def test_impulse_budget(self, spacecraft):
        segs = []
        t = 0.0
        for _ in range(51):  # 51 full firings exceed 270 N s
            segs.append(ThrustSegment(t, t + 900.0, "+S"))
            t += 900.0 + 1.2 * self.PERIOD
        violations = validate_schedule(segs, spacecraft, self.PERIOD)
        assert any(v.kind == "impulse_budget" for v in violations)

    def test_random_schedules_property(self, spacecraft):
        # Any segment over the firing limit or any gap under one period must
        # be flagged; compliant schedules must pass.
        rng = np.random.default_rng(41)
        for _ in range(200):
            n = rng.integers(1, 6)
            t = 0.0
            segs = []
            expect_bad = False
            for _ in range(n):
                dur = float(rng.uniform(100.0, 1100.0))
                gap = float(rng.uniform(0.3, 2.0) * self.PERIOD)
                segs.append(ThrustSegment(t, t + dur, "+S"))
                if dur > spacecraft.max_firing_s:
                    expect_bad = True
                if len(segs) > 1 and segs[-1].t_start - segs[-2].t_end \
                        < self.PERIOD - 1e-9:
                    expect_bad = True
                t += dur + gap
            violations = validate_schedule(segs, spacecraft, self.PERIOD)
            assert bool(violations) == expect_bad
