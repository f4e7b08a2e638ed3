"""Maneuver-block planners: desired mean-element corrections to firing schedules.

Four block types cover the four targeted relative mean elements:

* node correction (``raan_cor``): along-track firings change the chaser
  altitude, differential J2 nodal drift removes the node error during a
  coast, reversed firings restore the altitude.
* phase correction (``u_cor``): the same altitude-coast-restore pattern, but
  sized from the orbit-period difference and with a short, capped coast so
  the J2 node side effect stays small.
* inclination correction (``i_cor``): cross-track firings centered on the
  ascending node, one every other orbit.
* eccentricity correction (``e_cor``): along-track firing triplets anchored
  at the mean perigee or apogee with half-length compensators at the orbit
  quarter points, which change eccentricity with no net altitude change and
  a sign-selectable along-track offset.

Every firing is at most the single-firing power limit long and consecutive
firings are separated by at least one full orbit of battery charging. Sizing
uses first-order impulse relations plus linearized secular drift; the
closed-loop mission layer absorbs the model error by replanning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .meanelements import arglat_rate_slope, raan_rate_slope, secular_rates
from .orbital import (
    EARTH,
    TWO_PI,
    GravityConstants,
    OrbitalElements,
    RelativeElements,
    mean_from_true,
    wrap_to_2pi,
    wrap_to_pi,
)
from .propagator import SpacecraftParams, ThrustSegment

BLOCK_LABELS = ("raan_cor", "u_cor", "i_cor", "e_cor")

# Offsets of the two half-length compensators of an eccentricity operation,
# in orbits after the main firing: the quarter points of the next and the
# second-next orbit, so every charging gap stays longer than one period.
_ECC_COMP_OFFSETS = (1.25, 2.75)


class PlannerError(ValueError):
    """A correction cannot be scheduled within the configured limits."""


@dataclass(frozen=True)
class Deadbands:
    """Convergence deadbands on the relative mean elements."""

    a_km: float = 0.5
    raan_rad: float = math.radians(0.02)
    u_rad: float = math.radians(0.1)
    i_rad: float = math.radians(0.002)
    e: float = 1.0e-4


@dataclass(frozen=True)
class PlannerParams:
    """Everything the block planners need besides the element estimates.

    mass_kg is the current chaser mass; desired holds the targeted relative
    mean elements (da = draan = du = 0 for a centered ellipse).
    """

    spacecraft: SpacecraftParams
    mass_kg: float
    desired: RelativeElements
    deadbands: Deadbands = Deadbands()
    constants: GravityConstants = EARTH
    firing_spacing_orbits: int = 2
    raan_max_coast_s: float = 18.0 * 86400.0
    u_max_coast_s: float = 5.0 * 86400.0
    max_series_firings: int = 8
    max_ops_per_block: int = 3
    min_firing_s: float = 30.0
    lead_s: float = 60.0


@dataclass(frozen=True)
class EccOpParams:
    """Sizing of one eccentricity-block application.

    t_e1 is the total perigee-centered main-firing time of operation 1 and
    t_e2 the apogee-centered time of operation 2 (each split into arcs of at
    most one power-limited firing, with quadrature compensators of half the
    arc length). The sign fields flip an operation's firing directions when
    the correction runs opposite to the nominal eccentricity-raising pattern.
    """

    t_e1: float = 0.0
    t_e2: float = 0.0
    include_op1: bool = False
    include_op2: bool = False
    op1_sign: float = 1.0
    op2_sign: float = 1.0

    def __post_init__(self) -> None:
        if self.t_e1 < 0.0 or self.t_e2 < 0.0:
            raise ValueError("operation durations must be nonnegative")
        if abs(self.op1_sign) != 1.0 or abs(self.op2_sign) != 1.0:
            raise ValueError("operation signs must be +1 or -1")


def size_eccentricity_operations(
    delta: RelativeElements,
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    along_track_bias: str = "none",
) -> EccOpParams:
    """Choose the operation mix that removes the eccentricity error.

    Solves the two-by-two system (both operations raise eccentricity; they
    shift the along-track phase in opposite directions) for the main-firing
    seconds of each operation, clipped to the per-block capacity. With bias
    "none" the phase target is zero (operations balance); "positive" or
    "negative" aims the residual along-track error of the matching sign.
    """
    _require_mean(chaser_oe)
    if along_track_bias not in ("none", "positive", "negative"):
        raise ValueError("along_track_bias must be none, positive, or negative")
    orbit = _Orbit(chaser_oe, params)
    db = params.deadbands
    e_err = params.desired.de - delta.de
    u_err = wrap_to_pi(params.desired.du - delta.du)

    full = params.spacecraft.max_firing_s
    k_e = 2.0 * orbit.dv_kmps(1.0) / orbit.v_circ * _arc_factor(orbit, full)
    # One operation holds 2 dv/n of altitude for off1 orbits and dv/n for
    # another off2 - off1, so the phase shift per main-firing second is
    # 1.5 (off1 + off2) dv T / a.
    off1, off2 = _ECC_COMP_OFFSETS
    k_u = 1.5 * (off1 + off2) * orbit.dv_kmps(1.0) * orbit.t_anom / chaser_oe.a

    u_target = 0.0
    if along_track_bias == "positive":
        u_target = max(u_err, 0.0)
    elif along_track_bias == "negative":
        u_target = min(u_err, 0.0)

    cap_s = params.max_ops_per_block * full
    need_e = abs(e_err) > db.e
    need_u = along_track_bias != "none" and abs(u_err) > db.u_rad
    if not need_e and not need_u:
        return EccOpParams()
    if need_e:
        # Signed main-firing seconds: negative runs the sign-flipped pattern.
        x_op1 = 0.5 * (e_err / k_e - u_target / k_u)
        x_op2 = 0.5 * (e_err / k_e + u_target / k_u)
        x_op1 = max(-cap_s, min(cap_s, x_op1))
        x_op2 = max(-cap_s, min(cap_s, x_op2))
    else:
        # Walk only: equal and opposite operations cancel in eccentricity.
        x = 0.5 * min(abs(u_err) / k_u, cap_s)
        x_op1 = -math.copysign(x, u_err)
        x_op2 = math.copysign(x, u_err)

    return EccOpParams(
        t_e1=abs(x_op1) if abs(x_op1) >= params.min_firing_s else 0.0,
        t_e2=abs(x_op2) if abs(x_op2) >= params.min_firing_s else 0.0,
        include_op1=abs(x_op1) >= params.min_firing_s,
        include_op2=abs(x_op2) >= params.min_firing_s,
        op1_sign=math.copysign(1.0, x_op1) if x_op1 != 0.0 else 1.0,
        op2_sign=math.copysign(1.0, x_op2) if x_op2 != 0.0 else 1.0,
    )


@dataclass(frozen=True)
class FiringSchedule:
    """A validated, time-ordered plan produced by one maneuver block."""

    segments: tuple[ThrustSegment, ...]
    block_label: str
    predicted: RelativeElements = field(default_factory=RelativeElements)

    def __post_init__(self) -> None:
        if self.block_label not in BLOCK_LABELS:
            raise ValueError(f"block label must be one of {BLOCK_LABELS}")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def is_empty(self) -> bool:
        return not self.segments

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    @property
    def total_impulse_ns(self) -> float:
        return sum(s.impulse_ns for s in self.segments)


@dataclass(frozen=True)
class _Orbit:
    """Per-plan scalar context derived from the chaser mean elements."""

    oe: OrbitalElements
    params: PlannerParams

    @property
    def n(self) -> float:
        return self.oe.mean_motion(self.params.constants)

    @property
    def v_circ(self) -> float:
        return math.sqrt(self.params.constants.mu / self.oe.a)

    @property
    def u_dot(self) -> float:
        return secular_rates(self.oe, self.params.constants).arglat_rate

    @property
    def t_u(self) -> float:
        """Nodal period: time between repeats of the argument of latitude."""
        return TWO_PI / self.u_dot

    @property
    def anomaly_rate(self) -> float:
        return secular_rates(self.oe, self.params.constants).mean_anomaly_rate

    @property
    def t_anom(self) -> float:
        """Anomalistic period: time between perigee passes."""
        return TWO_PI / self.anomaly_rate

    def dv_kmps(self, duration_s: float, mass_kg: float | None = None) -> float:
        m = self.params.mass_kg if mass_kg is None else mass_kg
        return self.params.spacecraft.thrust_n * duration_s / m / 1000.0

    def da_per_firing(self, duration_s: float) -> float:
        """Semi-major axis change of one along-track firing, km."""
        return 2.0 * self.dv_kmps(duration_s) / self.n

    def node_crossing_after(self, t_min: float, u_target: float, t_ref: float) -> float:
        """First time >= t_min at which the chaser reaches u_target."""
        base = t_ref + wrap_to_2pi(u_target - self.oe.u) / self.u_dot
        k = max(0, math.ceil((t_min - base) / self.t_u - 1e-9))
        return base + k * self.t_u

    def perigee_crossing_after(self, t_min: float, ta_target: float, t_ref: float) -> float:
        """First time >= t_min at which the chaser reaches the true anomaly
        ta_target; the anchor tracks the precessing perigee."""
        m_now = mean_from_true(self.oe.ta, self.oe.e)
        m_target = mean_from_true(ta_target, self.oe.e)
        base = t_ref + wrap_to_2pi(m_target - m_now) / self.anomaly_rate
        k = max(0, math.ceil((t_min - base) / self.t_anom - 1e-9))
        return base + k * self.t_anom


def _sinc(x: float) -> float:
    return math.sin(x) / x if abs(x) > 1e-12 else 1.0


def _arc_factor(orbit: _Orbit, duration_s: float) -> float:
    """Efficiency loss of a finite arc against an impulsive firing."""
    return _sinc(0.5 * orbit.n * duration_s)


def _centered_segment(t_center: float, duration: float, direction: str,
                      thrust_n: float) -> ThrustSegment:
    return ThrustSegment(t_start=t_center - 0.5 * duration,
                         t_end=t_center + 0.5 * duration,
                         direction=direction, thrust_n=thrust_n)


def _series_durations(total_da: float, orbit: _Orbit, params: PlannerParams) -> list[float]:
    """Split a semi-major-axis change into full firings plus one trim."""
    full = params.spacecraft.max_firing_s
    per_full = orbit.da_per_firing(full)
    n_full = int(abs(total_da) / per_full + 1e-12)
    durations = [full] * n_full
    rem = abs(total_da) - n_full * per_full
    trim = rem / per_full * full
    if trim >= params.min_firing_s:
        durations.append(trim)
    return durations


def _along_track_series(
    durations: list[float], sign: float, orbit: _Orbit, params: PlannerParams,
    t_min: float, t_ref: float,
) -> list[ThrustSegment]:
    """Firings along +/-S, each centered on a mean-perigee pass.

    Anchoring at the perigee keeps the eccentricity side effect of an
    unbalanced series aligned with the eccentricity vector, so it shows up as
    a scalar change the eccentricity block can absorb instead of a rotation
    of the relative eccentricity vector.
    """
    direction = "+S" if sign > 0 else "-S"
    spacing = params.firing_spacing_orbits * orbit.t_anom
    segments = []
    t_next = t_min
    for dur in durations:
        center = orbit.perigee_crossing_after(t_next + 0.5 * dur, 0.0, t_ref)
        segments.append(_centered_segment(center, dur, direction,
                                          params.spacecraft.thrust_n))
        t_next = center + spacing - 0.5 * dur
    return segments


def _da_steps(segments: list[ThrustSegment], orbit: _Orbit,
              mass0: float) -> list[tuple[float, float]]:
    """(center time, cumulative da) after each segment, mass-depletion aware."""
    sc = orbit.params.spacecraft
    mass = mass0
    da = 0.0
    out = []
    for seg in sorted(segments, key=lambda s: s.t_start):
        new_mass = mass - sc.mass_flow_kgps * seg.duration
        dv = sc.isp_s * sc.g0 * math.log(mass / new_mass) / 1000.0
        mass = new_mass
        if seg.axis == 1:
            da += seg.sign * 2.0 * dv / orbit.n
        out.append((0.5 * (seg.t_start + seg.t_end), da))
    return out


def _drift_integral(steps: list[tuple[float, float]], t_end: float) -> float:
    """Integral of the piecewise-constant da(t) from the steps to t_end, km s."""
    total = 0.0
    for k, (t_k, da_k) in enumerate(steps):
        t_next = steps[k + 1][0] if k + 1 < len(steps) else t_end
        total += da_k * (t_next - t_k)
    return total


def _plan_altitude_coast_block(
    label: str,
    angle_error: float,
    slope: float,
    delta: RelativeElements,
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    plan_epoch: float,
    max_coast_s: float,
    cap_coast: bool,
    n_firings: int | None,
) -> FiringSchedule:
    """Shared machinery of the node and phase correction blocks.

    angle_error is the relative angle to remove, rad; slope its drift rate per
    km of relative semi-major axis, rad/s/km. With cap_coast the block corrects
    as much as fits in max_coast_s instead of failing.
    """
    orbit = _Orbit(chaser_oe, params)
    db = params.deadbands
    deadband = db.raan_rad if label == "raan_cor" else db.u_rad
    da_now = delta.da
    correct = abs(angle_error) > deadband
    restore = abs(da_now) > db.a_km
    if not correct and not restore:
        return FiringSchedule((), label)

    full = params.spacecraft.max_firing_s
    per_full = orbit.da_per_firing(full)
    t_first = plan_epoch + params.lead_s

    if not correct:
        # Altitude restore only: one reversed series back to da = 0.
        durations = _series_durations(-da_now, orbit, params)
        segs = _along_track_series(durations, -math.copysign(1.0, da_now),
                                   orbit, params, t_first, plan_epoch)
        return _finish(label, segs, chaser_oe, params, plan_epoch)

    hold_sign = -math.copysign(1.0, angle_error * slope)
    if n_firings is None:
        needed = abs(angle_error) / (abs(slope) * per_full * max_coast_s)
        n_series = max(1, math.ceil(needed - 1e-9))
        n_series = min(n_series, params.max_series_firings)
    else:
        n_series = max(1, n_firings)

    da_hold = hold_sign * n_series * per_full

    # Forward series: from the current relative altitude to the hold value.
    fwd_durations = _series_durations(da_hold - da_now, orbit, params)
    fwd_sign = math.copysign(1.0, da_hold - da_now)
    fwd = _along_track_series(fwd_durations, fwd_sign, orbit, params,
                              t_first, plan_epoch)
    if not fwd:
        return FiringSchedule((), label)

    # Solve the coast so the accumulated differential drift cancels the error,
    # counting the drift picked up during both firing ramps.
    fwd_steps = [(plan_epoch, da_now)] + [
        (t, da_now + d) for t, d in _da_steps(fwd, orbit, params.mass_kg)
    ]
    ramp_integral = _drift_integral(fwd_steps, fwd[-1].t_end)
    coast = -(angle_error + slope * ramp_integral) / (slope * da_hold)

    mass_after_fwd = params.mass_kg - params.spacecraft.mass_flow_kgps * sum(
        s.duration for s in fwd)
    rev_orbit = _Orbit(replace(chaser_oe, a=chaser_oe.a + (da_hold - da_now)),
                       replace(params, mass_kg=mass_after_fwd))
    rev_durations = _series_durations(-da_hold, rev_orbit, params)

    rev: list[ThrustSegment] = []
    min_coast = orbit.t_u  # battery charging floors the inter-series gap
    for _ in range(3):
        coast = min(max(coast, min_coast), max_coast_s)
        rev = _along_track_series(rev_durations, -hold_sign, rev_orbit, params,
                                  fwd[-1].t_end + coast, plan_epoch)
        if not rev:
            break
        rev_steps = [(fwd[-1].t_end, da_hold)] + [
            (t, da_hold + d) for t, d in _da_steps(rev, rev_orbit, mass_after_fwd)
        ]
        total = ramp_integral + _drift_integral(rev_steps, rev[-1].t_end)
        residual = angle_error + slope * total
        correction = -residual / (slope * da_hold)
        if abs(correction) < 1.0:
            break
        coast += correction
    if coast > max_coast_s - 1e-6 and not cap_coast:
        raise PlannerError(
            f"{label}: required coast exceeds the {max_coast_s / 86400.0:.1f}-day "
            "limit; allow a larger altitude offset (more firings per series)"
        )

    return _finish(label, fwd + rev, chaser_oe, params, plan_epoch)


def _finish(label: str, segments: list[ThrustSegment], chaser_oe: OrbitalElements,
            params: PlannerParams, plan_epoch: float) -> FiringSchedule:
    segs = tuple(sorted(segments, key=lambda s: s.t_start))
    schedule = FiringSchedule(segs, label)
    predicted = predict_effect(schedule, chaser_oe, params, plan_epoch)
    return FiringSchedule(segs, label, predicted)


def plan_raan_correction(
    delta: RelativeElements,
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    plan_epoch: float = 0.0,
    n_firings: int | None = None,
) -> FiringSchedule:
    """Plan a node correction: altitude offset, drift coast, altitude restore.

    The sign of the first series is chosen so the induced differential nodal
    drift opposes the current node error; the reversed series returns the
    relative semi-major axis to zero. n_firings fixes the series size,
    otherwise the smallest series whose coast fits the configured limit is
    used. Raises PlannerError when no series within the limits can remove the
    error in time.
    """
    _require_mean(chaser_oe)
    slope = raan_rate_slope(chaser_oe, params.constants)
    return _plan_altitude_coast_block(
        "raan_cor", wrap_to_pi(delta.draan - params.desired.draan), slope,
        delta, chaser_oe, params, plan_epoch,
        params.raan_max_coast_s, cap_coast=False, n_firings=n_firings,
    )


def plan_arglat_correction(
    delta: RelativeElements,
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    plan_epoch: float = 0.0,
    n_firings: int | None = None,
) -> FiringSchedule:
    """Plan a phase correction that closes the along-track angle.

    Same altitude-coast-restore pattern as the node block, but sized from the
    orbit-period difference. The coast is capped (default 5 days) to bound the
    J2 node side effect; if the cap bites, the block removes only part of
    the error and the caller is expected to replan.
    """
    _require_mean(chaser_oe)
    slope = arglat_rate_slope(chaser_oe, params.constants)
    return _plan_altitude_coast_block(
        "u_cor", wrap_to_pi(delta.du - params.desired.du), slope,
        delta, chaser_oe, params, plan_epoch,
        params.u_max_coast_s, cap_coast=True, n_firings=n_firings,
    )


def plan_inclination_correction(
    delta: RelativeElements,
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    plan_epoch: float = 0.0,
) -> FiringSchedule:
    """Plan cross-track firings straddling the ascending node.

    Positive corrections fire +W centered on the node, negative -W; one
    firing every other orbit, each at most one power-limited arc, the last
    one shortened when the residual warrants it.
    """
    _require_mean(chaser_oe)
    orbit = _Orbit(chaser_oe, params)
    di_err = wrap_to_pi(params.desired.di - delta.di)
    if abs(di_err) <= params.deadbands.i_rad:
        return FiringSchedule((), "i_cor")

    full = params.spacecraft.max_firing_s
    per_full = orbit.dv_kmps(full) / orbit.v_circ * _arc_factor(orbit, full)
    n_full = int(abs(di_err) / per_full + 1e-12)
    durations = [full] * n_full
    rem = abs(di_err) - n_full * per_full
    if rem > params.deadbands.i_rad:
        # Trim firing: invert dv(t) * sinc(n t / 2) / v = rem by fixed point.
        t_trim = rem * orbit.v_circ / orbit.dv_kmps(1.0)
        for _ in range(4):
            t_trim = rem * orbit.v_circ / orbit.dv_kmps(1.0) / _arc_factor(orbit, t_trim)
        durations.append(max(min(t_trim, full), params.min_firing_s))
    if not durations:
        return FiringSchedule((), "i_cor")

    direction = "+W" if di_err > 0 else "-W"
    spacing = params.firing_spacing_orbits * orbit.t_u
    segments = []
    t_next = plan_epoch + params.lead_s
    for dur in durations:
        center = orbit.node_crossing_after(t_next + 0.5 * dur, 0.0, plan_epoch)
        segments.append(_centered_segment(center, dur, direction,
                                          params.spacecraft.thrust_n))
        t_next = center + spacing - 0.5 * dur
    return _finish("i_cor", segments, chaser_oe, params, plan_epoch)


def plan_eccentricity_correction(
    delta: RelativeElements,
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    plan_epoch: float = 0.0,
    along_track_bias: str = "none",
) -> FiringSchedule:
    """Plan eccentricity operations with a selectable along-track offset.

    Operation 1 is a main along-track firing at the mean perigee with two
    half-length opposite firings at the quarter points; it changes the
    eccentricity and shifts the chaser backward along-track. Operation 2 is
    the mirrored apogee pattern with the opposite shift. along_track_bias
    picks how the two are mixed: "none" balances them so the net shift is
    near zero, "positive"/"negative" skews the mix to walk the along-track
    offset toward zero while the eccentricity error is being removed.
    """
    _require_mean(chaser_oe)
    orbit = _Orbit(chaser_oe, params)
    sizing = size_eccentricity_operations(delta, chaser_oe, params,
                                          along_track_bias)
    if not sizing.include_op1 and not sizing.include_op2:
        return FiringSchedule((), "e_cor")

    full = params.spacecraft.max_firing_s
    ops: list[tuple[str, float]] = []  # (type, signed main seconds)
    for kind, total, sign, include in (
            ("op2", sizing.t_e2, sizing.op2_sign, sizing.include_op2),
            ("op1", sizing.t_e1, sizing.op1_sign, sizing.include_op1)):
        remaining = total if include else 0.0
        while remaining >= params.min_firing_s:
            t_main = min(full, remaining)
            ops.append((kind, sign * t_main))
            remaining -= t_main
    if not ops:
        return FiringSchedule((), "e_cor")
    # Alternate operation types where possible to bound the transient offset.
    ops1 = [o for o in ops if o[0] == "op1"]
    ops2 = [o for o in ops if o[0] == "op2"]
    ordered = []
    while ops1 or ops2:
        if ops2:
            ordered.append(ops2.pop(0))
        if ops1:
            ordered.append(ops1.pop(0))

    thrust = params.spacecraft.thrust_n
    segments: list[ThrustSegment] = []
    t_min = plan_epoch + params.lead_s
    for kind, signed in ordered:
        t_main = abs(signed)
        main_ta = 0.0 if kind == "op1" else math.pi
        main_sign = math.copysign(1.0, signed) * (1.0 if kind == "op1" else -1.0)
        center = orbit.perigee_crossing_after(t_min + 0.5 * t_main, main_ta, plan_epoch)
        segments.append(_centered_segment(
            center, t_main, "+S" if main_sign > 0 else "-S", thrust))
        for off in _ECC_COMP_OFFSETS:
            comp_center = center + off * orbit.t_anom
            segments.append(_centered_segment(
                comp_center, 0.5 * t_main, "+S" if main_sign < 0 else "-S", thrust))
        t_min = segments[-1].t_end + orbit.t_anom

    return _finish("e_cor", segments, chaser_oe, params, plan_epoch)


def predict_effect(
    schedule: FiringSchedule | tuple[ThrustSegment, ...],
    chaser_oe: OrbitalElements,
    params: PlannerParams,
    plan_epoch: float = 0.0,
) -> RelativeElements:
    """First-order prediction of a schedule's effect on the chaser elements.

    Each segment is treated as an impulse at its center with the finite-arc
    efficiency factor; between segments the accumulated semi-major-axis
    change drifts the node and phase angles at the linearized J2 secular
    slopes. The truth propagator remains the authority; this is the planning
    model.
    """
    raw = schedule.segments if isinstance(schedule, FiringSchedule) else tuple(schedule)
    if not raw:
        return RelativeElements()
    segments = sorted(raw, key=lambda s: s.t_start)
    _require_mean(chaser_oe)
    orbit = _Orbit(chaser_oe, params)
    sc = params.spacecraft
    constants = params.constants

    slope_raan = raan_rate_slope(chaser_oe, constants)
    slope_u = arglat_rate_slope(chaser_oe, constants)
    sin_i = math.sin(chaser_oe.i)
    cos_i = math.cos(chaser_oe.i)
    v = orbit.v_circ

    e_x = chaser_oe.e * math.cos(chaser_oe.argp)
    e_y = chaser_oe.e * math.sin(chaser_oe.argp)
    de_x = de_y = 0.0
    da = di = draan = du = 0.0
    drift_raan = drift_u = 0.0

    mass = params.mass_kg
    t_prev = plan_epoch
    for seg in segments:
        t_c = 0.5 * (seg.t_start + seg.t_end)
        drift_raan += da * (t_c - t_prev)
        drift_u += da * (t_c - t_prev)
        t_prev = t_c

        new_mass = mass - sc.mass_flow_kgps * seg.duration
        dv = seg.sign * sc.isp_s * sc.g0 * math.log(mass / new_mass) / 1000.0
        mass = new_mass
        arc = _arc_factor(orbit, seg.duration)
        u_c = wrap_to_2pi(chaser_oe.u + orbit.u_dot * (t_c - plan_epoch))
        cu, su = math.cos(u_c), math.sin(u_c)

        if seg.axis == 1:  # along-track
            da += 2.0 * dv / orbit.n
            de_x += 2.0 * dv / v * cu * arc
            de_y += 2.0 * dv / v * su * arc
        elif seg.axis == 0:  # radial
            de_x += dv / v * su * arc
            de_y += -dv / v * cu * arc
            du += -2.0 * dv / v
        else:  # cross-track
            di += dv / v * cu * arc
            if sin_i > 1e-12:
                draan += dv / v * su / sin_i * arc
                du += -dv / v * su * cos_i / sin_i * arc

    t_end = segments[-1].t_end
    drift_raan += da * (t_end - t_prev)
    drift_u += da * (t_end - t_prev)

    de_scalar = math.hypot(e_x + de_x, e_y + de_y) - chaser_oe.e
    return RelativeElements(
        da=da,
        de=de_scalar,
        di=di,
        draan=draan + slope_raan * drift_raan,
        du=du + slope_u * drift_u,
    )


def _require_mean(oe: OrbitalElements) -> None:
    if oe.flavor != "mean":
        raise ValueError("block planners work on mean elements")
