"""Four-phase mission controller with latency-limited navigation.

The controller flies the chaser through the phase sequence

    commissioning -> node correction -> approach -> ellipse setup
    -> circumnavigation -> done

acting only on mean-element estimates that arrive at the ground-loop update
cadence (175 minutes on average). At each decision point it reads the most
recent update, either declares the current phase converged or plans one
maneuver block, executes the block to completion against the nonlinear truth
propagator, then waits for the first update after the block before deciding
again. The delta-v budget and per-phase duration caps are enforced; no
firings happen during circumnavigation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .blocks import (
    Deadbands,
    FiringSchedule,
    PlannerParams,
    plan_arglat_correction,
    plan_eccentricity_correction,
    plan_inclination_correction,
    plan_raan_correction,
)
from .meanelements import osc_to_mean
from .orbital import (
    EARTH,
    EciState,
    GravityConstants,
    OrbitalElements,
    RelativeElements,
    cart_to_elements,
    eci_to_relative,
    elements_to_cart,
    rsw_frame,
    wrap_to_pi,
)
from .propagator import (
    ForceModelConfig,
    PropagationError,
    PropagationResult,
    SpacecraftParams,
    ThrustSegment,
    propagate,
    validate_schedule,
)
from .relmotion import CwContext, EllipseGeometry, measure_ellipse


class MissionPhase(Enum):
    """Phases in execution order; the sequence never moves backward."""

    COMMISSIONING = "commissioning"
    RAAN = "raan"
    APPROACH = "approach"
    ELLIPSE_SETUP = "ellipse_setup"
    CIRCUMNAVIGATION = "circumnavigation"
    DONE = "done"


_PHASE_ORDER = list(MissionPhase)


@dataclass(frozen=True)
class DesiredRelativeElements:
    """Targeted relative mean elements for the standing ellipse.

    The altitude, node, and phase targets are zero by construction; the
    eccentricity and inclination offsets must stay positive so the ellipse
    keeps radial and out-of-plane separation.
    """

    de: float = 0.001
    di: float = math.radians(0.02)

    def __post_init__(self) -> None:
        if self.de <= 0.0 or self.di <= 0.0:
            raise ValueError("desired relative e and i offsets must be positive")

    def to_relative(self) -> RelativeElements:
        return RelativeElements(da=0.0, de=self.de, di=self.di, draan=0.0, du=0.0)


@dataclass(frozen=True)
class LatencyModel:
    """Ground-loop update cadence: fixed period with optional seeded jitter."""

    period_s: float = 175.0 * 60.0
    jitter_s: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.period_s < 0.0 or self.jitter_s < 0.0:
            raise ValueError("latency parameters must be nonnegative")
        if self.jitter_s >= 0.5 * self.period_s and self.period_s > 0.0:
            raise ValueError("jitter must stay below half the update period")

    def epochs(self, horizon_s: float) -> np.ndarray:
        """Deterministic update arrival times covering [0, horizon_s]."""
        if self.period_s == 0.0:
            raise ValueError("zero-period model has no discrete epochs")
        count = int(horizon_s / self.period_s) + 2
        base = self.period_s * np.arange(1, count + 1)
        if self.jitter_s > 0.0:
            rng = np.random.default_rng(self.seed)
            base = base + rng.uniform(-self.jitter_s, self.jitter_s, size=count)
        return base


@dataclass(frozen=True)
class NavUpdate:
    """One processed orbit-information update as seen by the chaser.

    The mean element sets are valid at ``epoch``; the consumer holds them
    constant until ``next_due``.
    """

    epoch: float
    target_mean: OrbitalElements
    chaser_mean: OrbitalElements
    next_due: float

    @property
    def delta(self) -> RelativeElements:
        return RelativeElements.between(self.chaser_mean, self.target_mean)


def navigation(truth: PropagationResult, t: float, model: LatencyModel,
               constants: GravityConstants = EARTH) -> NavUpdate:
    """Latest latency-delayed update available at time t.

    With a zero-period model the update is the instantaneous mean state at t.
    The update is built from the truth sample nearest the update epoch.
    """
    if model.period_s == 0.0:
        epoch, next_due = t, t
    else:
        epochs = model.epochs(t + model.period_s)
        past = epochs[epochs <= t + 1e-6]
        if len(past) == 0:
            raise ValueError(f"no update has arrived by t={t:.0f} s")
        epoch = float(past[-1])
        future = epochs[epochs > t + 1e-6]
        next_due = float(future[0]) if len(future) else epoch + model.period_s
    k = truth.index_nearest(epoch)
    return NavUpdate(
        epoch=epoch,
        target_mean=osc_to_mean(cart_to_elements(truth.target_state(k), constants), constants),
        chaser_mean=osc_to_mean(cart_to_elements(truth.chaser_state(k), constants), constants),
        next_due=next_due,
    )


@dataclass(frozen=True)
class MissionState:
    """Controller-visible snapshot between decisions."""

    phase: MissionPhase
    delta_estimate: Optional[RelativeElements]
    nav_epoch: Optional[float]
    dv_used_mps: float
    dv_capacity_mps: float


@dataclass(frozen=True)
class MissionSettings:
    """Knobs of the phase logic itself (planner knobs live in PlannerParams)."""

    approach_threshold_km: float = 50.0
    phase_max_days: dict[str, float] = field(default_factory=lambda: {
        "raan": 30.0, "approach": 12.0, "ellipse_setup": 12.0})


def alongtrack_separation_km(delta: RelativeElements, target_mean: OrbitalElements) -> float:
    """Mean-element along-track distance a |du + draan cos i|, km."""
    return target_mean.a * abs(wrap_to_pi(delta.du + delta.draan * math.cos(target_mean.i)))


def step_phase(
    state: MissionState,
    nav: NavUpdate,
    params: PlannerParams,
    settings: MissionSettings,
    plan_epoch: float,
) -> tuple[MissionState, Optional[FiringSchedule]]:
    """One decision of the phase state machine.

    Returns the successor state and, when the current phase still has work,
    the next maneuver block to execute. A phase transition is taken when its
    convergence test on the latest estimate passes; the phase only ever
    advances.
    """
    delta = nav.delta
    db = params.deadbands
    chaser = nav.chaser_mean
    new_state = replace(state, delta_estimate=delta, nav_epoch=nav.epoch)
    phase = state.phase

    if phase == MissionPhase.RAAN:
        if abs(delta.draan) <= db.raan_rad and abs(delta.da) <= db.a_km:
            return replace(new_state, phase=MissionPhase.APPROACH), None
        return new_state, plan_raan_correction(delta, chaser, params, plan_epoch)

    if phase == MissionPhase.APPROACH:
        separation = alongtrack_separation_km(delta, nav.target_mean)
        if separation < settings.approach_threshold_km and abs(delta.da) <= db.a_km:
            return replace(new_state, phase=MissionPhase.ELLIPSE_SETUP), None
        return new_state, plan_arglat_correction(delta, chaser, params, plan_epoch)

    if phase == MissionPhase.ELLIPSE_SETUP:
        di_err = params.desired.di - delta.di
        if abs(di_err) > db.i_rad:
            return new_state, plan_inclination_correction(delta, chaser, params, plan_epoch)
        if abs(delta.da) > db.a_km:
            # Altitude restore only: plan with the phase error masked out.
            masked = replace(delta, du=params.desired.du)
            return new_state, plan_arglat_correction(masked, chaser, params, plan_epoch)
        need_e = abs(params.desired.de - delta.de) > db.e
        need_u = abs(delta.du - params.desired.du) > db.u_rad
        if need_e or need_u:
            du_err = wrap_to_pi(delta.du - params.desired.du)
            if abs(du_err) <= db.u_rad:
                bias = "none"
            else:
                bias = "positive" if du_err < 0.0 else "negative"
            return new_state, plan_eccentricity_correction(
                delta, chaser, params, plan_epoch, along_track_bias=bias)
        return replace(new_state, phase=MissionPhase.CIRCUMNAVIGATION), None

    raise ValueError(f"step_phase has no work in phase {phase.value}")


@dataclass(frozen=True)
class MissionScenario:
    """Complete, self-contained description of one mission run."""

    target_elements: OrbitalElements
    spacecraft: SpacecraftParams = SpacecraftParams()
    force_model: ForceModelConfig = ForceModelConfig()
    desired: DesiredRelativeElements = DesiredRelativeElements()
    deadbands: Deadbands = Deadbands()
    settings: MissionSettings = MissionSettings()
    separation_dv_mps: float = 2.0
    separation_direction_rsw: tuple[float, float, float] = (0.0, 1.0, 0.0)
    separation_delta: Optional[RelativeElements] = None
    commissioning_days: float = 30.0
    circumnavigation_days: float = 30.0
    nav: LatencyModel = LatencyModel()
    step_s: float = 30.0
    output_every_s: float = 300.0
    firing_spacing_orbits: int = 2
    raan_max_coast_days: float = 12.0
    u_max_coast_days: float = 5.0
    max_series_firings: int = 8
    max_ops_per_block: int = 3
    constants: GravityConstants = EARTH

    def planner_params(self, mass_kg: float) -> PlannerParams:
        return PlannerParams(
            spacecraft=self.spacecraft,
            mass_kg=mass_kg,
            desired=self.desired.to_relative(),
            deadbands=self.deadbands,
            constants=self.constants,
            firing_spacing_orbits=self.firing_spacing_orbits,
            raan_max_coast_s=self.raan_max_coast_days * 86400.0,
            u_max_coast_s=self.u_max_coast_days * 86400.0,
            max_series_firings=self.max_series_firings,
            max_ops_per_block=self.max_ops_per_block,
        )


@dataclass(frozen=True)
class PhaseRecord:
    name: str
    t_start: float
    t_end: float
    delta_v_mps: float
    n_firings: int


@dataclass(frozen=True)
class ScheduleRecord:
    phase: str
    block_label: str
    segments: tuple[ThrustSegment, ...]
    predicted: RelativeElements
    planned_at: float


@dataclass(frozen=True)
class DecisionRecord:
    t: float
    nav_epoch: float
    phase: str
    action: str
    delta_estimate: RelativeElements


@dataclass
class MissionReport:
    """Everything a mission run produced: history, ledger, and final state."""

    scenario: MissionScenario
    t: np.ndarray
    r_target: np.ndarray
    v_target: np.ndarray
    r_chaser: np.ndarray
    v_chaser: np.ndarray
    chaser_mass: np.ndarray
    delta_v_mps: np.ndarray
    phases: list[PhaseRecord]
    schedules: list[ScheduleRecord]
    decisions: list[DecisionRecord]
    events: list[tuple[float, str]]
    separation_dv_rsw_mps: tuple[float, float, float]
    final_delta: Optional[RelativeElements] = None
    final_geometry: Optional[EllipseGeometry] = None
    abort: Optional[str] = None

    @property
    def total_delta_v_mps(self) -> float:
        return float(self.delta_v_mps[-1])

    @property
    def propellant_used_kg(self) -> float:
        return float(self.chaser_mass[0] - self.chaser_mass[-1])

    def target_state(self, k: int) -> EciState:
        return EciState(epoch=float(self.t[k]), r=self.r_target[k],
                        v=self.v_target[k], mass=self.scenario.spacecraft.wet_mass_kg)

    def chaser_state(self, k: int) -> EciState:
        return EciState(epoch=float(self.t[k]), r=self.r_chaser[k],
                        v=self.v_chaser[k], mass=float(self.chaser_mass[k]))

    def relative_state(self, k: int):
        return eci_to_relative(self.target_state(k), self.chaser_state(k))

    def mean_delta_at(self, k: int) -> RelativeElements:
        constants = self.scenario.constants
        cm = osc_to_mean(cart_to_elements(self.chaser_state(k), constants), constants)
        tm = osc_to_mean(cart_to_elements(self.target_state(k), constants), constants)
        return RelativeElements.between(cm, tm)


def delta_v_ledger(report: MissionReport) -> dict[str, float]:
    """Delta-v spent per phase, m/s; values sum to the run total."""
    ledger: dict[str, float] = {}
    for rec in report.phases:
        ledger[rec.name] = ledger.get(rec.name, 0.0) + rec.delta_v_mps
    return ledger


def apply_separation(target: EciState, dv_mps: float,
                     direction_rsw: tuple[float, float, float],
                     chaser_mass_kg: float) -> EciState:
    """Chaser state right after the deployer push along a target-frame axis."""
    d = np.asarray(direction_rsw, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm <= 0.0:
        raise ValueError("separation direction must be a nonzero vector")
    frame = rsw_frame(target)
    dv_eci = frame.matrix.T @ (d / norm * dv_mps / 1000.0)
    return EciState(epoch=target.epoch, r=target.r.copy(), v=target.v + dv_eci,
                    mass=chaser_mass_kg)


class _Sim:
    """Chunked truth propagation with a thinned, stitched history."""

    def __init__(self, scenario: MissionScenario, target0: EciState, chaser0: EciState):
        self.scenario = scenario
        self.target = target0
        self.chaser = chaser0
        self.t = 0.0
        self.impulse_used_ns = 0.0
        self.record_every = max(1, round(scenario.output_every_s / scenario.step_s))
        self.ts: list[np.ndarray] = [np.array([0.0])]
        self.rt: list[np.ndarray] = [target0.r.reshape(1, 3)]
        self.vt: list[np.ndarray] = [target0.v.reshape(1, 3)]
        self.rc: list[np.ndarray] = [chaser0.r.reshape(1, 3)]
        self.vc: list[np.ndarray] = [chaser0.v.reshape(1, 3)]
        self.mass: list[np.ndarray] = [np.array([chaser0.mass])]
        self.dv: list[np.ndarray] = [np.array([0.0])]
        self.events: list[tuple[float, str]] = []

    @property
    def dv_used_mps(self) -> float:
        return float(self.dv[-1][-1])

    def run_to(self, t_to: float, schedule: tuple[ThrustSegment, ...] = ()) -> None:
        if t_to <= self.t + 1e-9:
            return
        sc = self.scenario
        result = propagate(
            self.target, self.chaser, list(schedule), sc.force_model,
            sc.spacecraft, (self.t, t_to), sc.step_s, sc.constants,
            impulse_already_used_ns=self.impulse_used_ns,
            record_every=self.record_every,
        )
        dv_offset = self.dv_used_mps
        self.ts.append(result.t[1:])
        self.rt.append(result.r_target[1:])
        self.vt.append(result.v_target[1:])
        self.rc.append(result.r_chaser[1:])
        self.vc.append(result.v_chaser[1:])
        self.mass.append(result.chaser_mass[1:])
        self.dv.append(result.delta_v_mps[1:] + dv_offset)
        self.events.extend(result.events)
        self.impulse_used_ns += sum(s.impulse_ns for s in schedule)
        self.target = result.final_target
        self.chaser = result.final_chaser
        self.t = t_to

    def mean_elements_now(self) -> tuple[OrbitalElements, OrbitalElements]:
        constants = self.scenario.constants
        tm = osc_to_mean(cart_to_elements(self.target, constants), constants)
        cm = osc_to_mean(cart_to_elements(self.chaser, constants), constants)
        return tm, cm


def run_mission(scenario: MissionScenario) -> MissionReport:
    """Run the full scenario: separation, commissioning, the four-phase
    rendezvous, and circumnavigation.

    Aborts (budget exhausted, phase overrun, planner failure) terminate the
    control loop and are reported in ``report.abort``; the history up to the
    abort is preserved.
    """
    constants = scenario.constants
    sc = scenario.spacecraft
    target0 = elements_to_cart(scenario.target_elements, constants, epoch=0.0,
                               mass=sc.wet_mass_kg)

    if scenario.separation_delta is not None:
        d = scenario.separation_delta
        oe = scenario.target_elements
        chaser_oe = OrbitalElements(
            a=oe.a + d.da, e=oe.e + d.de, i=oe.i + d.di,
            raan=oe.raan + d.draan, argp=oe.argp, ta=oe.ta + d.du,
            flavor=oe.flavor)
        chaser0 = elements_to_cart(chaser_oe, constants, epoch=0.0, mass=sc.wet_mass_kg)
        dv_rsw = (0.0, 0.0, 0.0)
    else:
        chaser0 = apply_separation(target0, scenario.separation_dv_mps,
                                   scenario.separation_direction_rsw, sc.wet_mass_kg)
        d_unit = np.asarray(scenario.separation_direction_rsw, dtype=float)
        d_unit = d_unit / np.linalg.norm(d_unit)
        dv_rsw = tuple(float(x) for x in d_unit * scenario.separation_dv_mps)

    sim = _Sim(scenario, target0, chaser0)
    phases: list[PhaseRecord] = []
    schedules: list[ScheduleRecord] = []
    decisions: list[DecisionRecord] = []
    abort: Optional[str] = None

    horizon = (scenario.commissioning_days + scenario.circumnavigation_days
               + sum(scenario.settings.phase_max_days.values()) + 5.0) * 86400.0
    if scenario.nav.period_s > 0.0:
        nav_epochs = scenario.nav.epochs(horizon)
    else:
        nav_epochs = None

    def next_update_after(t: float) -> float:
        if nav_epochs is None:
            return t
        k = int(np.searchsorted(nav_epochs, t - 1e-6))
        return float(nav_epochs[k])

    def make_update(t: float) -> NavUpdate:
        tm, cm = sim.mean_elements_now()
        next_due = next_update_after(t + 1.0) if nav_epochs is not None else t
        return NavUpdate(epoch=t, target_mean=tm, chaser_mean=cm, next_due=next_due)

    sim.events.append((0.0, f"separation dv {scenario.separation_dv_mps:.3f} m/s"))

    def advance(t_to: float, segments: tuple[ThrustSegment, ...] = ()) -> bool:
        """Propagate truth; a propagation failure becomes a mission abort."""
        nonlocal abort
        try:
            sim.run_to(t_to, segments)
            return True
        except PropagationError as exc:
            abort = f"propagation failed at t={sim.t:.0f} s: {exc}"
            return False

    # Commissioning: pure coast.
    t_comm = scenario.commissioning_days * 86400.0
    if not advance(t_comm):
        t_comm = sim.t
    phases.append(PhaseRecord("commissioning", 0.0, t_comm, sim.dv_used_mps, 0))
    sim.events.append((t_comm, "phase raan"))

    state = MissionState(
        phase=MissionPhase.RAAN,
        delta_estimate=None,
        nav_epoch=None,
        dv_used_mps=sim.dv_used_mps,
        dv_capacity_mps=sc.dv_capacity_mps,
    )
    phase_start = t_comm
    phase_dv0 = sim.dv_used_mps
    phase_firings = 0
    target_period = scenario.target_elements.period(constants)

    def close_phase(name: str, t_end: float) -> None:
        phases.append(PhaseRecord(name, phase_start, t_end,
                                  sim.dv_used_mps - phase_dv0, phase_firings))

    while abort is None and state.phase in (MissionPhase.RAAN,
                                            MissionPhase.APPROACH,
                                            MissionPhase.ELLIPSE_SETUP):
        phase_cap_days = scenario.settings.phase_max_days.get(state.phase.value, 1e9)
        if sim.t - phase_start > phase_cap_days * 86400.0:
            abort = (f"phase {state.phase.value} exceeded its "
                     f"{phase_cap_days:.0f}-day limit")
            break

        # Decisions wait for the first update after the previous activity.
        t_decide = next_update_after(sim.t) if nav_epochs is not None else sim.t
        if not advance(t_decide):
            break
        update = make_update(sim.t)

        params = scenario.planner_params(sim.chaser.mass)
        try:
            new_state, schedule = step_phase(state, update, params,
                                             scenario.settings, sim.t)
        except ValueError as exc:  # planner infeasibility aborts with context
            abort = f"planning failed in phase {state.phase.value}: {exc}"
            break

        if new_state.phase != state.phase:
            close_phase(state.phase.value, sim.t)
            decisions.append(DecisionRecord(sim.t, update.epoch, state.phase.value,
                                            f"transition to {new_state.phase.value}",
                                            update.delta))
            sim.events.append((sim.t, f"phase {new_state.phase.value}"))
            state = new_state
            phase_start = sim.t
            phase_dv0 = sim.dv_used_mps
            phase_firings = 0
            continue

        assert schedule is not None
        if schedule.is_empty:
            abort = (f"controller stalled in phase {state.phase.value}: planner "
                     "returned no work but the phase has not converged")
            break

        violations = validate_schedule(schedule.segments, sc, target_period)
        if violations:
            abort = (f"invalid schedule in phase {state.phase.value}: "
                     + "; ".join(str(v) for v in violations))
            break
        needed = sum(s.impulse_ns for s in schedule.segments)
        if sim.impulse_used_ns + needed > sc.total_impulse_ns:
            abort = (f"delta-v budget exhausted in phase {state.phase.value}: "
                     f"block needs {needed:.1f} N s, "
                     f"{sc.total_impulse_ns - sim.impulse_used_ns:.1f} N s remain")
            break

        decisions.append(DecisionRecord(sim.t, update.epoch, state.phase.value,
                                        f"execute {schedule.block_label} "
                                        f"({len(schedule)} firings)", update.delta))
        schedules.append(ScheduleRecord(state.phase.value, schedule.block_label,
                                        schedule.segments, schedule.predicted, sim.t))
        phase_firings += len(schedule)
        if not advance(schedule.t_end + 1.0, schedule.segments):
            break
        state = replace(state, dv_used_mps=sim.dv_used_mps)

    if abort is None and state.phase == MissionPhase.CIRCUMNAVIGATION:
        t_end = sim.t + scenario.circumnavigation_days * 86400.0
        if advance(t_end):
            close_phase("circumnavigation", sim.t)
            sim.events.append((sim.t, "phase done"))
            state = replace(state, phase=MissionPhase.DONE)
    if abort is not None:
        close_phase(state.phase.value, sim.t)
        sim.events.append((sim.t, f"abort: {abort}"))

    report = MissionReport(
        scenario=scenario,
        t=np.concatenate(sim.ts),
        r_target=np.concatenate(sim.rt),
        v_target=np.concatenate(sim.vt),
        r_chaser=np.concatenate(sim.rc),
        v_chaser=np.concatenate(sim.vc),
        chaser_mass=np.concatenate(sim.mass),
        delta_v_mps=np.concatenate(sim.dv),
        phases=phases,
        schedules=schedules,
        decisions=decisions,
        events=sim.events,
        separation_dv_rsw_mps=dv_rsw if scenario.separation_delta is None else (0.0, 0.0, 0.0),
        abort=abort,
    )

    tm, cm = sim.mean_elements_now()
    report.final_delta = RelativeElements.between(cm, tm)
    if abort is None:
        report.final_geometry = _final_geometry(report, tm)
    return report


def _final_geometry(report: MissionReport, target_mean: OrbitalElements) -> EllipseGeometry:
    """Relative-orbit geometry measured over the last two circumnavigation orbits."""
    ctx = CwContext.from_semimajor_axis(target_mean.a, report.scenario.constants)
    t_end = float(report.t[-1])
    window = 2.0 * ctx.period
    ks = np.nonzero(report.t >= t_end - window)[0]
    rel = [report.relative_state(int(k)) for k in ks]
    return measure_ellipse(rel, ctx)
