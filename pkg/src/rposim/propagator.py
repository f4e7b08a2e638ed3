"""Nonlinear two-body + J2 propagation with piecewise-constant RSW thrust.

Both spacecraft are advanced by a fixed-step 4th-order Runge-Kutta scheme
whose steps are forced to land on every thrust-segment boundary, so runs are
deterministic and bit-reproducible. Thrust acts on the chaser only, along one
axis of its own instantaneous radial / along-track / cross-track triad, with
mass depleted at thrust / (isp * g0) while firing. Optional exponential-
atmosphere drag and flat-plate solar radiation pressure can be switched on;
both default off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .orbital import EARTH, EciState, GravityConstants

G0_MPS2 = 9.80665

THRUST_DIRECTIONS = ("+R", "-R", "+S", "-S", "+W", "-W")

# Sun model for the optional radiation-pressure force: circular motion in the
# ecliptic starting on +x at epoch 0.
_OBLIQUITY = math.radians(23.439)
_YEAR_S = 365.25 * 86400.0


class PropagationError(RuntimeError):
    """Raised when the propagation itself fails (e.g. atmospheric decay)."""


@dataclass(frozen=True)
class ScheduleViolation:
    """One constraint violation found in a firing schedule."""

    segment_index: int
    kind: str  # "firing_limit" | "charging_gap" | "overlap" | "impulse_budget" | "invalid"
    detail: str

    def __str__(self) -> str:
        return f"segment {self.segment_index}: {self.kind}: {self.detail}"


class ScheduleError(ValueError):
    """A firing schedule violates the thruster operating constraints."""

    def __init__(self, violations: Sequence[ScheduleViolation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class DragConfig:
    """Exponential-atmosphere drag: rho = rho0 exp(-(h - h0)/scale_height)."""

    cd: float = 2.2
    area_m2: float = 0.03
    rho0_kgm3: float = 3.614e-13
    h0_km: float = 700.0
    scale_height_km: float = 88.667

    def __post_init__(self) -> None:
        if min(self.cd, self.area_m2, self.rho0_kgm3, self.scale_height_km) <= 0.0:
            raise ValueError("drag parameters must be positive")


@dataclass(frozen=True)
class SrpConfig:
    """Flat-plate solar radiation pressure with optional cylindrical shadow."""

    cr: float = 1.3
    area_m2: float = 0.03
    p0_nm2: float = 4.56e-6
    shadow: bool = True

    def __post_init__(self) -> None:
        if min(self.cr, self.area_m2, self.p0_nm2) <= 0.0:
            raise ValueError("radiation-pressure parameters must be positive")


@dataclass(frozen=True)
class ForceModelConfig:
    """Which perturbations act on both spacecraft."""

    j2_enabled: bool = True
    drag: Optional[DragConfig] = None
    srp: Optional[SrpConfig] = None


@dataclass(frozen=True)
class SpacecraftParams:
    """Chaser propulsion and sizing parameters.

    wet_mass_kg: initial mass; thrust_n: thruster force; isp_s: specific
    impulse; total_impulse_ns: lifetime impulse budget; max_firing_s: longest
    allowed continuous firing (power limit).
    """

    wet_mass_kg: float = 4.0
    thrust_n: float = 6.0e-3
    isp_s: float = 100.0
    total_impulse_ns: float = 270.0
    max_firing_s: float = 900.0
    g0: float = G0_MPS2

    def __post_init__(self) -> None:
        if min(self.wet_mass_kg, self.thrust_n, self.isp_s,
               self.total_impulse_ns, self.max_firing_s) <= 0.0:
            raise ValueError("spacecraft parameters must be positive")

    @property
    def dv_capacity_mps(self) -> float:
        """Approximate total delta-v budget, m/s."""
        return self.total_impulse_ns / self.wet_mass_kg

    @property
    def mass_flow_kgps(self) -> float:
        return self.thrust_n / (self.isp_s * self.g0)


@dataclass(frozen=True)
class ThrustSegment:
    """One continuous firing along a single chaser-frame axis.

    direction is one of +R/-R/+S/-S/+W/-W in the chaser's own RSW triad.
    """

    t_start: float
    t_end: float
    direction: str
    thrust_n: float = 6.0e-3

    def __post_init__(self) -> None:
        if self.direction not in THRUST_DIRECTIONS:
            raise ValueError(f"direction must be one of {THRUST_DIRECTIONS}")
        if self.t_end <= self.t_start:
            raise ValueError("segment must have positive duration")
        if self.thrust_n <= 0.0:
            raise ValueError("thrust must be positive")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def axis(self) -> int:
        """0 for R, 1 for S, 2 for W."""
        return {"R": 0, "S": 1, "W": 2}[self.direction[1]]

    @property
    def sign(self) -> float:
        return 1.0 if self.direction[0] == "+" else -1.0

    @property
    def impulse_ns(self) -> float:
        return self.thrust_n * self.duration


@dataclass
class PropagationResult:
    """Sampled truth trajectories of both spacecraft.

    Arrays share the time grid ``t``; ``delta_v_mps`` is the cumulative chaser
    delta-v and ``chaser_mass`` its instantaneous mass. ``events`` records
    (time, label) pairs for firing starts and stops.
    """

    t: np.ndarray
    r_target: np.ndarray
    v_target: np.ndarray
    r_chaser: np.ndarray
    v_chaser: np.ndarray
    chaser_mass: np.ndarray
    delta_v_mps: np.ndarray
    events: list[tuple[float, str]] = field(default_factory=list)
    isp_g0: float = 0.0  # isp_s * g0 in m/s, set by propagate()
    target_mass: float = 1.0

    @property
    def delta_v_used(self) -> float:
        return float(self.delta_v_mps[-1])

    @property
    def impulse_used_ns(self) -> float:
        """Impulse spent, from the propellant actually burned."""
        return float((self.chaser_mass[0] - self.chaser_mass[-1]) * self.isp_g0)

    def target_state(self, k: int) -> EciState:
        return EciState(epoch=float(self.t[k]), r=self.r_target[k],
                        v=self.v_target[k], mass=self.target_mass)

    def chaser_state(self, k: int) -> EciState:
        return EciState(epoch=float(self.t[k]), r=self.r_chaser[k],
                        v=self.v_chaser[k], mass=float(self.chaser_mass[k]))

    @property
    def final_target(self) -> EciState:
        return self.target_state(len(self.t) - 1)

    @property
    def final_chaser(self) -> EciState:
        return self.chaser_state(len(self.t) - 1)

    def index_at(self, t: float) -> int:
        """Index of the grid point at time t (must lie on the grid)."""
        k = int(np.searchsorted(self.t, t - 1e-6))
        if k >= len(self.t) or abs(float(self.t[k]) - t) > 1e-6:
            raise ValueError(f"time {t} s is not on the propagation grid")
        return k

    def index_nearest(self, t: float) -> int:
        """Index of the stored sample closest to time t."""
        k = int(np.searchsorted(self.t, t))
        if k <= 0:
            return 0
        if k >= len(self.t):
            return len(self.t) - 1
        return k if abs(float(self.t[k]) - t) < abs(float(self.t[k - 1]) - t) \
            else k - 1


def _gravity(rx: float, ry: float, rz: float, mu: float, j2_mu_re2: float,
             re: float) -> tuple[float, float, float]:
    """Two-body plus J2 acceleration, km/s^2; j2_mu_re2 = 1.5 * J2 * mu * re^2."""
    r2 = rx * rx + ry * ry + rz * rz
    r = math.sqrt(r2)
    if r <= re:
        raise PropagationError(f"spacecraft decayed: radius {r:.3f} km")
    inv_r3 = 1.0 / (r2 * r)
    ax = -mu * rx * inv_r3
    ay = -mu * ry * inv_r3
    az = -mu * rz * inv_r3
    if j2_mu_re2 != 0.0:
        factor = j2_mu_re2 * inv_r3 / r2
        z2_r2 = (rz * rz) / r2
        ax += factor * rx * (5.0 * z2_r2 - 1.0)
        ay += factor * ry * (5.0 * z2_r2 - 1.0)
        az += factor * rz * (5.0 * z2_r2 - 3.0)
    return ax, ay, az


def _sun_unit(t: float) -> tuple[float, float, float]:
    lam = TWO_PI_OVER_YEAR * t
    cl, sl = math.cos(lam), math.sin(lam)
    return cl, sl * math.cos(_OBLIQUITY), sl * math.sin(_OBLIQUITY)


TWO_PI_OVER_YEAR = 2.0 * math.pi / _YEAR_S


def _perturbations(rx, ry, rz, vx, vy, vz, t, mass, config: ForceModelConfig,
                   constants: GravityConstants) -> tuple[float, float, float]:
    """Drag and radiation-pressure acceleration, km/s^2 (zero when disabled)."""
    ax = ay = az = 0.0
    if config.drag is not None:
        d = config.drag
        r = math.sqrt(rx * rx + ry * ry + rz * rz)
        h = r - constants.re
        rho = d.rho0_kgm3 * math.exp(-(h - d.h0_km) / d.scale_height_km)
        v = math.sqrt(vx * vx + vy * vy + vz * vz)
        # SI magnitude from km/s speeds: 0.5 rho (1000 v)^2 Cd A / m [m/s^2]
        coeff = -0.5 * rho * d.cd * d.area_m2 / mass * v * 1e6 / 1000.0
        ax += coeff * vx
        ay += coeff * vy
        az += coeff * vz
    if config.srp is not None:
        s = config.srp
        sx, sy, sz = _sun_unit(t)
        lit = True
        if s.shadow:
            along = rx * sx + ry * sy + rz * sz
            if along < 0.0:
                perp2 = (rx * rx + ry * ry + rz * rz) - along * along
                lit = perp2 > constants.re ** 2
        if lit:
            mag = s.p0_nm2 * s.cr * s.area_m2 / mass / 1000.0  # km/s^2, away from sun
            ax += mag * sx
            ay += mag * sy
            az += mag * sz
    return ax, ay, az


def acceleration(state: EciState, config: ForceModelConfig,
                 active_thrust: Optional[ThrustSegment] = None,
                 constants: GravityConstants = EARTH) -> np.ndarray:
    """Total acceleration on a spacecraft, km/s^2.

    Sums two-body gravity, J2 when enabled, configured drag and radiation
    pressure, and the thrust of an active segment resolved from the
    spacecraft's own RSW triad into the inertial frame.
    """
    rx, ry, rz = (float(c) for c in state.r)
    vx, vy, vz = (float(c) for c in state.v)
    j2_term = 1.5 * constants.j2 * constants.mu * constants.re ** 2 if config.j2_enabled else 0.0
    ax, ay, az = _gravity(rx, ry, rz, constants.mu, j2_term, constants.re)
    px, py, pz = _perturbations(rx, ry, rz, vx, vy, vz, state.epoch, state.mass,
                                config, constants)
    ax, ay, az = ax + px, ay + py, az + pz
    if active_thrust is not None:
        tx, ty, tz = _thrust_accel(rx, ry, rz, vx, vy, vz, state.mass,
                                   active_thrust.sign * active_thrust.thrust_n,
                                   active_thrust.axis)
        ax, ay, az = ax + tx, ay + ty, az + tz
    return np.array([ax, ay, az])


def _thrust_accel(rx, ry, rz, vx, vy, vz, mass, signed_thrust_n, axis):
    """Thrust acceleration in km/s^2 along one axis of the own RSW triad."""
    # accel magnitude: N / kg = m/s^2 -> /1000 km/s^2
    mag = signed_thrust_n / mass / 1000.0
    if axis == 0:
        r = math.sqrt(rx * rx + ry * ry + rz * rz)
        return mag * rx / r, mag * ry / r, mag * rz / r
    hx = ry * vz - rz * vy
    hy = rz * vx - rx * vz
    hz = rx * vy - ry * vx
    h = math.sqrt(hx * hx + hy * hy + hz * hz)
    if axis == 2:
        return mag * hx / h, mag * hy / h, mag * hz / h
    # S = W x R
    r = math.sqrt(rx * rx + ry * ry + rz * rz)
    wx, wy, wz = hx / h, hy / h, hz / h
    ux, uy, uz = rx / r, ry / r, rz / r
    sx = wy * uz - wz * uy
    sy = wz * ux - wx * uz
    sz = wx * uy - wy * ux
    return mag * sx, mag * sy, mag * sz


def validate_schedule(schedule: Sequence[ThrustSegment], params: SpacecraftParams,
                      target_period: float) -> list[ScheduleViolation]:
    """Check a schedule against the thruster operating constraints.

    Every firing must be no longer than params.max_firing_s, consecutive
    firings must be separated by at least one target orbit period of battery
    charging, segments must be time-ordered and non-overlapping, and the total
    impulse must fit the budget. Returns an empty list when the schedule is
    acceptable.
    """
    violations: list[ScheduleViolation] = []
    ordered = sorted(range(len(schedule)), key=lambda k: schedule[k].t_start)
    for pos, k in enumerate(ordered):
        seg = schedule[k]
        if seg.duration > params.max_firing_s + 1e-9:
            violations.append(ScheduleViolation(
                k, "firing_limit",
                f"duration {seg.duration:.1f} s exceeds {params.max_firing_s:.0f} s"))
        if pos > 0:
            prev = schedule[ordered[pos - 1]]
            gap = seg.t_start - prev.t_end
            if gap < -1e-9:
                violations.append(ScheduleViolation(
                    k, "overlap",
                    f"starts {-gap:.1f} s before segment {ordered[pos - 1]} ends"))
            elif gap < target_period - 1e-6:
                violations.append(ScheduleViolation(
                    k, "charging_gap",
                    f"gap {gap:.1f} s after segment {ordered[pos - 1]} is shorter "
                    f"than one orbit period ({target_period:.1f} s)"))
    total_impulse = sum(seg.impulse_ns for seg in schedule)
    if total_impulse > params.total_impulse_ns + 1e-9:
        violations.append(ScheduleViolation(
            -1, "impulse_budget",
            f"schedule impulse {total_impulse:.1f} N s exceeds budget "
            f"{params.total_impulse_ns:.1f} N s"))
    return violations


def _rk4_step(rx, ry, rz, vx, vy, vz, t, h, mass0, mdot, t_mass0,
              mu, j2_term, re, config, constants, seg):
    """Advance one spacecraft by h seconds; mass varies linearly in time."""
    simple = config.drag is None and config.srp is None

    def acc(px, py, pz, qx, qy, qz, tau):
        ax, ay, az = _gravity(px, py, pz, mu, j2_term, re)
        m = mass0 - mdot * (tau - t_mass0)
        if not simple:
            dx, dy, dz = _perturbations(px, py, pz, qx, qy, qz, tau, m,
                                        config, constants)
            ax, ay, az = ax + dx, ay + dy, az + dz
        if seg is not None:
            tx, ty, tz = _thrust_accel(px, py, pz, qx, qy, qz, m,
                                       seg.sign * seg.thrust_n, seg.axis)
            ax, ay, az = ax + tx, ay + ty, az + tz
        return ax, ay, az

    h2 = 0.5 * h
    a1x, a1y, a1z = acc(rx, ry, rz, vx, vy, vz, t)

    r2x, r2y, r2z = rx + h2 * vx, ry + h2 * vy, rz + h2 * vz
    v2x, v2y, v2z = vx + h2 * a1x, vy + h2 * a1y, vz + h2 * a1z
    a2x, a2y, a2z = acc(r2x, r2y, r2z, v2x, v2y, v2z, t + h2)

    r3x, r3y, r3z = rx + h2 * v2x, ry + h2 * v2y, rz + h2 * v2z
    v3x, v3y, v3z = vx + h2 * a2x, vy + h2 * a2y, vz + h2 * a2z
    a3x, a3y, a3z = acc(r3x, r3y, r3z, v3x, v3y, v3z, t + h2)

    r4x, r4y, r4z = rx + h * v3x, ry + h * v3y, rz + h * v3z
    v4x, v4y, v4z = vx + h * a3x, vy + h * a3y, vz + h * a3z
    a4x, a4y, a4z = acc(r4x, r4y, r4z, v4x, v4y, v4z, t + h)

    h6 = h / 6.0
    return (
        rx + h6 * (vx + 2.0 * (v2x + v3x) + v4x),
        ry + h6 * (vy + 2.0 * (v2y + v3y) + v4y),
        rz + h6 * (vz + 2.0 * (v2z + v3z) + v4z),
        vx + h6 * (a1x + 2.0 * (a2x + a3x) + a4x),
        vy + h6 * (a1y + 2.0 * (a2y + a3y) + a4y),
        vz + h6 * (a1z + 2.0 * (a2z + a3z) + a4z),
    )


def propagate(
    target0: EciState,
    chaser0: EciState,
    schedule: Sequence[ThrustSegment],
    config: ForceModelConfig,
    params: SpacecraftParams,
    t_span: tuple[float, float],
    step: float,
    constants: GravityConstants = EARTH,
    impulse_already_used_ns: float = 0.0,
    record_every: int = 1,
) -> PropagationResult:
    """Propagate both spacecraft over t_span executing the firing schedule.

    Integration steps never exceed ``step`` and are forced to land exactly on
    every segment boundary. Chaser mass depletes at thrust/(isp g0) while
    firing; the cumulative delta-v is the rocket-equation value accumulated
    segment piece by segment piece. ``record_every`` thins the stored samples
    (boundaries and the final state are always kept).

    Raises ScheduleError for overlapping segments, segments longer than the
    firing limit, segments outside t_span, or a schedule whose impulse (plus
    ``impulse_already_used_ns``) exceeds the budget; PropagationError if a
    spacecraft decays.
    """
    t0, tf = t_span
    if tf < t0:
        raise ValueError("t_span must be increasing")
    if step <= 0.0:
        raise ValueError("step must be positive")
    if abs(target0.epoch - t0) > 1e-9 or abs(chaser0.epoch - t0) > 1e-9:
        raise ValueError("initial states must be at t_span[0]")

    segs = sorted(schedule, key=lambda s: s.t_start)
    violations: list[ScheduleViolation] = []
    for k, seg in enumerate(segs):
        if seg.duration > params.max_firing_s + 1e-9:
            violations.append(ScheduleViolation(
                k, "firing_limit",
                f"duration {seg.duration:.1f} s exceeds {params.max_firing_s:.0f} s"))
        if seg.t_start < t0 - 1e-9 or seg.t_end > tf + 1e-9:
            violations.append(ScheduleViolation(
                k, "invalid", "segment lies outside the propagation span"))
        if k > 0 and seg.t_start < segs[k - 1].t_end - 1e-9:
            violations.append(ScheduleViolation(k, "overlap", "segments overlap"))
    impulse = sum(s.impulse_ns for s in segs)
    if impulse + impulse_already_used_ns > params.total_impulse_ns + 1e-9:
        violations.append(ScheduleViolation(
            -1, "impulse_budget",
            f"schedule needs {impulse:.1f} N s with {impulse_already_used_ns:.1f} "
            f"already spent, budget {params.total_impulse_ns:.1f} N s"))
    if violations:
        raise ScheduleError(violations)

    # Breakpoints: span ends plus every segment boundary.
    breaks = sorted({t0, tf} | {s.t_start for s in segs} | {s.t_end for s in segs})

    mu, re = constants.mu, constants.re
    j2_term = 1.5 * constants.j2 * mu * re * re if config.j2_enabled else 0.0
    isp_g0 = params.isp_s * params.g0

    trx, try_, trz = (float(c) for c in target0.r)
    tvx, tvy, tvz = (float(c) for c in target0.v)
    crx, cry, crz = (float(c) for c in chaser0.r)
    cvx, cvy, cvz = (float(c) for c in chaser0.v)
    mass = float(chaser0.mass)
    dv = 0.0

    ts = [t0]
    rt = [(trx, try_, trz)]
    vt = [(tvx, tvy, tvz)]
    rc = [(crx, cry, crz)]
    vc = [(cvx, cvy, cvz)]
    ms = [mass]
    dvs = [dv]
    events: list[tuple[float, str]] = []

    def record(t):
        ts.append(t)
        rt.append((trx, try_, trz))
        vt.append((tvx, tvy, tvz))
        rc.append((crx, cry, crz))
        vc.append((cvx, cvy, cvz))
        ms.append(mass)
        dvs.append(dv)

    seg_by_start = {s.t_start: s for s in segs}
    seg_ends = {s.t_end for s in segs}

    t = t0
    for b in range(len(breaks) - 1):
        ta, tb = breaks[b], breaks[b + 1]
        active = None
        for s in segs:
            if s.t_start <= ta + 1e-9 and tb <= s.t_end + 1e-9:
                active = s
                break
        if ta in seg_by_start:
            events.append((ta, f"firing_start {seg_by_start[ta].direction}"))
        n_sub = max(1, math.ceil((tb - ta) / step - 1e-12))
        h = (tb - ta) / n_sub
        mdot = params.mass_flow_kgps if active is not None else 0.0
        mass_at_ta = mass
        target_mass = float(target0.mass)
        for k_sub in range(n_sub):
            t_loc = ta + k_sub * h
            trx, try_, trz, tvx, tvy, tvz = _rk4_step(
                trx, try_, trz, tvx, tvy, tvz, t_loc, h, target_mass, 0.0, t_loc,
                mu, j2_term, re, config, constants, None)
            crx, cry, crz, cvx, cvy, cvz = _rk4_step(
                crx, cry, crz, cvx, cvy, cvz, t_loc, h, mass_at_ta, mdot, ta,
                mu, j2_term, re, config, constants, active)
            if mdot > 0.0:
                new_mass = mass_at_ta - mdot * (k_sub + 1) * h
                dv += isp_g0 * math.log(mass / new_mass)
                mass = new_mass
            t = t_loc + h
            if (k_sub + 1) % record_every == 0 or k_sub == n_sub - 1:
                record(t)
        if tb in seg_ends:
            events.append((tb, "firing_stop"))

    return PropagationResult(
        t=np.array(ts),
        r_target=np.array(rt),
        v_target=np.array(vt),
        r_chaser=np.array(rc),
        v_chaser=np.array(vc),
        chaser_mass=np.array(ms),
        delta_v_mps=np.array(dvs),
        events=events,
        isp_g0=isp_g0,
        target_mass=float(target0.mass),
    )
