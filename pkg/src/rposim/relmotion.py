"""Analytic relative-motion machinery about a circular reference orbit.

Implements the closed-form unforced solution of the linearized relative
dynamics (radial x, along-track y, cross-track z):

    xdd - 2 n yd - 3 n^2 x = 0
    ydd + 2 n xd           = 0
    zdd + n^2 z            = 0

plus the design helpers built on it: the centered-ellipse velocity matching
conditions, cross-track phasing for passive collision safety, deliberate
along-track walking, and trajectory geometry measurement.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .orbital import (
    EARTH,
    GravityConstants,
    OrbitalElements,
    RelativeElements,
    RelativeState,
    TWO_PI,
)

# The linearization is only trusted for small separations; beyond this the
# caller is warned that the output is qualitative.
LINEAR_REGIME_KM = 500.0

STATIC_ELLIPSE_TOL = 1e-6  # km/s on each velocity-condition residual


@dataclass(frozen=True)
class CwContext:
    """Reference-orbit context: n is the target mean motion, rad/s."""

    n: float

    def __post_init__(self) -> None:
        if self.n <= 0.0:
            raise ValueError("mean motion must be positive")

    @property
    def period(self) -> float:
        return TWO_PI / self.n

    @classmethod
    def from_semimajor_axis(cls, a: float, constants: GravityConstants = EARTH) -> "CwContext":
        return cls(n=math.sqrt(constants.mu / a**3))


@dataclass(frozen=True)
class StaticEllipseCheck:
    """Result of the centered-ellipse condition test.

    residuals = (xdot - (n/2) y, ydot + 2 n x), km/s; both must vanish for an
    unforced relative orbit that stays centered.
    """

    satisfied: bool
    residuals: tuple[float, float]


@dataclass(frozen=True)
class EllipseGeometry:
    """Peak-to-peak geometry of a relative orbit.

    radial_extent, alongtrack_extent, crosstrack_extent: km, full dimensions
    (amplitude = extent / 2). center_y: km. center_drift_rate: km per orbit
    period, positive along +y.
    """

    radial_extent: float
    alongtrack_extent: float
    crosstrack_extent: float
    center_y: float
    center_drift_rate: float


def cw_propagate(s0: RelativeState, ctx: CwContext, t: float) -> RelativeState:
    """Closed-form unforced propagation of a relative state by t seconds."""
    if t < 0.0:
        raise ValueError("propagation time must be nonnegative")
    if s0.distance() > LINEAR_REGIME_KM:
        warnings.warn(
            f"relative distance {s0.distance():.1f} km exceeds the "
            f"{LINEAR_REGIME_KM:.0f} km linearization regime",
            RuntimeWarning,
            stacklevel=2,
        )
    n = ctx.n
    nt = n * t
    c, s = math.cos(nt), math.sin(nt)

    x0, y0, z0 = s0.x, s0.y, s0.z
    xd0, yd0, zd0 = s0.xdot, s0.ydot, s0.zdot

    x = (4.0 - 3.0 * c) * x0 + (s / n) * xd0 + (2.0 / n) * (1.0 - c) * yd0
    y = (6.0 * (s - nt)) * x0 + y0 - (2.0 / n) * (1.0 - c) * xd0 \
        + ((4.0 * s - 3.0 * nt) / n) * yd0
    z = c * z0 + (s / n) * zd0

    xd = 3.0 * n * s * x0 + c * xd0 + 2.0 * s * yd0
    yd = -6.0 * n * (1.0 - c) * x0 - 2.0 * s * xd0 + (4.0 * c - 3.0) * yd0
    zd = -n * s * z0 + c * zd0

    return RelativeState(x=x, y=y, z=z, xdot=xd, ydot=yd, zdot=zd,
                         epoch=s0.epoch + t)


def is_static_ellipse(s: RelativeState, ctx: CwContext,
                      tol: float = STATIC_ELLIPSE_TOL) -> StaticEllipseCheck:
    """Test the velocity conditions for a drift-free centered relative orbit."""
    res_x = s.xdot - 0.5 * ctx.n * s.y
    res_y = s.ydot + 2.0 * ctx.n * s.x
    return StaticEllipseCheck(
        satisfied=abs(res_x) <= tol and abs(res_y) <= tol,
        residuals=(res_x, res_y),
    )


def design_safety_ellipse(radial_extent: float, crosstrack_extent: float,
                          ctx: CwContext) -> RelativeState:
    """Initial state of a passively safe relative ellipse.

    radial_extent and crosstrack_extent are peak-to-peak, km; the along-track
    extent of the resulting ellipse is twice the radial one. The cross-track
    oscillation is phased with the radial one (both cosine), so crossings of
    the x-y plane happen near the radial extremes and the y-z projection
    never passes through the origin.
    """
    if radial_extent <= 0.0:
        raise ValueError("radial extent must be positive")
    if crosstrack_extent < 0.0:
        raise ValueError("cross-track extent must be nonnegative")
    x0 = 0.5 * radial_extent
    z0 = 0.5 * crosstrack_extent
    return RelativeState(x=x0, y=0.0, z=z0,
                         xdot=0.0, ydot=-2.0 * ctx.n * x0, zdot=0.0)


def design_walking_safety_ellipse(base: RelativeState, drift_rate: float,
                                  ctx: CwContext) -> RelativeState:
    """Add a deliberate along-track center drift to a safety ellipse.

    drift_rate is km per orbit period, positive toward +y. The radial center
    is offset by -drift_rate/(3 pi) and the along-track velocity retuned so
    the oscillation amplitudes are untouched; only the secular term changes.
    """
    check = is_static_ellipse(base, ctx)
    if not check.satisfied:
        raise ValueError(
            f"base state is not a centered ellipse (residuals {check.residuals})"
        )
    x_center = -drift_rate / (3.0 * math.pi)
    return RelativeState(
        x=base.x + x_center,
        y=base.y,
        z=base.z,
        xdot=base.xdot,
        ydot=base.ydot - 1.5 * ctx.n * x_center,
        zdot=base.zdot,
        epoch=base.epoch,
    )


def measure_ellipse(trajectory: Sequence[RelativeState], ctx: CwContext) -> EllipseGeometry:
    """Measure extents, center, and drift from a sampled relative trajectory.

    The trajectory must span at least one orbit period; extents and center
    are taken over the most recent period. The drift rate compares the mean
    along-track offset of the last period against the one before it and is
    reported as 0 when fewer than two periods are available.
    """
    if len(trajectory) < 4:
        raise ValueError("trajectory needs at least 4 samples")
    states = sorted(trajectory, key=lambda s: s.epoch)
    t_end = states[-1].epoch
    span = t_end - states[0].epoch
    period = ctx.period
    if span < period * (1.0 - 1e-9):
        raise ValueError(
            f"trajectory spans {span:.1f} s, less than one period ({period:.1f} s)"
        )

    last = [s for s in states if s.epoch >= t_end - period * (1.0 + 1e-9)]
    xs = [s.x for s in last]
    ys = [s.y for s in last]
    zs = [s.z for s in last]
    center_y = math.fsum(ys) / len(ys)

    drift = 0.0
    if span >= 2.0 * period * (1.0 - 1e-9):
        prev = [s for s in states
                if t_end - 2.0 * period * (1.0 + 1e-9) <= s.epoch < t_end - period]
        if prev:
            prev_center = math.fsum(s.y for s in prev) / len(prev)
            drift = center_y - prev_center

    return EllipseGeometry(
        radial_extent=max(xs) - min(xs),
        alongtrack_extent=max(ys) - min(ys),
        crosstrack_extent=max(zs) - min(zs),
        center_y=center_y,
        center_drift_rate=drift,
    )


def relative_elements_to_geometry(delta: RelativeElements, target_oe: OrbitalElements,
                                  constants: GravityConstants = EARTH) -> EllipseGeometry:
    """First-order map from relative mean elements to relative-orbit geometry.

    radial extent 2 a de, along-track extent 4 a de, cross-track extent
    2 a sqrt(di^2 + (draan sin i)^2); the center sits at a (du + draan cos i)
    along-track and drifts -3 pi da per period.
    """
    a = target_oe.a
    return EllipseGeometry(
        radial_extent=2.0 * a * abs(delta.de),
        alongtrack_extent=4.0 * a * abs(delta.de),
        crosstrack_extent=2.0 * a * math.hypot(delta.di, delta.draan * math.sin(target_oe.i)),
        center_y=a * (delta.du + delta.draan * math.cos(target_oe.i)),
        center_drift_rate=-3.0 * math.pi * delta.da,
    )
