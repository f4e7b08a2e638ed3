"""Earth-centered frames, Keplerian element sets, and the conversions between them.

All positions are in km, velocities in km/s, angles in radians, times in
seconds unless a name says otherwise. Every type is an immutable value and
every function is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Below these thresholds the classical angles lose meaning and the degenerate
# conventions apply: e < ECC_SINGULAR pins argp = 0 (true anomaly absorbs the
# argument of latitude), i < INC_SINGULAR pins raan = 0.
ECC_SINGULAR = 1e-9
INC_SINGULAR = 1e-9


def wrap_to_2pi(angle: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    wrapped = math.fmod(angle, TWO_PI)
    return wrapped + TWO_PI if wrapped < 0.0 else wrapped


def wrap_to_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, TWO_PI)
    if wrapped <= 0.0:
        wrapped += TWO_PI
    return wrapped - math.pi


@dataclass(frozen=True)
class GravityConstants:
    """Central-body gravity model parameters (EGM96-consistent defaults).

    mu: gravitational parameter, km^3/s^2
    re: equatorial radius, km
    j2: second zonal harmonic coefficient, dimensionless
    """

    mu: float = 398600.4418
    re: float = 6378.137
    j2: float = 1.08262668e-3

    def __post_init__(self) -> None:
        if self.mu <= 0.0 or self.re <= 0.0 or self.j2 < 0.0:
            raise ValueError("gravity constants must be positive")


EARTH = GravityConstants()


@dataclass(frozen=True, eq=False)
class EciState:
    """Inertial Cartesian state of one spacecraft.

    epoch: seconds since scenario start
    r: ECI position, km
    v: ECI velocity, km/s
    mass: spacecraft mass, kg
    """

    epoch: float
    r: np.ndarray
    v: np.ndarray
    mass: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.r.shape != (3,) or self.v.shape != (3,):
            raise ValueError("r and v must be 3-vectors")
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if float(np.linalg.norm(self.r)) <= EARTH.re:
            raise ValueError("position is at or below the Earth surface")
        if float(np.linalg.norm(self.v)) <= 0.0:
            raise ValueError("velocity must be nonzero")


@dataclass(frozen=True, eq=False)
class RswFrame:
    """Rotating radial / along-track / cross-track triad of one spacecraft.

    Rows of ``matrix`` are the R, S, W unit vectors, so ``matrix @ x_eci``
    gives RSW components. The triad is right handed: W parallel to r x v.
    """

    origin: np.ndarray
    r_hat: np.ndarray
    s_hat: np.ndarray
    w_hat: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.array([self.r_hat, self.s_hat, self.w_hat])


@dataclass(frozen=True)
class OrbitalElements:
    """Classical Keplerian elements, tagged osculating or mean.

    a: semi-major axis, km
    e: eccentricity in [0, 1)
    i: inclination, rad, in [0, pi]
    raan: right ascension of the ascending node, rad
    argp: argument of perigee, rad
    ta: true anomaly, rad
    flavor: "osculating" or "mean"

    Angles are normalized to [0, 2*pi). The argument of latitude
    u = argp + ta is the singularity-free phase used for targeting.
    """

    a: float
    e: float
    i: float
    raan: float
    argp: float
    ta: float
    flavor: str = "osculating"

    def __post_init__(self) -> None:
        if self.a <= 0.0:
            raise ValueError(f"semi-major axis must be positive, got {self.a}")
        if not 0.0 <= self.e < 1.0:
            raise ValueError(f"eccentricity must be in [0, 1), got {self.e}")
        if not -1e-12 <= self.i <= math.pi + 1e-12:
            raise ValueError(f"inclination must be in [0, pi], got {self.i}")
        if self.flavor not in ("osculating", "mean"):
            raise ValueError(f"flavor must be osculating or mean, got {self.flavor!r}")
        object.__setattr__(self, "i", min(max(self.i, 0.0), math.pi))
        object.__setattr__(self, "raan", wrap_to_2pi(self.raan))
        object.__setattr__(self, "argp", wrap_to_2pi(self.argp))
        object.__setattr__(self, "ta", wrap_to_2pi(self.ta))

    @property
    def u(self) -> float:
        """Argument of latitude argp + ta, wrapped to [0, 2*pi)."""
        return wrap_to_2pi(self.argp + self.ta)

    def mean_motion(self, constants: GravityConstants = EARTH) -> float:
        """Keplerian mean motion sqrt(mu/a^3), rad/s."""
        return math.sqrt(constants.mu / self.a**3)

    def period(self, constants: GravityConstants = EARTH) -> float:
        """Keplerian orbital period, s."""
        return TWO_PI / self.mean_motion(constants)


@dataclass(frozen=True)
class RelativeElements:
    """Chaser-minus-target element differences on a common flavor and epoch.

    da: km; de: dimensionless; di, draan, du: rad, wrapped to (-pi, pi].
    """

    da: float = 0.0
    de: float = 0.0
    di: float = 0.0
    draan: float = 0.0
    du: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "di", wrap_to_pi(self.di))
        object.__setattr__(self, "draan", wrap_to_pi(self.draan))
        object.__setattr__(self, "du", wrap_to_pi(self.du))

    @classmethod
    def between(cls, chaser: OrbitalElements, target: OrbitalElements) -> "RelativeElements":
        """Difference chaser - target; both sets must share a flavor."""
        if chaser.flavor != target.flavor:
            raise ValueError("element sets must share a flavor")
        return cls(
            da=chaser.a - target.a,
            de=chaser.e - target.e,
            di=wrap_to_pi(chaser.i - target.i),
            draan=wrap_to_pi(chaser.raan - target.raan),
            du=wrap_to_pi(chaser.u - target.u),
        )


@dataclass(frozen=True)
class RelativeState:
    """Cartesian relative state in the target's RSW frame.

    x, y, z: radial, along-track, cross-track offsets, km.
    xdot, ydot, zdot: rates as seen in the rotating frame, km/s.
    Only meaningful while the offset is small against the orbit radius.
    """

    x: float
    y: float
    z: float
    xdot: float
    ydot: float
    zdot: float
    epoch: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.xdot, self.ydot, self.zdot])

    def distance(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


def rsw_frame(state: EciState) -> RswFrame:
    """Build the RSW triad of a spacecraft from its inertial state.

    R points along the position vector, W along the orbital angular momentum
    r x v, and S = W x R completes the right-handed set.

    Raises ValueError for a rectilinear (zero angular momentum) state where
    the frame is undefined.
    """
    r_norm = float(np.linalg.norm(state.r))
    if r_norm <= 0.0:
        raise ValueError("undefined RSW frame: zero position vector")
    h_vec = np.cross(state.r, state.v)
    h_norm = float(np.linalg.norm(h_vec))
    if h_norm <= 1e-12 * r_norm * float(np.linalg.norm(state.v)):
        raise ValueError("undefined RSW frame: rectilinear orbit")
    r_hat = state.r / r_norm
    w_hat = h_vec / h_norm
    s_hat = np.cross(w_hat, r_hat)
    return RswFrame(origin=state.r.copy(), r_hat=r_hat, s_hat=s_hat, w_hat=w_hat)


def eci_to_relative(target: EciState, chaser: EciState) -> RelativeState:
    """Express the chaser state relative to the target in the target RSW frame.

    Velocity components follow the transport theorem with the frame angular
    velocity (r x v)/r^2, so they are rates as seen in the rotating frame.
    """
    if abs(target.epoch - chaser.epoch) > 1e-9:
        raise ValueError(
            f"epoch mismatch: target at {target.epoch} s, chaser at {chaser.epoch} s"
        )
    frame = rsw_frame(target)
    omega = np.cross(target.r, target.v) / float(np.dot(target.r, target.r))
    dr = chaser.r - target.r
    dv = chaser.v - target.v - np.cross(omega, dr)
    pos = frame.matrix @ dr
    vel = frame.matrix @ dv
    return RelativeState(
        x=float(pos[0]), y=float(pos[1]), z=float(pos[2]),
        xdot=float(vel[0]), ydot=float(vel[1]), zdot=float(vel[2]),
        epoch=target.epoch,
    )


def relative_to_eci(target: EciState, rel: RelativeState, mass: float = 1.0) -> EciState:
    """Inverse of :func:`eci_to_relative` for the same target state."""
    frame = rsw_frame(target)
    omega = np.cross(target.r, target.v) / float(np.dot(target.r, target.r))
    dr = frame.matrix.T @ rel.position
    dv = frame.matrix.T @ rel.velocity + np.cross(omega, dr)
    return EciState(epoch=target.epoch, r=target.r + dr, v=target.v + dv, mass=mass)


def solve_kepler(mean_anomaly: float, e: float, tol: float = 1e-14) -> float:
    """Solve Kepler's equation M = E - e sin E for the eccentric anomaly."""
    m = wrap_to_2pi(mean_anomaly)
    ecc_anom = m if e < 0.8 else math.pi
    for _ in range(60):
        f = ecc_anom - e * math.sin(ecc_anom) - m
        delta = f / (1.0 - e * math.cos(ecc_anom))
        ecc_anom -= delta
        if abs(delta) < tol:
            break
    return ecc_anom


def true_from_mean(mean_anomaly: float, e: float) -> float:
    """True anomaly from mean anomaly via Kepler's equation."""
    ecc_anom = solve_kepler(mean_anomaly, e)
    half = math.sqrt((1.0 + e) / (1.0 - e)) * math.tan(0.5 * ecc_anom)
    return wrap_to_2pi(2.0 * math.atan(half))


def mean_from_true(true_anomaly: float, e: float) -> float:
    """Mean anomaly from true anomaly (inverse of :func:`true_from_mean`)."""
    half = math.sqrt((1.0 - e) / (1.0 + e)) * math.tan(0.5 * true_anomaly)
    ecc_anom = 2.0 * math.atan(half)
    return wrap_to_2pi(ecc_anom - e * math.sin(ecc_anom))


def elements_to_cart(
    oe: OrbitalElements,
    constants: GravityConstants = EARTH,
    epoch: float = 0.0,
    mass: float = 1.0,
) -> EciState:
    """Keplerian elements to inertial Cartesian state.

    The flavor tag is ignored: the caller decides whether the elements
    describe an instantaneous (osculating) orbit.
    """
    p = oe.a * (1.0 - oe.e**2)
    cos_ta = math.cos(oe.ta)
    sin_ta = math.sin(oe.ta)
    r_mag = p / (1.0 + oe.e * cos_ta)

    r_pf = np.array([r_mag * cos_ta, r_mag * sin_ta, 0.0])
    coeff = math.sqrt(constants.mu / p)
    v_pf = np.array([-coeff * sin_ta, coeff * (oe.e + cos_ta), 0.0])

    cr, sr = math.cos(oe.raan), math.sin(oe.raan)
    ci, si = math.cos(oe.i), math.sin(oe.i)
    cw, sw = math.cos(oe.argp), math.sin(oe.argp)
    rot = np.array([
        [cr * cw - sr * sw * ci, -cr * sw - sr * cw * ci, sr * si],
        [sr * cw + cr * sw * ci, -sr * sw + cr * cw * ci, -cr * si],
        [sw * si, cw * si, ci],
    ])
    return EciState(epoch=epoch, r=rot @ r_pf, v=rot @ v_pf, mass=mass)


def cart_to_elements(state: EciState, constants: GravityConstants = EARTH) -> OrbitalElements:
    """Inertial Cartesian state to osculating Keplerian elements.

    Requires a bound elliptical orbit (negative specific energy). For
    near-circular orbits (e < 1e-9) the argument of perigee is set to zero
    and the true anomaly carries the argument of latitude; for
    near-equatorial orbits (i < 1e-9) the node is set to zero.
    """
    r_vec, v_vec = state.r, state.v
    r = float(np.linalg.norm(r_vec))
    v2 = float(np.dot(v_vec, v_vec))
    energy = 0.5 * v2 - constants.mu / r
    if energy >= 0.0:
        raise ValueError("orbit is not bound elliptical (specific energy >= 0)")

    h_vec = np.cross(r_vec, v_vec)
    h = float(np.linalg.norm(h_vec))
    if h <= 0.0:
        raise ValueError("degenerate rectilinear orbit")

    a = -constants.mu / (2.0 * energy)
    e_vec = (np.cross(v_vec, h_vec) / constants.mu) - r_vec / r
    e = float(np.linalg.norm(e_vec))
    if e >= 1.0 - 1e-12:
        raise ValueError("orbit is not bound elliptical (e >= 1)")

    w_hat = h_vec / h
    inc = math.acos(min(max(float(w_hat[2]), -1.0), 1.0))

    node_vec = np.array([-h_vec[1], h_vec[0], 0.0])
    node = float(np.linalg.norm(node_vec))

    if inc < INC_SINGULAR:
        raan = 0.0
        node_hat = np.array([1.0, 0.0, 0.0])
    else:
        node_hat = node_vec / node
        raan = wrap_to_2pi(math.atan2(node_hat[1], node_hat[0]))

    if e < ECC_SINGULAR:
        argp = 0.0
        # True anomaly measured from the node: the argument of latitude.
        m_hat = np.cross(w_hat, node_hat)
        ta = wrap_to_2pi(math.atan2(float(np.dot(r_vec, m_hat)), float(np.dot(r_vec, node_hat))))
    else:
        e_hat = e_vec / e
        q_hat = np.cross(w_hat, e_hat)
        argp = wrap_to_2pi(math.atan2(float(np.dot(e_vec, np.cross(w_hat, node_hat))),
                                      float(np.dot(e_vec, node_hat))))
        ta = wrap_to_2pi(math.atan2(float(np.dot(r_vec, q_hat)), float(np.dot(r_vec, e_hat))))

    return OrbitalElements(a=a, e=e, i=inc, raan=raan, argp=argp, ta=ta, flavor="osculating")
