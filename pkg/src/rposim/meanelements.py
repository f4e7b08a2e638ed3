"""First-order J2 mean / osculating element interconversion and secular rates.

The transformation is the classical first-order mapping for the J2 problem:
short-period and first-order long-period terms in gamma2 = (J2/2)(re/a)^2,
composed through the (e sin M, e cos M) and (sin(i/2) sin RAAN, ...) pairs so
that small eccentricities and inclinations stay well conditioned. The same
formulas serve both directions with the sign of gamma2 flipped; the
osculating-to-mean direction is then polished by fixed-point iteration so a
round trip reproduces the input to far better than the O(J2^2) truncation.

The mapping is singular at the critical inclination (1 - 5 cos^2 i = 0);
inputs within half a degree of it are rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .orbital import (
    EARTH,
    GravityConstants,
    OrbitalElements,
    mean_from_true,
    true_from_mean,
    wrap_to_2pi,
    wrap_to_pi,
)

# i with 1 - 5 cos^2(i) = 0: 63.4349 deg and its retrograde mirror.
_CRITICAL_INCLINATIONS = (math.acos(1.0 / math.sqrt(5.0)),
                          math.pi - math.acos(1.0 / math.sqrt(5.0)))
_CRITICAL_MARGIN = math.radians(0.5)

_ECC_PARABOLIC_GUARD = 0.99


@dataclass(frozen=True)
class SecularRates:
    """J2 secular drift rates of the mean angles, rad/s.

    raan_rate: node regression dRAAN/dt
    argp_rate: perigee precession dargp/dt
    mean_anomaly_rate: dM/dt including the Keplerian mean motion
    """

    raan_rate: float
    argp_rate: float
    mean_anomaly_rate: float

    @property
    def arglat_rate(self) -> float:
        """Drift rate of the argument of latitude, argp_rate + mean_anomaly_rate."""
        return self.argp_rate + self.mean_anomaly_rate


def check_critical_inclination(i: float) -> None:
    """Reject inclinations within 0.5 deg of the critical values."""
    for crit in _CRITICAL_INCLINATIONS:
        if abs(i - crit) < _CRITICAL_MARGIN:
            raise ValueError(
                f"inclination {math.degrees(i):.3f} deg is within 0.5 deg of the "
                "critical inclination; the first-order mapping is singular there"
            )


def secular_rates(oe: OrbitalElements, constants: GravityConstants = EARTH) -> SecularRates:
    """Analytic J2 secular rates for a set of mean elements.

    raan_rate = -(3/2) J2 n (re/p)^2 cos i
    argp_rate = (3/4) J2 n (re/p)^2 (5 cos^2 i - 1)
    mean_anomaly_rate = n [1 + (3/4) J2 (re/p)^2 sqrt(1-e^2) (3 cos^2 i - 1)]
    """
    n = oe.mean_motion(constants)
    p = oe.a * (1.0 - oe.e**2)
    k = constants.j2 * (constants.re / p) ** 2
    cos_i = math.cos(oe.i)
    eta = math.sqrt(1.0 - oe.e**2)
    return SecularRates(
        raan_rate=-1.5 * k * n * cos_i,
        argp_rate=0.75 * k * n * (5.0 * cos_i**2 - 1.0),
        mean_anomaly_rate=n * (1.0 + 0.75 * k * eta * (3.0 * cos_i**2 - 1.0)),
    )


def raan_rate_slope(oe: OrbitalElements, constants: GravityConstants = EARTH) -> float:
    """d(raan_rate)/da, rad/s per km; raan_rate scales as a^(-7/2)."""
    return -3.5 * secular_rates(oe, constants).raan_rate / oe.a


def arglat_rate_slope(oe: OrbitalElements, constants: GravityConstants = EARTH) -> float:
    """d(arglat_rate)/da, rad/s per km.

    The Keplerian part of dM/dt scales as a^(-3/2), every J2 term as a^(-7/2).
    """
    n = oe.mean_motion(constants)
    rates = secular_rates(oe, constants)
    j2_part = rates.argp_rate + rates.mean_anomaly_rate - n
    return (-1.5 * n - 3.5 * j2_part) / oe.a


def _first_order_map(
    a: float, e: float, i: float, raan: float, argp: float, mean_anom: float,
    gamma2: float,
) -> tuple[float, float, float, float, float, float]:
    """One application of the first-order J2 element mapping.

    gamma2 > 0 maps mean to osculating, gamma2 < 0 osculating to mean.
    Input and output sets are (a, e, i, raan, argp, M).
    """
    f = true_from_mean(mean_anom, e)

    eta = math.sqrt(1.0 - e * e)
    gamma2p = gamma2 / eta**4
    a_r = (1.0 + e * math.cos(f)) / (eta * eta)

    ci = math.cos(i)
    ci2 = ci * ci
    si2 = 1.0 - ci2
    theta_den = 1.0 - 5.0 * ci2
    cf = math.cos(f)

    a_new = a + a * gamma2 * (
        (3.0 * ci2 - 1.0) * (a_r**3 - 1.0 / eta**3)
        + 3.0 * si2 * a_r**3 * math.cos(2.0 * argp + 2.0 * f)
    )

    de1 = (gamma2p / 8.0) * e * eta * eta * (
        1.0 - 11.0 * ci2 - 40.0 * ci2 * ci2 / theta_den
    ) * math.cos(2.0 * argp)

    de = de1 + (eta * eta / 2.0) * (
        gamma2 * (
            (3.0 * ci2 - 1.0) / eta**6
            * (e * eta + e / (1.0 + eta) + 3.0 * cf + 3.0 * e * cf**2 + e * e * cf**3)
            + 3.0 * si2 / eta**6
            * (e + 3.0 * cf + 3.0 * e * cf**2 + e * e * cf**3)
            * math.cos(2.0 * argp + 2.0 * f)
        )
        - gamma2p * si2
        * (3.0 * math.cos(2.0 * argp + f) + math.cos(2.0 * argp + 3.0 * f))
    )

    if si2 > 1e-18:
        di = (
            -e * de1 / (eta * eta * math.tan(i))
            + (gamma2p / 2.0) * ci * math.sqrt(si2)
            * (3.0 * math.cos(2.0 * argp + 2.0 * f)
               + 3.0 * e * math.cos(2.0 * argp + f)
               + e * math.cos(2.0 * argp + 3.0 * f))
        )
    else:
        di = 0.0

    equation_of_center = f - mean_anom + e * math.sin(f)

    sum_angles = mean_anom + argp + raan + gamma2p * (
        (eta**3 / 8.0) * (1.0 - 11.0 * ci2 - 40.0 * ci2 * ci2 / theta_den)
        - (1.0 / 16.0) * (
            2.0 + e * e
            - 11.0 * (2.0 + 3.0 * e * e) * ci2
            - 40.0 * (2.0 + 5.0 * e * e) * ci2 * ci2 / theta_den
            - 400.0 * e * e * ci2**3 / theta_den**2
        )
        + (1.0 / 4.0) * (
            -6.0 * theta_den * equation_of_center
            + (3.0 - 5.0 * ci2)
            * (3.0 * math.sin(2.0 * argp + 2.0 * f)
               + 3.0 * e * math.sin(2.0 * argp + f)
               + e * math.sin(2.0 * argp + 3.0 * f))
        )
        - (e * e * ci / 8.0) * (
            11.0 + 80.0 * ci2 / theta_den + 200.0 * ci2 * ci2 / theta_den**2
        )
        - (ci / 2.0) * (
            6.0 * equation_of_center
            - 3.0 * math.sin(2.0 * argp + 2.0 * f)
            - 3.0 * e * math.sin(2.0 * argp + f)
            - e * math.sin(2.0 * argp + 3.0 * f)
        )
    )

    e_dm = gamma2p * (
        (eta**3 / 8.0) * e * (1.0 - 11.0 * ci2 - 40.0 * ci2 * ci2 / theta_den)
        - (eta**3 / 4.0) * (
            2.0 * (3.0 * ci2 - 1.0) * (a_r * a_r * eta * eta + a_r + 1.0) * math.sin(f)
            + 3.0 * si2 * (
                (-a_r * a_r * eta * eta - a_r + 1.0) * math.sin(2.0 * argp + f)
                + (a_r * a_r * eta * eta + a_r + 1.0 / 3.0) * math.sin(2.0 * argp + 3.0 * f)
            )
        )
    )

    draan = gamma2p * (
        -(e * e * ci / 8.0) * (
            11.0 + 80.0 * ci2 / theta_den + 200.0 * ci2 * ci2 / theta_den**2
        )
        - (ci / 2.0) * (
            6.0 * equation_of_center
            - 3.0 * math.sin(2.0 * argp + 2.0 * f)
            - 3.0 * e * math.sin(2.0 * argp + f)
            - e * math.sin(2.0 * argp + 3.0 * f)
        )
    )

    # Compose through nonsingular pairs so e -> 0 and i -> 0 stay regular.
    d1 = (e + de) * math.sin(mean_anom) + e_dm * math.cos(mean_anom)
    d2 = (e + de) * math.cos(mean_anom) - e_dm * math.sin(mean_anom)
    m_new = wrap_to_2pi(math.atan2(d1, d2))
    e_new = math.hypot(d1, d2)

    half_i = 0.5 * i
    d3 = (math.sin(half_i) + math.cos(half_i) * 0.5 * di) * math.sin(raan) \
        + math.sin(half_i) * draan * math.cos(raan)
    d4 = (math.sin(half_i) + math.cos(half_i) * 0.5 * di) * math.cos(raan) \
        - math.sin(half_i) * draan * math.sin(raan)
    raan_new = wrap_to_2pi(math.atan2(d3, d4))
    i_new = 2.0 * math.asin(min(math.hypot(d3, d4), 1.0))
    argp_new = wrap_to_2pi(sum_angles - m_new - raan_new)

    return a_new, e_new, i_new, raan_new, argp_new, m_new


def _validate(oe: OrbitalElements) -> None:
    if oe.e >= _ECC_PARABOLIC_GUARD:
        raise ValueError(f"eccentricity {oe.e} is too close to parabolic")
    check_critical_inclination(oe.i)


def mean_to_osc(oe: OrbitalElements, constants: GravityConstants = EARTH) -> OrbitalElements:
    """Map mean elements to osculating elements (adds J2 periodic terms)."""
    if oe.flavor != "mean":
        raise ValueError("mean_to_osc expects mean-flavor elements")
    _validate(oe)
    gamma2 = 0.5 * constants.j2 * (constants.re / oe.a) ** 2
    m = mean_from_true(oe.ta, oe.e)
    a, e, i, raan, argp, m_osc = _first_order_map(
        oe.a, oe.e, oe.i, oe.raan, oe.argp, m, gamma2
    )
    return OrbitalElements(a=a, e=e, i=i, raan=raan, argp=argp,
                           ta=true_from_mean(m_osc, e), flavor="osculating")


def _pack(a: float, e: float, i: float, raan: float, argp: float,
          m: float) -> tuple[float, float, float, float, float, float]:
    """Element set to the nonsingular composition variables."""
    half = 0.5 * i
    return (a, e * math.sin(m), e * math.cos(m),
            math.sin(half) * math.sin(raan), math.sin(half) * math.cos(raan),
            wrap_to_2pi(m + argp + raan))


def _unpack(s) -> tuple[float, float, float, float, float, float]:
    a, h, k, p, q, c = s
    e = math.hypot(h, k)
    m = wrap_to_2pi(math.atan2(h, k)) if e > 0.0 else 0.0
    s_half = min(math.hypot(p, q), 1.0)
    i = 2.0 * math.asin(s_half)
    raan = wrap_to_2pi(math.atan2(p, q)) if s_half > 0.0 else 0.0
    argp = wrap_to_2pi(c - m - raan)
    return a, e, i, raan, argp, m


def osc_to_mean(oe: OrbitalElements, constants: GravityConstants = EARTH) -> OrbitalElements:
    """Map osculating elements to mean elements (removes J2 periodic terms).

    Seeds with the sign-flipped first-order map, then iterates
    mean <- mean + (osc - mean_to_osc(mean)) in the nonsingular composition
    variables (well conditioned at small e and i) until the residual is at
    floating-point level, so the round trip with :func:`mean_to_osc` is exact
    well inside the O(J2^2) truncation error.
    """
    if oe.flavor != "osculating":
        raise ValueError("osc_to_mean expects osculating-flavor elements")
    _validate(oe)
    gamma2 = -0.5 * constants.j2 * (constants.re / oe.a) ** 2
    m_osc = mean_from_true(oe.ta, oe.e)
    target = _pack(oe.a, oe.e, oe.i, oe.raan, oe.argp, m_osc)
    mean = _pack(*_first_order_map(oe.a, oe.e, oe.i, oe.raan, oe.argp, m_osc, gamma2))

    for _ in range(12):
        elements = _unpack(mean)
        gamma2_fwd = 0.5 * constants.j2 * (constants.re / elements[0]) ** 2
        forward = _pack(*_first_order_map(*elements, gamma2_fwd))
        residual = (
            target[0] - forward[0],
            target[1] - forward[1],
            target[2] - forward[2],
            target[3] - forward[3],
            target[4] - forward[4],
            wrap_to_pi(target[5] - forward[5]),
        )
        mean = tuple(m + r for m, r in zip(mean, residual))
        if (abs(residual[0]) < 1e-10
                and all(abs(x) < 1e-14 for x in residual[1:5])
                and abs(residual[5]) < 1e-12):
            break

    a, e, i, raan, argp, m_mean = _unpack(mean)
    return OrbitalElements(a=a, e=e, i=i, raan=raan, argp=argp,
                           ta=true_from_mean(m_mean, e), flavor="mean")
