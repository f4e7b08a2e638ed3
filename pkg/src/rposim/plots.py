"""Figure rendering for mission reports and element histories.

Figures are rendered headless to PNG files next to the delimited outputs.
They summarize what the CSVs contain; the CSVs remain the authoritative,
byte-stable artifacts.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .meanelements import osc_to_mean  # noqa: E402
from .mission import MissionReport  # noqa: E402
from .orbital import GravityConstants, cart_to_elements  # noqa: E402
from .propagator import PropagationResult  # noqa: E402

_DAY = 86400.0
_PHASE_COLORS = {
    "commissioning": "0.75",
    "raan": "tab:red",
    "approach": "tab:green",
    "ellipse_setup": "tab:blue",
    "circumnavigation": "tab:cyan",
}
_AXIS_SIGNS = {"+R": ("R", 1), "-R": ("R", -1), "+S": ("S", 1), "-S": ("S", -1),
               "+W": ("W", 1), "-W": ("W", -1)}


def _phase_spans(ax, report: MissionReport) -> None:
    for p in report.phases:
        ax.axvspan(p.t_start / _DAY, p.t_end / _DAY,
                   color=_PHASE_COLORS.get(p.name, "0.9"), alpha=0.12)


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_relative_distance(report: MissionReport, path: Path) -> Path:
    """Radial, along-track, cross-track separation over the mission."""
    days = report.t / _DAY
    rel = np.array([[s.x, s.y, s.z] for s in
                    (report.relative_state(k) for k in range(len(report.t)))])
    fig, axes = plt.subplots(3, 1, figsize=(9, 7), sharex=True)
    for ax, col, label in zip(axes, rel.T, ("radial x", "along-track y",
                                            "cross-track z")):
        ax.plot(days, col, lw=0.7)
        ax.set_ylabel(f"{label} [km]")
        ax.grid(True, alpha=0.3)
        _phase_spans(ax, report)
    axes[-1].set_xlabel("time [days]")
    fig.suptitle("Relative distance in the target frame")
    fig.tight_layout()
    return _save(fig, path)


def plot_thrust_profile(report: MissionReport, path: Path) -> Path:
    """Signed commanded thrust per chaser axis."""
    fig, axes = plt.subplots(3, 1, figsize=(9, 6), sharex=True, sharey=True)
    axis_rows = {"R": axes[0], "S": axes[1], "W": axes[2]}
    for rec in report.schedules:
        for seg in rec.segments:
            name, sign = _AXIS_SIGNS[seg.direction]
            axis_rows[name].plot(
                [seg.t_start / _DAY, seg.t_start / _DAY, seg.t_end / _DAY,
                 seg.t_end / _DAY],
                [0.0, sign * seg.thrust_n * 1e3, sign * seg.thrust_n * 1e3, 0.0],
                color="tab:red", lw=1.0)
    for name, ax in axis_rows.items():
        ax.set_ylabel(f"F_{name} [mN]")
        ax.grid(True, alpha=0.3)
        _phase_spans(ax, report)
    axes[-1].set_xlabel("time [days]")
    fig.suptitle("Commanded thrust (chaser frame)")
    fig.tight_layout()
    return _save(fig, path)


def _mean_delta_series(report: MissionReport, max_points: int = 1500):
    stride = max(1, len(report.t) // max_points)
    ks = list(range(0, len(report.t), stride))
    days = np.array([report.t[k] for k in ks]) / _DAY
    deltas = [report.mean_delta_at(k) for k in ks]
    return days, deltas


def plot_delta_elements(report: MissionReport, path: Path) -> Path:
    """Relative mean elements against their targets."""
    days, deltas = _mean_delta_series(report)
    desired = report.scenario.desired
    panels = [
        ("delta a [km]", [d.da for d in deltas], 0.0),
        ("delta u [deg]", [math.degrees(d.du) for d in deltas], 0.0),
        ("delta i [deg]", [math.degrees(d.di) for d in deltas],
         math.degrees(desired.di)),
        ("delta e", [d.de for d in deltas], desired.de),
    ]
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    for ax, (label, series, target) in zip(axes.flat, panels):
        ax.plot(days, series, lw=0.8)
        ax.axhline(target, color="k", ls="--", lw=0.8, label="desired")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        _phase_spans(ax, report)
    for ax in axes[-1]:
        ax.set_xlabel("time [days]")
    axes.flat[0].legend(loc="best", fontsize=8)
    fig.suptitle("Relative mean orbit elements")
    fig.tight_layout()
    return _save(fig, path)


def plot_delta_v(report: MissionReport, path: Path) -> Path:
    """Cumulative delta-v with the budget line."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(report.t / _DAY, report.delta_v_mps, lw=1.2)
    ax.axhline(report.scenario.spacecraft.dv_capacity_mps, color="k", ls="--",
               lw=0.8, label="budget")
    ax.set_xlabel("time [days]")
    ax.set_ylabel("delta-v used [m/s]")
    ax.grid(True, alpha=0.3)
    _phase_spans(ax, report)
    ax.legend(loc="lower right", fontsize=8)
    fig.suptitle("Propulsion usage")
    fig.tight_layout()
    return _save(fig, path)


def plot_relative_trajectory(report: MissionReport, path: Path) -> Path:
    """3D relative trajectory colored by mission phase."""
    fig = plt.figure(figsize=(8, 7))
    ax = fig.add_subplot(111, projection="3d")
    rel = np.array([[s.x, s.y, s.z] for s in
                    (report.relative_state(k) for k in range(len(report.t)))])
    for p in report.phases:
        sel = (report.t >= p.t_start) & (report.t <= p.t_end)
        if not np.any(sel):
            continue
        ax.plot(rel[sel, 0], rel[sel, 1], rel[sel, 2], lw=0.7,
                color=_PHASE_COLORS.get(p.name, "0.5"), label=p.name)
    ax.scatter([0.0], [0.0], [0.0], color="red", s=25, label="target")
    ax.set_xlabel("radial x [km]")
    ax.set_ylabel("along-track y [km]")
    ax.set_zlabel("cross-track z [km]")
    ax.legend(loc="upper left", fontsize=7)
    fig.suptitle("Relative trajectory")
    fig.tight_layout()
    return _save(fig, path)


def render_mission_figures(report: MissionReport, out_dir: Path) -> list[Path]:
    """Render the mission figure set; returns the paths written."""
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        plot_relative_distance(report, out_dir / "relative_distance.png"),
        plot_thrust_profile(report, out_dir / "thrust_profile.png"),
        plot_delta_elements(report, out_dir / "delta_elements.png"),
        plot_delta_v(report, out_dir / "delta_v.png"),
        plot_relative_trajectory(report, out_dir / "relative_trajectory.png"),
    ]


def plot_element_history(result: PropagationResult, path: Path,
                         constants: GravityConstants,
                         max_points: int = 2000) -> Path:
    """Osculating vs mean eccentricity and inclination of the target."""
    stride = max(1, len(result.t) // max_points)
    ks = range(0, len(result.t), stride)
    days, e_osc, e_mean, i_osc, i_mean = [], [], [], [], []
    for k in ks:
        osc = cart_to_elements(result.target_state(k), constants)
        mean = osc_to_mean(osc, constants)
        days.append(result.t[k] / _DAY)
        e_osc.append(osc.e)
        e_mean.append(mean.e)
        i_osc.append(math.degrees(osc.i))
        i_mean.append(math.degrees(mean.i))
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    axes[0].plot(days, e_osc, lw=0.6, label="osculating")
    axes[0].plot(days, e_mean, lw=1.2, label="mean")
    axes[0].set_xlabel("time [days]")
    axes[0].set_ylabel("eccentricity")
    axes[1].plot(days, i_osc, lw=0.6, label="osculating")
    axes[1].plot(days, i_mean, lw=1.2, label="mean")
    axes[1].set_xlabel("time [days]")
    axes[1].set_ylabel("inclination [deg]")
    for ax in axes:
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.suptitle("Osculating and mean orbit elements")
    fig.tight_layout()
    return _save(fig, path)
