"""Delimited and JSON run artifacts.

All CSV files have a fixed column order, one header row, RFC-4180 framing
(numeric cells never need quoting), and 12 significant digits. Runs with the
same config and seed reproduce these files byte for byte.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .mission import MissionReport, delta_v_ledger
from .meanelements import osc_to_mean
from .orbital import GravityConstants, RelativeElements, cart_to_elements
from .propagator import PropagationResult


def fmt(value: float) -> str:
    """12-significant-digit decimal rendering."""
    return format(float(value), ".12g")


STATES_COLUMNS = [
    "t_s",
    "target_rx_km", "target_ry_km", "target_rz_km",
    "target_vx_kmps", "target_vy_kmps", "target_vz_kmps",
    "chaser_rx_km", "chaser_ry_km", "chaser_rz_km",
    "chaser_vx_kmps", "chaser_vy_kmps", "chaser_vz_kmps",
    "rel_x_km", "rel_y_km", "rel_z_km",
    "chaser_mass_kg",
]

_ELEMENT_COLS = ["a_km", "e", "i_deg", "raan_deg", "argp_deg", "ta_deg"]
ELEMENTS_COLUMNS = (
    ["t_s"]
    + [f"target_osc_{c}" for c in _ELEMENT_COLS]
    + [f"target_mean_{c}" for c in _ELEMENT_COLS]
    + [f"chaser_osc_{c}" for c in _ELEMENT_COLS]
    + [f"chaser_mean_{c}" for c in _ELEMENT_COLS]
    + ["delta_a_km", "delta_e", "delta_i_deg", "delta_raan_deg", "delta_u_deg"]
)

SCHEDULE_COLUMNS = [
    "phase", "block", "segment_index", "t_start_s", "t_end_s", "duration_s",
    "direction", "thrust_n",
]


def write_states_csv(report: MissionReport, path: Path) -> None:
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(STATES_COLUMNS)
        for k in range(len(report.t)):
            rel = report.relative_state(k)
            row = [report.t[k],
                   *report.r_target[k], *report.v_target[k],
                   *report.r_chaser[k], *report.v_chaser[k],
                   rel.x, rel.y, rel.z,
                   report.chaser_mass[k]]
            w.writerow([fmt(x) for x in row])


def _element_cells(oe) -> list[float]:
    return [oe.a, oe.e, math.degrees(oe.i), math.degrees(oe.raan),
            math.degrees(oe.argp), math.degrees(oe.ta)]


def _elements_row(t, target_state, chaser_state, constants) -> list[str]:
    t_osc = cart_to_elements(target_state, constants)
    c_osc = cart_to_elements(chaser_state, constants)
    t_mean = osc_to_mean(t_osc, constants)
    c_mean = osc_to_mean(c_osc, constants)
    delta = RelativeElements.between(c_mean, t_mean)
    row = ([t] + _element_cells(t_osc) + _element_cells(t_mean)
           + _element_cells(c_osc) + _element_cells(c_mean)
           + [delta.da, delta.de, math.degrees(delta.di),
              math.degrees(delta.draan), math.degrees(delta.du)])
    return [fmt(x) for x in row]


def write_elements_csv(report: MissionReport, path: Path,
                       every_s: float = 900.0) -> None:
    constants = report.scenario.constants
    stride = max(1, round(every_s / report.scenario.output_every_s))
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(ELEMENTS_COLUMNS)
        indices = list(range(0, len(report.t), stride))
        if indices and indices[-1] != len(report.t) - 1:
            indices.append(len(report.t) - 1)
        for k in indices:
            w.writerow(_elements_row(report.t[k], report.target_state(k),
                                     report.chaser_state(k), constants))


def write_elements_csv_from_result(result: PropagationResult, path: Path,
                                   constants: GravityConstants,
                                   every_s: float = 900.0) -> None:
    """Element history of a plain propagation (no mission context)."""
    if len(result.t) > 1:
        sample_dt = float(result.t[1] - result.t[0])
        stride = max(1, round(every_s / sample_dt))
    else:
        stride = 1
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(ELEMENTS_COLUMNS)
        for k in range(0, len(result.t), stride):
            w.writerow(_elements_row(result.t[k], result.target_state(k),
                                     result.chaser_state(k), constants))


def write_schedule_csv(report: MissionReport, path: Path) -> None:
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SCHEDULE_COLUMNS)
        for rec in report.schedules:
            for k, seg in enumerate(rec.segments):
                w.writerow([rec.phase, rec.block_label, k,
                            fmt(seg.t_start), fmt(seg.t_end), fmt(seg.duration),
                            seg.direction, fmt(seg.thrust_n)])


def report_summary(report: MissionReport) -> dict:
    """JSON-ready mission summary."""
    ledger = delta_v_ledger(report)
    final_delta = report.final_delta
    geometry = report.final_geometry
    return {
        "schema_version": 1,
        "abort": report.abort,
        "phases": [
            {"name": p.name, "t_start_s": p.t_start, "t_end_s": p.t_end,
             "delta_v_mps": p.delta_v_mps, "n_firings": p.n_firings}
            for p in report.phases
        ],
        "delta_v_by_phase_mps": ledger,
        "total_delta_v_mps": report.total_delta_v_mps,
        "propellant_used_kg": report.propellant_used_kg,
        "n_firings": sum(p.n_firings for p in report.phases),
        "separation_dv_rsw_mps": list(report.separation_dv_rsw_mps),
        "final_delta_oe": None if final_delta is None else {
            "da_km": final_delta.da,
            "de": final_delta.de,
            "di_deg": math.degrees(final_delta.di),
            "draan_deg": math.degrees(final_delta.draan),
            "du_deg": math.degrees(final_delta.du),
        },
        "final_geometry_km": None if geometry is None else {
            "radial_extent": geometry.radial_extent,
            "alongtrack_extent": geometry.alongtrack_extent,
            "crosstrack_extent": geometry.crosstrack_extent,
            "center_y": geometry.center_y,
            "center_drift_rate_km_per_period": geometry.center_drift_rate,
        },
        "events": [[t, label] for t, label in report.events],
        "files": {
            "states": "states.csv",
            "elements": "elements.csv",
            "schedule": "schedule.csv",
        },
    }


def write_report_json(report: MissionReport, path: Path) -> None:
    with path.open("w") as f:
        json.dump(report_summary(report), f, indent=2, sort_keys=True)
        f.write("\n")


def write_mission_artifacts(report: MissionReport, out_dir: Path,
                            elements_every_s: float = 900.0) -> list[Path]:
    """Write the full artifact set; returns the paths written."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, writer in (
        ("states.csv", lambda p: write_states_csv(report, p)),
        ("elements.csv", lambda p: write_elements_csv(report, p, elements_every_s)),
        ("schedule.csv", lambda p: write_schedule_csv(report, p)),
        ("report.json", lambda p: write_report_json(report, p)),
    ):
        path = out_dir / name
        writer(path)
        paths.append(path)
    return paths
