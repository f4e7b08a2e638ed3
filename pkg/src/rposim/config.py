"""Scenario configuration: JSON schema, validation, and (de)serialization.

Configs are a single versioned JSON document. Angles are degrees and every
physical quantity carries its unit in the key name; the parser converts to
the radian/km/s internals. Unknown keys are rejected and every violation is
reported with its JSON path.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import jsonschema

from .blocks import Deadbands
from .mission import (
    DesiredRelativeElements,
    LatencyModel,
    MissionScenario,
    MissionSettings,
)
from .orbital import OrbitalElements, RelativeElements
from .propagator import DragConfig, ForceModelConfig, SpacecraftParams, SrpConfig

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid scenario configuration; ``errors`` lists every violation."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("\n".join(errors))


def _num(minimum: float | None = None, exclusive: bool = False) -> dict:
    out: dict[str, Any] = {"type": "number"}
    if minimum is not None:
        out["exclusiveMinimum" if exclusive else "minimum"] = minimum
    return out


def scenario_schema() -> dict:
    """JSON schema for scenario documents."""
    drag = {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "cd": _num(0.0, True),
            "area_m2": _num(0.0, True),
            "rho0_kgm3": _num(0.0, True),
            "h0_km": _num(),
            "scale_height_km": _num(0.0, True),
        },
    }
    srp = {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "cr": _num(0.0, True),
            "area_m2": _num(0.0, True),
            "p0_nm2": _num(0.0, True),
            "shadow": {"type": "boolean"},
        },
    }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "additionalProperties": False,
        "required": ["schema_version", "target"],
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "target": {
                "type": "object",
                "additionalProperties": False,
                "required": ["a_km", "e", "i_deg", "raan_deg", "argp_deg", "ta_deg"],
                "properties": {
                    "a_km": _num(0.0, True),
                    "e": {"type": "number", "minimum": 0.0, "exclusiveMaximum": 1.0},
                    "i_deg": {"type": "number", "minimum": 0.0, "maximum": 180.0},
                    "raan_deg": _num(),
                    "argp_deg": _num(),
                    "ta_deg": _num(),
                },
            },
            "separation": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "dv_mps": _num(0.0),
                    "direction_rsw": {
                        "type": "array",
                        "items": {"type": "number"},
                        "minItems": 3,
                        "maxItems": 3,
                    },
                    "delta_oe": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "da_km": _num(),
                            "de": _num(),
                            "di_deg": _num(),
                            "draan_deg": _num(),
                            "du_deg": _num(),
                        },
                    },
                },
            },
            "commissioning_days": _num(0.0),
            "circumnavigation_days": _num(0.0),
            "spacecraft": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "wet_mass_kg": _num(0.0, True),
                    "thrust_n": _num(0.0, True),
                    "isp_s": _num(0.0, True),
                    "total_impulse_ns": _num(0.0, True),
                    "max_firing_s": _num(0.0, True),
                },
            },
            "force_model": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "j2": {"type": "boolean"},
                    "drag": {"oneOf": [{"type": "null"}, drag]},
                    "srp": {"oneOf": [{"type": "null"}, srp]},
                },
            },
            "desired": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "delta_e": _num(0.0, True),
                    "delta_i_deg": _num(0.0, True),
                },
            },
            "deadbands": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "a_km": _num(0.0, True),
                    "raan_deg": _num(0.0, True),
                    "u_deg": _num(0.0, True),
                    "i_deg": _num(0.0, True),
                    "e": _num(0.0, True),
                },
            },
            "mission": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "approach_threshold_km": _num(0.0, True),
                    "phase_max_days": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "raan": _num(0.0, True),
                            "approach": _num(0.0, True),
                            "ellipse_setup": _num(0.0, True),
                        },
                    },
                },
            },
            "planner": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "firing_spacing_orbits": {"type": "integer", "minimum": 2},
                    "raan_max_coast_days": _num(0.0, True),
                    "u_max_coast_days": _num(0.0, True),
                    "max_series_firings": {"type": "integer", "minimum": 1},
                    "max_ops_per_block": {"type": "integer", "minimum": 1},
                },
            },
            "nav": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "period_min": _num(0.0),
                    "jitter_min": _num(0.0),
                    "seed": {"type": "integer", "minimum": 0},
                },
            },
            "integrator": {
                "type": "object",
                "additionalProperties": False,
                "properties": {"step_s": _num(0.0, True)},
            },
            "output": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "every_s": _num(0.0, True),
                    "elements_every_s": _num(0.0, True),
                },
            },
        },
    }


def validate_config(data: Any) -> list[str]:
    """All schema violations as "$.path: message" strings; empty when valid."""
    validator = jsonschema.Draft202012Validator(scenario_schema())
    errors = []
    for err in sorted(validator.iter_errors(data), key=lambda e: e.json_path):
        errors.append(f"{err.json_path}: {err.message}")
    if isinstance(data, dict):
        sep = data.get("separation", {})
        if "delta_oe" in sep and ("dv_mps" in sep or "direction_rsw" in sep):
            errors.append("$.separation: give either delta_oe or dv_mps/direction_rsw,"
                          " not both")
    return errors


_DEFAULT_ELEMENTS_EVERY_S = 900.0


def scenario_from_dict(data: dict) -> tuple[MissionScenario, float]:
    """Build a scenario from a validated config dict.

    Returns the scenario plus the elements.csv output cadence in seconds.
    Raises ConfigError listing every violation when the document is invalid.
    """
    errors = validate_config(data)
    if errors:
        raise ConfigError(errors)

    tgt = data["target"]
    target = OrbitalElements(
        a=tgt["a_km"], e=tgt["e"], i=math.radians(tgt["i_deg"]),
        raan=math.radians(tgt["raan_deg"]), argp=math.radians(tgt["argp_deg"]),
        ta=math.radians(tgt["ta_deg"]), flavor="osculating")

    sc_raw = data.get("spacecraft", {})
    spacecraft = SpacecraftParams(
        wet_mass_kg=sc_raw.get("wet_mass_kg", 4.0),
        thrust_n=sc_raw.get("thrust_n", 6.0e-3),
        isp_s=sc_raw.get("isp_s", 100.0),
        total_impulse_ns=sc_raw.get("total_impulse_ns", 270.0),
        max_firing_s=sc_raw.get("max_firing_s", 900.0))

    fm_raw = data.get("force_model", {})
    drag = fm_raw.get("drag")
    srp = fm_raw.get("srp")
    force_model = ForceModelConfig(
        j2_enabled=fm_raw.get("j2", True),
        drag=DragConfig(**drag) if drag else None,
        srp=SrpConfig(**srp) if srp else None)

    des_raw = data.get("desired", {})
    desired = DesiredRelativeElements(
        de=des_raw.get("delta_e", 0.001),
        di=math.radians(des_raw.get("delta_i_deg", 0.02)))

    db_raw = data.get("deadbands", {})
    deadbands = Deadbands(
        a_km=db_raw.get("a_km", 0.5),
        raan_rad=math.radians(db_raw.get("raan_deg", 0.02)),
        u_rad=math.radians(db_raw.get("u_deg", 0.1)),
        i_rad=math.radians(db_raw.get("i_deg", 0.002)),
        e=db_raw.get("e", 1.0e-4))

    mi_raw = data.get("mission", {})
    defaults = MissionSettings()
    settings = MissionSettings(
        approach_threshold_km=mi_raw.get("approach_threshold_km", 50.0),
        phase_max_days={**defaults.phase_max_days,
                        **mi_raw.get("phase_max_days", {})})

    sep = data.get("separation", {})
    delta_oe = None
    if "delta_oe" in sep:
        d = sep["delta_oe"]
        delta_oe = RelativeElements(
            da=d.get("da_km", 0.0), de=d.get("de", 0.0),
            di=math.radians(d.get("di_deg", 0.0)),
            draan=math.radians(d.get("draan_deg", 0.0)),
            du=math.radians(d.get("du_deg", 0.0)))

    nav_raw = data.get("nav", {})
    nav = LatencyModel(
        period_s=nav_raw.get("period_min", 175.0) * 60.0,
        jitter_s=nav_raw.get("jitter_min", 0.0) * 60.0,
        seed=nav_raw.get("seed", 0))

    pl = data.get("planner", {})
    scenario = MissionScenario(
        target_elements=target,
        spacecraft=spacecraft,
        force_model=force_model,
        desired=desired,
        deadbands=deadbands,
        settings=settings,
        separation_dv_mps=sep.get("dv_mps", 2.0),
        separation_direction_rsw=tuple(sep.get("direction_rsw", (0.0, 1.0, 0.0))),
        separation_delta=delta_oe,
        commissioning_days=data.get("commissioning_days", 30.0),
        circumnavigation_days=data.get("circumnavigation_days", 30.0),
        nav=nav,
        step_s=data.get("integrator", {}).get("step_s", 30.0),
        output_every_s=data.get("output", {}).get("every_s", 300.0),
        firing_spacing_orbits=pl.get("firing_spacing_orbits", 2),
        raan_max_coast_days=pl.get("raan_max_coast_days", 12.0),
        u_max_coast_days=pl.get("u_max_coast_days", 5.0),
        max_series_firings=pl.get("max_series_firings", 8),
        max_ops_per_block=pl.get("max_ops_per_block", 3),
    )
    elements_every = data.get("output", {}).get(
        "elements_every_s", _DEFAULT_ELEMENTS_EVERY_S)
    return scenario, elements_every


def scenario_to_dict(scenario: MissionScenario,
                     elements_every_s: float = _DEFAULT_ELEMENTS_EVERY_S) -> dict:
    """Full config dict (all defaults materialized) for a scenario."""
    t = scenario.target_elements
    fm = scenario.force_model
    sep: dict[str, Any]
    if scenario.separation_delta is not None:
        d = scenario.separation_delta
        sep = {"delta_oe": {
            "da_km": d.da, "de": d.de, "di_deg": math.degrees(d.di),
            "draan_deg": math.degrees(d.draan), "du_deg": math.degrees(d.du)}}
    else:
        sep = {"dv_mps": scenario.separation_dv_mps,
               "direction_rsw": list(scenario.separation_direction_rsw)}
    return {
        "schema_version": SCHEMA_VERSION,
        "target": {
            "a_km": t.a, "e": t.e, "i_deg": math.degrees(t.i),
            "raan_deg": math.degrees(t.raan), "argp_deg": math.degrees(t.argp),
            "ta_deg": math.degrees(t.ta)},
        "separation": sep,
        "commissioning_days": scenario.commissioning_days,
        "circumnavigation_days": scenario.circumnavigation_days,
        "spacecraft": {
            "wet_mass_kg": scenario.spacecraft.wet_mass_kg,
            "thrust_n": scenario.spacecraft.thrust_n,
            "isp_s": scenario.spacecraft.isp_s,
            "total_impulse_ns": scenario.spacecraft.total_impulse_ns,
            "max_firing_s": scenario.spacecraft.max_firing_s},
        "force_model": {
            "j2": fm.j2_enabled,
            "drag": None if fm.drag is None else {
                "cd": fm.drag.cd, "area_m2": fm.drag.area_m2,
                "rho0_kgm3": fm.drag.rho0_kgm3, "h0_km": fm.drag.h0_km,
                "scale_height_km": fm.drag.scale_height_km},
            "srp": None if fm.srp is None else {
                "cr": fm.srp.cr, "area_m2": fm.srp.area_m2,
                "p0_nm2": fm.srp.p0_nm2, "shadow": fm.srp.shadow}},
        "desired": {
            "delta_e": scenario.desired.de,
            "delta_i_deg": math.degrees(scenario.desired.di)},
        "deadbands": {
            "a_km": scenario.deadbands.a_km,
            "raan_deg": math.degrees(scenario.deadbands.raan_rad),
            "u_deg": math.degrees(scenario.deadbands.u_rad),
            "i_deg": math.degrees(scenario.deadbands.i_rad),
            "e": scenario.deadbands.e},
        "mission": {
            "approach_threshold_km": scenario.settings.approach_threshold_km,
            "phase_max_days": dict(scenario.settings.phase_max_days)},
        "planner": {
            "firing_spacing_orbits": scenario.firing_spacing_orbits,
            "raan_max_coast_days": scenario.raan_max_coast_days,
            "u_max_coast_days": scenario.u_max_coast_days,
            "max_series_firings": scenario.max_series_firings,
            "max_ops_per_block": scenario.max_ops_per_block},
        "nav": {
            "period_min": scenario.nav.period_s / 60.0,
            "jitter_min": scenario.nav.jitter_s / 60.0,
            "seed": scenario.nav.seed},
        "integrator": {"step_s": scenario.step_s},
        "output": {"every_s": scenario.output_every_s,
                   "elements_every_s": elements_every_s},
    }


def load_scenario(path: str | Path) -> tuple[MissionScenario, float]:
    """Load and validate a scenario JSON file."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"config file not found: {p}")
    with p.open() as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"$: not valid JSON: {exc}"]) from exc
    return scenario_from_dict(data)


def baseline_scenario_dict() -> dict:
    """The bundled mission: near-circular 35-degree LEO, deployer separation
    fitted to a +2.65 km altitude and 4.3e-4 eccentricity-vector offset,
    30-day commissioning, 30-day circumnavigation."""
    return {
        "schema_version": SCHEMA_VERSION,
        "target": {
            "a_km": 6925.68, "e": 0.0019, "i_deg": 35.008,
            "raan_deg": 3.006, "argp_deg": 0.0, "ta_deg": 0.0},
        "separation": {
            "dv_mps": 2.0789,
            "direction_rsw": [0.715948, 0.698153, 0.0]},
        "commissioning_days": 30.0,
        "circumnavigation_days": 30.0,
        "spacecraft": {
            "wet_mass_kg": 4.0, "thrust_n": 0.006, "isp_s": 100.0,
            "total_impulse_ns": 270.0, "max_firing_s": 900.0},
        "force_model": {"j2": True, "drag": None, "srp": None},
        "desired": {"delta_e": 0.001, "delta_i_deg": 0.02},
        "deadbands": {
            "a_km": 0.5, "raan_deg": 0.02, "u_deg": 0.1, "i_deg": 0.002,
            "e": 0.0001},
        "mission": {
            "approach_threshold_km": 50.0,
            "phase_max_days": {"raan": 30.0, "approach": 12.0,
                               "ellipse_setup": 12.0}},
        "planner": {
            "firing_spacing_orbits": 2,
            "raan_max_coast_days": 12.0,
            "u_max_coast_days": 5.0,
            "max_series_firings": 8,
            "max_ops_per_block": 3},
        "nav": {"period_min": 175.0, "jitter_min": 0.0, "seed": 42},
        "integrator": {"step_s": 30.0},
        "output": {"every_s": 300.0, "elements_every_s": 900.0},
    }
