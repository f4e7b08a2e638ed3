"""Command-line runner.

Subcommands:

* ``run-mission``: execute a full scenario; write states.csv, elements.csv,
  schedule.csv, report.json, and the figure set into the output directory.
* ``propagate``: unforced propagation of the scenario's spacecraft; write
  elements.csv (and optionally the osculating-vs-mean figure).
* ``plan-block``: plan a single maneuver block against the scenario's
  initial orbit, print it, and optionally execute it against the truth
  propagator.

The output directory comes from --out, then the RPO_OUT_DIR environment
variable, then ./out. Exit codes: 0 success, 2 configuration error,
3 mission or planner abort, 4 I/O error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rposim",
        description="CubeSat rendezvous and proximity operations simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run-mission", help="run a full mission scenario")
    run.add_argument("--config", required=True, help="scenario JSON file")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--no-plots", action="store_true",
                     help="skip figure rendering")

    prop = sub.add_parser("propagate", help="unforced propagation")
    prop.add_argument("--config", required=True, help="scenario JSON file")
    prop.add_argument("--days", required=True, type=float,
                      help="propagation span in days")
    prop.add_argument("--no-thrust", action="store_true",
                      help="explicit no-op: propagation never fires the thruster")
    prop.add_argument("--out", default=None, help="output directory")
    prop.add_argument("--plots", action="store_true",
                      help="also render the element-history figure")

    plan = sub.add_parser("plan-block", help="plan one maneuver block")
    plan.add_argument("--block", required=True, choices=["raan", "u", "i", "e"])
    plan.add_argument("--config", required=True, help="scenario JSON file")
    plan.add_argument("--delta", required=True, type=float,
                      help="correction size: degrees for raan/u/i, "
                           "dimensionless for e")
    plan.add_argument("--execute", action="store_true",
                      help="propagate the plan and report the measured effect")
    return parser


def _out_dir(arg: str | None) -> Path:
    if arg:
        return Path(arg)
    env = os.environ.get("RPO_OUT_DIR")
    return Path(env) if env else Path("out")


def _load(config_path: str):
    from .config import ConfigError, load_scenario

    try:
        return load_scenario(config_path), None
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_CONFIG
    except ConfigError as exc:
        print("error: invalid configuration:", file=sys.stderr)
        for line in exc.errors:
            print(f"  {line}", file=sys.stderr)
        return None, EXIT_CONFIG


def _cmd_run_mission(args) -> int:
    loaded, code = _load(args.config)
    if loaded is None:
        return code
    scenario, elements_every = loaded

    from .mission import run_mission
    from .outputs import write_mission_artifacts
    from .plots import render_mission_figures

    report = run_mission(scenario)
    out = _out_dir(args.out)
    try:
        paths = write_mission_artifacts(report, out, elements_every)
        if not args.no_plots:
            paths += render_mission_figures(report, out)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    for p in report.phases:
        print(f"{p.name:16s} {p.t_start / 86400.0:7.2f} -> "
              f"{p.t_end / 86400.0:7.2f} days  dv {p.delta_v_mps:6.2f} m/s  "
              f"firings {p.n_firings}")
    print(f"total delta-v {report.total_delta_v_mps:.2f} m/s, "
          f"propellant {report.propellant_used_kg * 1e3:.1f} g")
    print(f"artifacts in {out}")
    if report.abort is not None:
        print(f"mission aborted: {report.abort}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def _cmd_propagate(args) -> int:
    loaded, code = _load(args.config)
    if loaded is None:
        return code
    scenario, elements_every = loaded
    if args.days < 0:
        print("error: --days must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG

    from .mission import apply_separation
    from .orbital import elements_to_cart
    from .outputs import write_elements_csv_from_result
    from .propagator import propagate

    constants = scenario.constants
    target0 = elements_to_cart(scenario.target_elements, constants, epoch=0.0,
                               mass=scenario.spacecraft.wet_mass_kg)
    chaser0 = apply_separation(target0, scenario.separation_dv_mps,
                               scenario.separation_direction_rsw,
                               scenario.spacecraft.wet_mass_kg)
    out = _out_dir(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.days == 0.0:
        # Degenerate request: emit the header only.
        from .outputs import ELEMENTS_COLUMNS
        try:
            with (out / "elements.csv").open("w", newline="") as f:
                f.write(",".join(ELEMENTS_COLUMNS) + "\r\n")
        except OSError as exc:
            print(f"error: cannot write outputs: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"artifacts in {out}")
        return EXIT_OK

    record_every = max(1, round(scenario.output_every_s / scenario.step_s))
    result = propagate(target0, chaser0, [], scenario.force_model,
                       scenario.spacecraft, (0.0, args.days * 86400.0),
                       scenario.step_s, constants, record_every=record_every)
    try:
        write_elements_csv_from_result(result, out / "elements.csv", constants,
                                       every_s=min(elements_every,
                                                   scenario.output_every_s))
        if args.plots:
            from .plots import plot_element_history
            plot_element_history(result, out / "elements_history.png", constants)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"propagated {args.days} days, artifacts in {out}")
    return EXIT_OK


def _cmd_plan_block(args) -> int:
    loaded, code = _load(args.config)
    if loaded is None:
        return code
    scenario, _ = loaded

    from .blocks import (
        PlannerError,
        plan_arglat_correction,
        plan_eccentricity_correction,
        plan_inclination_correction,
        plan_raan_correction,
    )
    from .meanelements import osc_to_mean
    from .orbital import RelativeElements, cart_to_elements, elements_to_cart
    from .propagator import propagate

    constants = scenario.constants
    target0 = elements_to_cart(scenario.target_elements, constants, epoch=0.0,
                               mass=scenario.spacecraft.wet_mass_kg)
    chaser0 = target0  # block demonstrations start from the co-orbiting state
    chaser_mean = osc_to_mean(cart_to_elements(chaser0, constants), constants)
    params = scenario.planner_params(scenario.spacecraft.wet_mass_kg)
    value = args.delta

    # The requested correction becomes the block's full error to remove.
    if args.block == "raan":
        delta = RelativeElements(draan=math.radians(value))
        planner = plan_raan_correction
    elif args.block == "u":
        delta = RelativeElements(du=math.radians(value))
        planner = plan_arglat_correction
    elif args.block == "i":
        delta = RelativeElements(di=params.desired.di - math.radians(value))
        planner = plan_inclination_correction
    else:
        delta = RelativeElements(de=params.desired.de - value)
        planner = plan_eccentricity_correction

    try:
        schedule = planner(delta, chaser_mean, params, 0.0)
    except PlannerError as exc:
        print(f"planner error: {exc}", file=sys.stderr)
        return EXIT_ABORT

    if schedule.is_empty:
        print(f"block {schedule.block_label}: correction below the deadband, "
              "empty schedule")
        return EXIT_OK

    print(f"block {schedule.block_label}: {len(schedule)} firings, "
          f"impulse {schedule.total_impulse_ns:.2f} N s, span "
          f"{(schedule.t_end - schedule.t_start) / 86400.0:.2f} days")
    print(f"{'#':>3} {'t_start_s':>12} {'t_end_s':>12} {'dur_s':>7} dir")
    for k, seg in enumerate(schedule.segments):
        print(f"{k:>3} {seg.t_start:12.1f} {seg.t_end:12.1f} "
              f"{seg.duration:7.1f} {seg.direction}")

    def describe(tag: str, d: RelativeElements) -> None:
        print(f"{tag}: da {d.da:+.3f} km, de {d.de:+.6f}, "
              f"di {math.degrees(d.di):+.4f} deg, "
              f"draan {math.degrees(d.draan):+.4f} deg, "
              f"du {math.degrees(d.du):+.4f} deg")

    describe("predicted effect", schedule.predicted)

    if args.execute:
        result = propagate(target0, chaser0, list(schedule.segments),
                           scenario.force_model, scenario.spacecraft,
                           (0.0, schedule.t_end + 600.0), scenario.step_s,
                           constants, record_every=100)
        before = RelativeElements.between(chaser_mean, chaser_mean)
        after = RelativeElements.between(
            osc_to_mean(cart_to_elements(result.final_chaser, constants), constants),
            osc_to_mean(cart_to_elements(result.final_target, constants), constants))
        measured = RelativeElements(
            da=after.da - before.da, de=after.de - before.de,
            di=after.di - before.di, draan=after.draan - before.draan,
            du=after.du - before.du)
        describe("measured effect", measured)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run-mission": _cmd_run_mission,
        "propagate": _cmd_propagate,
        "plan-block": _cmd_plan_block,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
