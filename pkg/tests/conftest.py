"""Shared fixtures: the baseline orbit, scenario, and a cached mission run."""
import math
from pathlib import Path

import pytest

from rposim import EciState, OrbitalElements, SpacecraftParams, elements_to_cart

REPO_ROOT = Path(__file__).resolve().parent.parent
BASELINE_CONFIG = REPO_ROOT / "scenarios" / "baseline_mission.json"


@pytest.fixture(scope="session")
def baseline_elements() -> OrbitalElements:
    """Near-circular 35-degree LEO used throughout the scenario."""
    return OrbitalElements(a=6925.68, e=0.0019, i=math.radians(35.008),
                           raan=math.radians(3.006), argp=0.0, ta=0.0)


@pytest.fixture(scope="session")
def baseline_target_state(baseline_elements) -> EciState:
    return elements_to_cart(baseline_elements, epoch=0.0, mass=4.0)


@pytest.fixture(scope="session")
def spacecraft() -> SpacecraftParams:
    return SpacecraftParams()


@pytest.fixture(scope="session")
def baseline_scenario():
    from rposim.config import load_scenario

    scenario, _ = load_scenario(BASELINE_CONFIG)
    return scenario


@pytest.fixture(scope="session")
def mission_report(baseline_scenario):
    """One full baseline mission run shared by the slower checks."""
    from rposim.mission import run_mission

    return run_mission(baseline_scenario)
