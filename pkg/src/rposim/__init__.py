"""CubeSat rendezvous and proximity operations simulator.

A library plus CLI that flies a single-thruster chaser CubeSat from deployer
separation to a passively safe circumnavigation ellipse around an
uncooperative target, targeting mean orbit elements through four maneuver
blocks under electric-propulsion duty-cycle and navigation-latency
constraints.
"""

from .orbital import (
    EARTH,
    EciState,
    GravityConstants,
    OrbitalElements,
    RelativeElements,
    RelativeState,
    RswFrame,
    cart_to_elements,
    eci_to_relative,
    elements_to_cart,
    relative_to_eci,
    rsw_frame,
)
from .meanelements import SecularRates, mean_to_osc, osc_to_mean, secular_rates
from .relmotion import (
    CwContext,
    EllipseGeometry,
    cw_propagate,
    design_safety_ellipse,
    design_walking_safety_ellipse,
    is_static_ellipse,
    measure_ellipse,
    relative_elements_to_geometry,
)
from .propagator import (
    DragConfig,
    ForceModelConfig,
    PropagationResult,
    ScheduleError,
    SpacecraftParams,
    SrpConfig,
    ThrustSegment,
    acceleration,
    propagate,
    validate_schedule,
)
from .blocks import (
    Deadbands,
    EccOpParams,
    FiringSchedule,
    PlannerError,
    PlannerParams,
    plan_arglat_correction,
    plan_eccentricity_correction,
    plan_inclination_correction,
    plan_raan_correction,
    predict_effect,
    size_eccentricity_operations,
)
from .mission import (
    DesiredRelativeElements,
    LatencyModel,
    MissionPhase,
    MissionReport,
    MissionScenario,
    NavUpdate,
    delta_v_ledger,
    navigation,
    run_mission,
    step_phase,
)

__version__ = "0.1.0"

__all__ = [
    "EARTH",
    "EciState",
    "GravityConstants",
    "OrbitalElements",
    "RelativeElements",
    "RelativeState",
    "RswFrame",
    "cart_to_elements",
    "eci_to_relative",
    "elements_to_cart",
    "relative_to_eci",
    "rsw_frame",
    "SecularRates",
    "mean_to_osc",
    "osc_to_mean",
    "secular_rates",
    "CwContext",
    "EllipseGeometry",
    "cw_propagate",
    "design_safety_ellipse",
    "design_walking_safety_ellipse",
    "is_static_ellipse",
    "measure_ellipse",
    "relative_elements_to_geometry",
    "DragConfig",
    "ForceModelConfig",
    "PropagationResult",
    "ScheduleError",
    "SpacecraftParams",
    "SrpConfig",
    "ThrustSegment",
    "acceleration",
    "propagate",
    "validate_schedule",
    "Deadbands",
    "EccOpParams",
    "FiringSchedule",
    "PlannerError",
    "PlannerParams",
    "plan_arglat_correction",
    "plan_eccentricity_correction",
    "plan_inclination_correction",
    "plan_raan_correction",
    "predict_effect",
    "size_eccentricity_operations",
    "DesiredRelativeElements",
    "LatencyModel",
    "MissionPhase",
    "MissionReport",
    "MissionScenario",
    "NavUpdate",
    "delta_v_ledger",
    "navigation",
    "run_mission",
    "step_phase",
    "__version__",
]
