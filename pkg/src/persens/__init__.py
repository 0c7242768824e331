"""Ensemble sensitivity and stopping-distance safety analytics."""

from .analytics import (
    GroupedCurve,
    SensitivityHeatmap,
    VerdictRow,
    VerdictTable,
    group_curves,
    pairwise_heatmaps,
    tabulate_verdicts,
)
from .ensemble import (
    DetectionRecord,
    EnsembleFrame,
    EnsembleTrace,
    build_trace,
    ensemble_frame,
    filter_confidence,
)
from .errors import PersensError, ValidationError
from .kinematics import StoppingProfile, stopping_distance_m, stopping_profile
from .safety import (
    Classification,
    SafetyParams,
    SafetyVerdict,
    SevereDrop,
    ViolationEvent,
    ViolationKind,
    check_temporal_consistency,
    classify,
    entry_distance,
    severe_drops,
)
from .scenarios import (
    AdversaryKind,
    AdversaryName,
    CampaignManifest,
    DistanceGrid,
    OcclusionLevel,
    ScenarioConfig,
    VehicleParams,
    WeatherConfig,
    baseline_manifest,
    baseline_scenario,
    expand,
    set1_manifest,
)
from .synth import (
    ModelProfile,
    default_profiles,
    detect,
    simulate_campaign,
)
from .units import (
    DistanceM,
    FrictionCoeff,
    MPH_TO_KMPH,
    Probability,
    ReactionTimeS,
    SpeedKmph,
    kmph_to_mph,
    mph_to_kmph,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryKind",
    "AdversaryName",
    "CampaignManifest",
    "Classification",
    "DetectionRecord",
    "DistanceGrid",
    "DistanceM",
    "EnsembleFrame",
    "EnsembleTrace",
    "FrictionCoeff",
    "GroupedCurve",
    "MPH_TO_KMPH",
    "ModelProfile",
    "OcclusionLevel",
    "PersensError",
    "Probability",
    "ReactionTimeS",
    "SafetyParams",
    "SafetyVerdict",
    "ScenarioConfig",
    "SensitivityHeatmap",
    "SevereDrop",
    "SpeedKmph",
    "StoppingProfile",
    "ValidationError",
    "VehicleParams",
    "VerdictRow",
    "VerdictTable",
    "ViolationEvent",
    "ViolationKind",
    "WeatherConfig",
    "baseline_manifest",
    "baseline_scenario",
    "build_trace",
    "check_temporal_consistency",
    "classify",
    "default_profiles",
    "detect",
    "ensemble_frame",
    "entry_distance",
    "expand",
    "filter_confidence",
    "group_curves",
    "kmph_to_mph",
    "mph_to_kmph",
    "pairwise_heatmaps",
    "set1_manifest",
    "severe_drops",
    "simulate_campaign",
    "stopping_distance_m",
    "stopping_profile",
    "tabulate_verdicts",
]
