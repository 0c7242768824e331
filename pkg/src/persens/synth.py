"""Synthetic detector ensemble with a parametric distance/weather response.

Each model profile responds to distance through a logistic curve and to the
environment through multiplicative degradation factors.  Profiles differ in
both their distance response and their sensitivity to each stressor, so a
degraded scene drives the ensemble apart instead of merely scaling it down.

The noise path is keyed: the random state for a record is derived from
(seed, scenario, model, distance), so any subset of a campaign replays
bit-identically in any order and at any parallelism.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .ensemble import DetectionRecord
from .errors import EnsembleSizeError, ValidationError
from .scenarios import OcclusionLevel, ScenarioConfig, WeatherConfig
from .units import Probability

#: Sun azimuth (degrees) straight into the approaching camera.
GLARE_AZIMUTH_DEG = 180.0
#: Half-width of the azimuth band in which glare applies.
GLARE_HALF_WIDTH_DEG = 20.0
#: Glare needs the sun low on the horizon.
GLARE_MAX_ALTITUDE_DEG = 15.0
#: Low-light penalty fades out once the sun is this high.
LOWLIGHT_CUTOFF_ALTITUDE_DEG = 10.0


def logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass(frozen=True)
class ModelProfile:
    """Response parameters for one synthetic detector.

    ``p_max`` bounds the confidence; the logistic midpoint sits at ``d50_m``
    with steepness ``slope_per_m``.  The ``*_sensitivity`` coefficients are
    exponential decay rates against each normalised stressor; occlusion is a
    direct multiplier per level.
    """

    model: str
    p_max: float
    d50_m: float
    slope_per_m: float
    fog_sensitivity: float
    precip_sensitivity: float
    cloud_sensitivity: float
    lowlight_sensitivity: float
    glare_sensitivity: float
    occlusion_penalty: Mapping[OcclusionLevel, float]
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        if not self.model:
            raise ValidationError("model must be non-empty")
        Probability(self.p_max)
        if self.p_max <= 0.0:
            raise ValidationError(f"p_max must be > 0, got {self.p_max}")
        if self.d50_m <= 0.0:
            raise ValidationError(f"d50_m must be > 0, got {self.d50_m}")
        if self.slope_per_m <= 0.0:
            raise ValidationError(f"slope_per_m must be > 0, got {self.slope_per_m}")
        for name in (
            "fog_sensitivity",
            "precip_sensitivity",
            "cloud_sensitivity",
            "lowlight_sensitivity",
            "glare_sensitivity",
        ):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"{name} must be >= 0")
        penalties = dict(self.occlusion_penalty)
        missing = [lv.value for lv in OcclusionLevel if lv not in penalties]
        if missing:
            raise ValidationError(f"occlusion_penalty missing levels: {missing}")
        for level, p in penalties.items():
            if not 0.0 <= p <= 1.0:
                raise ValidationError(
                    f"occlusion penalty for {level.value} must be in [0, 1], got {p}"
                )
        order = (
            OcclusionLevel.NO_OCCLUSION,
            OcclusionLevel.LOW,
            OcclusionLevel.MODERATE,
            OcclusionLevel.HIGH,
        )
        for better, worse in zip(order, order[1:]):
            if penalties[worse] > penalties[better]:
                raise ValidationError(
                    "occlusion penalties must not increase with occlusion level"
                )
        object.__setattr__(self, "occlusion_penalty", penalties)
        if self.noise_sigma < 0.0:
            raise ValidationError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


def lowlight_exposure(sun_altitude_deg: float) -> float:
    """Normalised low-light exposure: 0 above the cutoff, growing as the sun sinks."""
    return max(0.0, LOWLIGHT_CUTOFF_ALTITUDE_DEG - sun_altitude_deg) / 100.0


def glare_alignment(sun_azimuth_deg: float, sun_altitude_deg: float) -> float:
    """Normalised glare alignment in [0, 1]; non-zero only for a low sun
    within the azimuth band facing the camera."""
    if sun_altitude_deg >= GLARE_MAX_ALTITUDE_DEG:
        return 0.0
    offset = abs(sun_azimuth_deg - GLARE_AZIMUTH_DEG)
    return max(0.0, 1.0 - offset / GLARE_HALF_WIDTH_DEG)


def degradation_factor(
    profile: ModelProfile, weather: WeatherConfig, occlusion: OcclusionLevel
) -> float:
    """Multiplicative visibility factor in (0, 1] for one model in one scene."""
    decay = (
        profile.fog_sensitivity * weather.fog_density
        + profile.precip_sensitivity * weather.precipitation
        + profile.cloud_sensitivity * weather.cloudiness
    ) / 100.0
    decay += profile.lowlight_sensitivity * lowlight_exposure(weather.sun_altitude)
    decay += profile.glare_sensitivity * glare_alignment(
        weather.sun_azimuth, weather.sun_altitude
    )
    return math.exp(-decay) * profile.occlusion_penalty[occlusion]


def record_seed(seed: int, scenario_id: str, model: str, distance_m: float) -> int:
    """Stable 64-bit seed for one (campaign seed, scenario, model, distance)."""
    key = f"{seed}|{scenario_id}|{model}|{distance_m:.6f}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def detect(
    profile: ModelProfile,
    scenario: ScenarioConfig,
    distance_m: float,
    rng: random.Random | None = None,
) -> float:
    """One model's confidence for one scenario frame.

    Deterministic given the profile, scenario, distance and RNG state; the
    noise draw is skipped entirely when ``noise_sigma`` is 0.
    """
    base = profile.p_max * logistic((profile.d50_m - distance_m) * profile.slope_per_m)
    value = base * degradation_factor(
        profile, scenario.weather, scenario.adversary.occlusion
    )
    if profile.noise_sigma > 0.0:
        if rng is None:
            raise ValidationError("an RNG is required when noise_sigma > 0")
        value += rng.gauss(0.0, profile.noise_sigma)
    return min(1.0, max(0.0, value))


def simulate_campaign(
    scenarios: Iterable[ScenarioConfig],
    profiles: Sequence[ModelProfile],
    seed: int,
) -> Iterator[DetectionRecord]:
    """Yield one record per (scenario, distance, profile), in that nesting.

    Requires at least two profiles with distinct names.
    """
    names = [p.model for p in profiles]
    if len(names) != len(set(names)):
        raise ValidationError(f"profile names must be unique, got {names}")
    if len(profiles) < 2:
        raise EnsembleSizeError(f"need >= 2 model profiles, got {len(profiles)}")
    for scenario in scenarios:
        for record in simulate_scenario(scenario, profiles, seed):
            yield record


def simulate_scenario(
    scenario: ScenarioConfig, profiles: Sequence[ModelProfile], seed: int
) -> list[DetectionRecord]:
    """Records for a single scenario (used by the per-scenario worker pool)."""
    records = []
    for distance in scenario.distances_m:
        for profile in profiles:
            rng = None
            if profile.noise_sigma > 0.0:
                rng = random.Random(
                    record_seed(seed, scenario.scenario_id, profile.model, distance)
                )
            records.append(
                DetectionRecord(
                    scenario_id=scenario.scenario_id,
                    model=profile.model,
                    distance_m=distance,
                    confidence=detect(profile, scenario, distance, rng),
                )
            )
    return records


def _penalties(
    no_occ: float, low: float, moderate: float, high: float, altered: float
) -> dict[OcclusionLevel, float]:
    return {
        OcclusionLevel.NO_OCCLUSION: no_occ,
        OcclusionLevel.LOW: low,
        OcclusionLevel.MODERATE: moderate,
        OcclusionLevel.HIGH: high,
        OcclusionLevel.ALTERED: altered,
    }


def default_profiles(noise_sigma: float = 0.0) -> tuple[ModelProfile, ...]:
    """The stock five-model ensemble.

    Distance responses (``d50_m``/``slope_per_m``) are staggered, and the
    stressor sensitivities are deliberately spread from robust to fragile so
    degraded scenes produce real inter-model disagreement.
    """
    return (
        ModelProfile(
            model="simdet-a",
            p_max=0.97,
            d50_m=34.0,
            slope_per_m=0.60,
            fog_sensitivity=0.22,
            precip_sensitivity=0.20,
            cloud_sensitivity=0.12,
            lowlight_sensitivity=0.4,
            glare_sensitivity=0.7,
            occlusion_penalty=_penalties(1.0, 0.95, 0.92, 0.89, 0.90),
            noise_sigma=noise_sigma,
        ),
        ModelProfile(
            model="simdet-b",
            p_max=0.96,
            d50_m=35.0,
            slope_per_m=0.55,
            fog_sensitivity=0.40,
            precip_sensitivity=0.38,
            cloud_sensitivity=0.22,
            lowlight_sensitivity=0.7,
            glare_sensitivity=1.2,
            occlusion_penalty=_penalties(1.0, 0.94, 0.90, 0.86, 0.88),
            noise_sigma=noise_sigma,
        ),
        ModelProfile(
            model="simdet-c",
            p_max=0.94,
            d50_m=33.0,
            slope_per_m=0.65,
            fog_sensitivity=0.65,
            precip_sensitivity=0.58,
            cloud_sensitivity=0.33,
            lowlight_sensitivity=1.1,
            glare_sensitivity=1.8,
            occlusion_penalty=_penalties(1.0, 0.93, 0.88, 0.82, 0.85),
            noise_sigma=noise_sigma,
        ),
        ModelProfile(
            model="simdet-d",
            p_max=0.96,
            d50_m=36.0,
            slope_per_m=0.50,
            fog_sensitivity=0.95,
            precip_sensitivity=0.80,
            cloud_sensitivity=0.45,
            lowlight_sensitivity=1.5,
            glare_sensitivity=2.4,
            occlusion_penalty=_penalties(1.0, 0.92, 0.85, 0.78, 0.81),
            noise_sigma=noise_sigma,
        ),
        ModelProfile(
            model="simdet-e",
            p_max=0.92,
            d50_m=32.0,
            slope_per_m=0.70,
            fog_sensitivity=1.25,
            precip_sensitivity=1.00,
            cloud_sensitivity=0.55,
            lowlight_sensitivity=1.9,
            glare_sensitivity=3.0,
            occlusion_penalty=_penalties(1.0, 0.90, 0.82, 0.73, 0.77),
            noise_sigma=noise_sigma,
        ),
    )
