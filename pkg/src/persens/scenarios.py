"""Scenario grids: weather levels x adversarial occluders, fully crossed.

A campaign manifest lists the discrete levels for each of the five weather
parameters plus the adversary placements; :func:`expand` materialises the
full factorial as an ordered scenario list with stable ordinal ids.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .errors import ManifestError, ValidationError
from .units import DistanceM, FrictionCoeff, ReactionTimeS, SpeedKmph, mph_to_kmph

#: Canonical order of the weather parameters everywhere in the package.
WEATHER_PARAMS = (
    "cloudiness",
    "precipitation",
    "fog_density",
    "sun_azimuth",
    "sun_altitude",
)

_PCT_PARAMS = {"cloudiness", "precipitation", "fog_density"}


class OcclusionLevel(enum.Enum):
    NO_OCCLUSION = "NoOcclusion"
    LOW = "Low"
    MODERATE = "Moderate"
    HIGH = "High"
    ALTERED = "Altered"


class AdversaryName(enum.Enum):
    NONE = "None"
    AMBULANCE1 = "Ambulance1"
    AMBULANCE2 = "Ambulance2"
    FIRETRUCK = "Firetruck"
    GRAFFITI = "Graffiti"
    TREE = "Tree"
    POLE = "Pole"
    PEDESTRIAN = "Pedestrian"
    ADV_PATCH = "AdvPatch"
    LOW_RES_PATCH = "LowResPatch"
    BUSH1 = "Bush1"
    BUSH2 = "Bush2"
    ALT_STOP = "AltStop"


#: Adversaries whose occlusion level is fixed by construction.
FIXED_OCCLUSION = {
    AdversaryName.NONE: OcclusionLevel.NO_OCCLUSION,
    AdversaryName.AMBULANCE1: OcclusionLevel.LOW,
    AdversaryName.AMBULANCE2: OcclusionLevel.MODERATE,
    AdversaryName.FIRETRUCK: OcclusionLevel.HIGH,
}


@dataclass(frozen=True)
class AdversaryKind:
    """An adversary placement and the occlusion level it induces."""

    name: AdversaryName
    occlusion: OcclusionLevel

    def __post_init__(self) -> None:
        fixed = FIXED_OCCLUSION.get(self.name)
        if fixed is not None and self.occlusion is not fixed:
            raise ValidationError(
                f"adversary {self.name.value!r} implies occlusion "
                f"{fixed.value!r}, got {self.occlusion.value!r}"
            )

    @classmethod
    def of(
        cls, name: AdversaryName | str, occlusion: OcclusionLevel | str | None = None
    ) -> "AdversaryKind":
        """Build an adversary, defaulting the occlusion level by kind.

        The four vehicle/none kinds carry a fixed level; every other kind
        defaults to ``Altered`` and may be overridden by the manifest.
        """
        if isinstance(name, str):
            try:
                name = AdversaryName(name)
            except ValueError:
                known = ", ".join(a.value for a in AdversaryName)
                raise ValidationError(
                    f"unknown adversary kind {name!r} (known: {known})"
                ) from None
        if isinstance(occlusion, str):
            try:
                occlusion = OcclusionLevel(occlusion)
            except ValueError:
                known = ", ".join(o.value for o in OcclusionLevel)
                raise ValidationError(
                    f"unknown occlusion level {occlusion!r} (known: {known})"
                ) from None
        if occlusion is None:
            occlusion = FIXED_OCCLUSION.get(name, OcclusionLevel.ALTERED)
        return cls(name, occlusion)


def _check_weather_value(param: str, value: float) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{param} must be a number, got {value!r}") from None
    if param in _PCT_PARAMS and not 0.0 <= v <= 100.0:
        raise ValidationError(f"{param} must be in [0, 100], got {v}")
    if param == "sun_azimuth" and not 0.0 <= v <= 360.0:
        raise ValidationError(f"sun_azimuth must be in [0, 360], got {v}")
    if param == "sun_altitude" and not -90.0 <= v <= 90.0:
        raise ValidationError(f"sun_altitude must be in [-90, 90], got {v}")
    return v


@dataclass(frozen=True)
class WeatherConfig:
    """One point in weather space (percent levels and sun angles)."""

    cloudiness: float
    precipitation: float
    fog_density: float
    sun_azimuth: float
    sun_altitude: float

    def __post_init__(self) -> None:
        for param in WEATHER_PARAMS:
            object.__setattr__(
                self, param, _check_weather_value(param, getattr(self, param))
            )

    def level(self, param: str) -> float:
        if param not in WEATHER_PARAMS:
            raise ValidationError(f"unknown weather parameter {param!r}")
        return getattr(self, param)


@dataclass(frozen=True)
class VehicleParams:
    """Ego-vehicle inputs to the stopping-distance model."""

    speed_kmph: float
    reaction_s: float
    friction: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "speed_kmph", float(SpeedKmph(self.speed_kmph)))
        object.__setattr__(self, "reaction_s", float(ReactionTimeS(self.reaction_s)))
        object.__setattr__(self, "friction", float(FrictionCoeff(self.friction)))


@dataclass(frozen=True)
class DistanceGrid:
    """Regular approach grid from ``start_m`` down to ``end_m`` (inclusive)."""

    start_m: float
    step_m: float
    end_m: float

    def __post_init__(self) -> None:
        start = float(DistanceM(self.start_m))
        end = float(DistanceM(self.end_m))
        if self.step_m <= 0.0:
            raise ValidationError(f"step_m must be > 0, got {self.step_m}")
        if not start > end > 0.0:
            raise ValidationError(
                f"need start_m > end_m > 0, got start={start} end={end}"
            )
        object.__setattr__(self, "start_m", start)
        object.__setattr__(self, "end_m", end)

    def distances(self) -> tuple[float, ...]:
        n = int((self.start_m - self.end_m) / self.step_m + 1e-9) + 1
        return tuple(round(self.start_m - i * self.step_m, 9) for i in range(n))


@dataclass(frozen=True)
class ScenarioConfig:
    """One concrete scenario: weather point, adversary, vehicle, distances."""

    scenario_id: str
    weather: WeatherConfig
    adversary: AdversaryKind
    vehicle: VehicleParams
    distances_m: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.scenario_id:
            raise ValidationError("scenario_id must be non-empty")
        if not self.distances_m:
            raise ValidationError("scenario needs at least one distance")
        if any(b >= a for a, b in zip(self.distances_m, self.distances_m[1:])):
            raise ValidationError("distances_m must be strictly decreasing")


@dataclass(frozen=True)
class CampaignManifest:
    """Declarative description of a full-factorial campaign."""

    name: str
    levels: dict[str, tuple[float, ...]]
    adversaries: tuple[AdversaryKind, ...]
    vehicle: VehicleParams
    grid: DistanceGrid

    def __post_init__(self) -> None:
        if not self.name:
            raise ManifestError("campaign name must be non-empty")
        if set(self.levels) != set(WEATHER_PARAMS):
            raise ManifestError(
                f"levels must define exactly {sorted(WEATHER_PARAMS)}, "
                f"got {sorted(self.levels)}"
            )
        normalized: dict[str, tuple[float, ...]] = {}
        for param in WEATHER_PARAMS:
            values = tuple(self.levels[param])
            if not values:
                raise ManifestError(f"{param} must list at least one level")
            if len(set(values)) != len(values):
                raise ManifestError(f"{param} levels contain duplicates: {values}")
            normalized[param] = tuple(
                _check_weather_value(param, v) for v in values
            )
        object.__setattr__(self, "levels", normalized)
        if not self.adversaries:
            raise ManifestError("adversaries must list at least one kind")
        if len(set(a.name for a in self.adversaries)) != len(self.adversaries):
            raise ManifestError("adversaries contain duplicate kinds")
        object.__setattr__(self, "adversaries", tuple(self.adversaries))

    def scenario_count(self) -> int:
        n = len(self.adversaries)
        for param in WEATHER_PARAMS:
            n *= len(self.levels[param])
        return n


def expand(manifest: CampaignManifest) -> list[ScenarioConfig]:
    """Materialise the factorial scenario list in deterministic order.

    Order is lexicographic over (adversary, cloudiness, precipitation,
    fog_density, sun_azimuth, sun_altitude) as listed in the manifest;
    ids are ordinal from 1, prefixed with the campaign name.
    """
    total = manifest.scenario_count()
    width = max(4, len(str(total)))
    distances = manifest.grid.distances()
    scenarios: list[ScenarioConfig] = []
    combos = itertools.product(
        manifest.adversaries, *(manifest.levels[p] for p in WEATHER_PARAMS)
    )
    for ordinal, (adversary, cloud, precip, fog, azimuth, altitude) in enumerate(
        combos, start=1
    ):
        scenarios.append(
            ScenarioConfig(
                scenario_id=f"{manifest.name}-{ordinal:0{width}d}",
                weather=WeatherConfig(cloud, precip, fog, azimuth, altitude),
                adversary=adversary,
                vehicle=manifest.vehicle,
                distances_m=distances,
            )
        )
    return scenarios


#: Weather point used when no stressor is applied: clear sky, sun high
#: and behind the approach direction.
BASELINE_WEATHER = {
    "cloudiness": 0.0,
    "precipitation": 0.0,
    "fog_density": 0.0,
    "sun_azimuth": 120.0,
    "sun_altitude": 56.67,
}

DEFAULT_GRID = DistanceGrid(start_m=43.55, step_m=3.0, end_m=1.55)

DEFAULT_VEHICLE = VehicleParams(
    speed_kmph=float(mph_to_kmph(30.0)), reaction_s=1.0, friction=0.75
)


def set1_manifest() -> CampaignManifest:
    """Three-level weather sweep crossed with the four occluder placements."""
    return CampaignManifest(
        name="set1",
        levels={
            "cloudiness": (0.0, 33.33, 66.67),
            "precipitation": (0.0, 33.33, 66.67),
            "fog_density": (0.0, 33.33, 66.67),
            "sun_azimuth": (0.0, 120.0, 240.0),
            "sun_altitude": (-10.0, 23.33, 56.67),
        },
        adversaries=(
            AdversaryKind.of(AdversaryName.NONE),
            AdversaryKind.of(AdversaryName.AMBULANCE1),
            AdversaryKind.of(AdversaryName.AMBULANCE2),
            AdversaryKind.of(AdversaryName.FIRETRUCK),
        ),
        vehicle=DEFAULT_VEHICLE,
        grid=DEFAULT_GRID,
    )


def baseline_manifest() -> CampaignManifest:
    """Single-scenario campaign at the unstressed weather point."""
    return CampaignManifest(
        name="baseline",
        levels={param: (value,) for param, value in BASELINE_WEATHER.items()},
        adversaries=(AdversaryKind.of(AdversaryName.NONE),),
        vehicle=DEFAULT_VEHICLE,
        grid=DEFAULT_GRID,
    )


def baseline_scenario() -> ScenarioConfig:
    """The single scenario of :func:`baseline_manifest`."""
    return expand(baseline_manifest())[0]
