"""Campaign manifests, scenario expansion, and the built-in grids."""

import itertools
import random
import time

import pytest

from persens.errors import ManifestError, ValidationError
from persens.scenarios import (
    BASELINE_WEATHER,
    DEFAULT_GRID,
    DEFAULT_VEHICLE,
    AdversaryKind,
    AdversaryName,
    CampaignManifest,
    DistanceGrid,
    OcclusionLevel,
    ScenarioConfig,
    WeatherConfig,
    baseline_scenario,
    expand,
    set1_manifest,
)
from persens.units import mph_to_kmph


# --------------------------------------------------------------------------
# the standard campaign


def test_standard_campaign_size():
    manifest = set1_manifest()
    assert manifest.scenario_count() == 972
    scenarios = expand(manifest)
    assert len(scenarios) == 972


def test_standard_campaign_per_adversary_split():
    scenarios = expand(set1_manifest())
    per = {}
    for sc in scenarios:
        per.setdefault(sc.adversary.name, []).append(sc)
    assert len(per) == 4
    assert all(len(group) == 243 for group in per.values())


def test_scenario_ids_are_stable_and_zero_padded():
    scenarios = expand(set1_manifest())
    assert scenarios[0].scenario_id == "set1-0001"
    assert scenarios[-1].scenario_id == "set1-0972"
    assert [sc.scenario_id for sc in scenarios] == [
        f"set1-{i:04d}" for i in range(1, 973)
    ]


def test_first_scenario_is_the_all_first_levels_cell():
    first = expand(set1_manifest())[0]
    assert first.adversary.name is AdversaryName.NONE
    assert first.adversary.occlusion is OcclusionLevel.NO_OCCLUSION
    assert first.weather.cloudiness == 0.0
    assert first.weather.precipitation == 0.0
    assert first.weather.fog_density == 0.0
    assert first.weather.sun_azimuth == 0.0
    assert first.weather.sun_altitude == -10.0


def test_last_scenario_is_the_all_last_levels_cell():
    last = expand(set1_manifest())[-1]
    assert last.adversary.name is AdversaryName.FIRETRUCK
    assert last.adversary.occlusion is OcclusionLevel.HIGH
    assert last.weather.cloudiness == pytest.approx(66.67)
    assert last.weather.precipitation == pytest.approx(66.67)
    assert last.weather.fog_density == pytest.approx(66.67)
    assert last.weather.sun_azimuth == pytest.approx(240.0)
    assert last.weather.sun_altitude == pytest.approx(56.67)


def test_expansion_order_is_the_documented_nesting():
    manifest = set1_manifest()
    scenarios = expand(manifest)
    expected = itertools.product(
        manifest.adversaries,
        manifest.levels["cloudiness"],
        manifest.levels["precipitation"],
        manifest.levels["fog_density"],
        manifest.levels["sun_azimuth"],
        manifest.levels["sun_altitude"],
    )
    for sc, (adv, cloud, precip, fog, az, alt) in zip(scenarios, expected):
        assert sc.adversary.name is adv.name
        assert sc.weather.cloudiness == cloud
        assert sc.weather.precipitation == precip
        assert sc.weather.fog_density == fog
        assert sc.weather.sun_azimuth == az
        assert sc.weather.sun_altitude == alt


def test_id_width_grows_with_campaign_size():
    manifest = CampaignManifest(
        name="wide",
        levels={
            "cloudiness": tuple(float(i) for i in range(22)),
            "precipitation": tuple(float(i) for i in range(22)),
            "fog_density": tuple(float(i) for i in range(21)),
            "sun_azimuth": (120.0,),
            "sun_altitude": (45.0,),
        },
        adversaries=(AdversaryKind.of(AdversaryName.NONE),),
        vehicle=DEFAULT_VEHICLE,
        grid=DEFAULT_GRID,
    )
    assert manifest.scenario_count() == 22 * 22 * 21
    scenarios = expand(manifest)
    assert scenarios[0].scenario_id == "wide-00001"
    assert scenarios[-1].scenario_id == f"wide-{22 * 22 * 21:05d}"


def test_random_manifest_expansion_is_fast_and_product_sized():
    rng = random.Random(99)
    started = time.perf_counter()
    for i in range(200):
        levels = {}
        for param in ("cloudiness", "precipitation", "fog_density"):
            values = {round(rng.uniform(0, 100), 2) for _ in range(rng.randint(1, 3))}
            levels[param] = tuple(sorted(values))
        levels["sun_azimuth"] = tuple(
            sorted({round(rng.uniform(0, 360), 1) for _ in range(rng.randint(1, 2))})
        )
        levels["sun_altitude"] = tuple(
            sorted({round(rng.uniform(-90, 90), 1) for _ in range(rng.randint(1, 2))})
        )
        names = rng.sample(list(AdversaryName), rng.randint(1, 4))
        manifest = CampaignManifest(
            name=f"rand{i}",
            levels=levels,
            adversaries=tuple(AdversaryKind.of(n) for n in names),
            vehicle=DEFAULT_VEHICLE,
            grid=DEFAULT_GRID,
        )
        scenarios = expand(manifest)
        expected = len(names)
        for values in levels.values():
            expected *= len(values)
        assert len(scenarios) == expected
        assert manifest.scenario_count() == expected
        # Determinism: a second expansion is identical.
        again = expand(manifest)
        assert again == scenarios
    assert time.perf_counter() - started < 1.0


# --------------------------------------------------------------------------
# manifest validation


def _levels_ok():
    return {
        "cloudiness": (0.0,),
        "precipitation": (0.0,),
        "fog_density": (0.0,),
        "sun_azimuth": (120.0,),
        "sun_altitude": (45.0,),
    }


def _manifest(**overrides):
    kwargs = dict(
        name="m",
        levels=_levels_ok(),
        adversaries=(AdversaryKind.of(AdversaryName.NONE),),
        vehicle=DEFAULT_VEHICLE,
        grid=DEFAULT_GRID,
    )
    kwargs.update(overrides)
    return CampaignManifest(**kwargs)


def test_manifest_rejects_missing_parameter():
    levels = _levels_ok()
    del levels["fog_density"]
    with pytest.raises(ManifestError):
        _manifest(levels=levels)


def test_manifest_rejects_unknown_parameter():
    levels = _levels_ok()
    levels["wind"] = (0.0,)
    with pytest.raises(ManifestError):
        _manifest(levels=levels)


def test_manifest_rejects_empty_levels():
    levels = _levels_ok()
    levels["cloudiness"] = ()
    with pytest.raises(ManifestError):
        _manifest(levels=levels)


def test_manifest_rejects_duplicate_levels():
    levels = _levels_ok()
    levels["cloudiness"] = (0.0, 50.0, 0.0)
    with pytest.raises(ManifestError):
        _manifest(levels=levels)


def test_manifest_rejects_duplicate_adversaries():
    adversaries = (
        AdversaryKind.of(AdversaryName.NONE),
        AdversaryKind.of(AdversaryName.NONE),
    )
    with pytest.raises(ManifestError):
        _manifest(adversaries=adversaries)


def test_manifest_rejects_empty_adversaries():
    with pytest.raises(ManifestError):
        _manifest(adversaries=())


def test_manifest_rejects_empty_name():
    with pytest.raises(ManifestError):
        _manifest(name="")


def test_manifest_rejects_out_of_range_levels():
    levels = _levels_ok()
    levels["cloudiness"] = (0.0, 150.0)
    with pytest.raises(ValidationError):
        _manifest(levels=levels)


# --------------------------------------------------------------------------
# adversaries and occlusion


def test_fixed_occlusion_pairings():
    assert AdversaryKind.of(AdversaryName.NONE).occlusion is OcclusionLevel.NO_OCCLUSION
    assert AdversaryKind.of(AdversaryName.AMBULANCE1).occlusion is OcclusionLevel.LOW
    assert (
        AdversaryKind.of(AdversaryName.AMBULANCE2).occlusion is OcclusionLevel.MODERATE
    )
    assert AdversaryKind.of(AdversaryName.FIRETRUCK).occlusion is OcclusionLevel.HIGH


def test_contradicting_a_fixed_pairing_is_an_error():
    with pytest.raises(ValidationError):
        AdversaryKind(name=AdversaryName.FIRETRUCK, occlusion=OcclusionLevel.LOW)


def test_other_adversaries_default_to_altered():
    for name in (
        AdversaryName.GRAFFITI,
        AdversaryName.ADV_PATCH,
        AdversaryName.ALT_STOP,
        AdversaryName.TREE,
    ):
        assert AdversaryKind.of(name).occlusion is OcclusionLevel.ALTERED


def test_non_fixed_adversaries_accept_an_explicit_override():
    kind = AdversaryKind.of(AdversaryName.GRAFFITI, OcclusionLevel.LOW)
    assert kind.occlusion is OcclusionLevel.LOW
    by_string = AdversaryKind.of("Graffiti", "Low")
    assert by_string == kind


def test_unknown_adversary_strings_are_rejected():
    with pytest.raises(ValidationError):
        AdversaryKind.of("Tornado")
    with pytest.raises(ValidationError):
        AdversaryKind.of("Graffiti", "Invisible")


# --------------------------------------------------------------------------
# weather, grid, vehicle


def _weather(**overrides):
    kwargs = dict(
        cloudiness=0.0,
        precipitation=0.0,
        fog_density=0.0,
        sun_azimuth=0.0,
        sun_altitude=0.0,
    )
    kwargs.update(overrides)
    return WeatherConfig(**kwargs)


def test_weather_bounds():
    _weather(cloudiness=100.0, sun_azimuth=360.0, sun_altitude=-90.0)
    with pytest.raises(ValidationError):
        _weather(cloudiness=101.0)
    with pytest.raises(ValidationError):
        _weather(precipitation=-1.0)
    with pytest.raises(ValidationError):
        _weather(fog_density=100.1)
    with pytest.raises(ValidationError):
        _weather(sun_azimuth=361.0)
    with pytest.raises(ValidationError):
        _weather(sun_altitude=90.5)


def test_weather_level_accessor():
    weather = _weather(fog_density=33.33, sun_altitude=-10.0)
    assert weather.level("fog_density") == 33.33
    assert weather.level("sun_altitude") == -10.0
    with pytest.raises(ValidationError):
        weather.level("wind")


def test_default_grid_is_the_published_approach():
    distances = DEFAULT_GRID.distances()
    assert len(distances) == 15
    assert distances[0] == 43.55
    assert distances[-1] == 1.55
    assert 25.55 in distances
    for a, b in zip(distances, distances[1:]):
        assert a - b == pytest.approx(3.0, abs=1e-9)


def test_grid_validation():
    with pytest.raises(ValidationError):
        DistanceGrid(start_m=10.0, step_m=0.0, end_m=1.0)
    with pytest.raises(ValidationError):
        DistanceGrid(start_m=10.0, step_m=3.0, end_m=10.0)
    with pytest.raises(ValidationError):
        DistanceGrid(start_m=10.0, step_m=3.0, end_m=-1.0)


def test_scenario_config_requires_decreasing_distances():
    weather = _weather()
    adversary = AdversaryKind.of(AdversaryName.NONE)
    with pytest.raises(ValidationError):
        ScenarioConfig(
            scenario_id="bad",
            weather=weather,
            adversary=adversary,
            vehicle=DEFAULT_VEHICLE,
            distances_m=(10.0, 10.0, 5.0),
        )
    with pytest.raises(ValidationError):
        ScenarioConfig(
            scenario_id="bad",
            weather=weather,
            adversary=adversary,
            vehicle=DEFAULT_VEHICLE,
            distances_m=(),
        )
    with pytest.raises(ValidationError):
        ScenarioConfig(
            scenario_id="",
            weather=weather,
            adversary=adversary,
            vehicle=DEFAULT_VEHICLE,
            distances_m=(10.0, 5.0),
        )


def test_baseline_scenario_shape():
    scenario = baseline_scenario()
    assert scenario.scenario_id == "baseline-0001"
    assert scenario.adversary.name is AdversaryName.NONE
    for param, value in BASELINE_WEATHER.items():
        assert scenario.weather.level(param) == value
    assert scenario.weather.sun_azimuth == 120.0
    assert scenario.weather.sun_altitude == pytest.approx(56.67)
    assert scenario.distances_m == DEFAULT_GRID.distances()
    assert scenario.vehicle == DEFAULT_VEHICLE


def test_default_vehicle_is_thirty_mph_dry():
    assert DEFAULT_VEHICLE.speed_kmph == mph_to_kmph(30.0)
    assert DEFAULT_VEHICLE.speed_kmph == pytest.approx(48.28032, abs=1e-12)
    assert DEFAULT_VEHICLE.reaction_s == 1.0
    assert DEFAULT_VEHICLE.friction == 0.75
