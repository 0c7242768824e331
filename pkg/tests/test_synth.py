"""Synthetic detector bank: response curves, stressors, keyed noise."""

import math
import random

import pytest

from persens.errors import EnsembleSizeError, ValidationError
from persens.scenarios import (
    BASELINE_WEATHER,
    DEFAULT_VEHICLE,
    AdversaryKind,
    AdversaryName,
    OcclusionLevel,
    ScenarioConfig,
    WeatherConfig,
    baseline_scenario,
)
from persens.synth import (
    GLARE_MAX_ALTITUDE_DEG,
    ModelProfile,
    default_profiles,
    degradation_factor,
    detect,
    glare_alignment,
    logistic,
    lowlight_exposure,
    record_seed,
    simulate_campaign,
    simulate_scenario,
)


def _scenario(weather=None, adversary=AdversaryName.NONE, distances=(40.0, 20.0, 5.0)):
    if weather is None:
        weather = WeatherConfig(**BASELINE_WEATHER)
    return ScenarioConfig(
        scenario_id="synth-test",
        weather=weather,
        adversary=AdversaryKind.of(adversary),
        vehicle=DEFAULT_VEHICLE,
        distances_m=tuple(distances),
    )


def _clear_weather(**overrides):
    kwargs = dict(BASELINE_WEATHER)
    kwargs.update(overrides)
    return WeatherConfig(**kwargs)


PROFILE = ModelProfile(
    model="unit-test",
    p_max=0.9,
    d50_m=30.0,
    slope_per_m=0.5,
    fog_sensitivity=0.5,
    precip_sensitivity=0.4,
    cloud_sensitivity=0.3,
    lowlight_sensitivity=1.0,
    glare_sensitivity=2.0,
    occlusion_penalty={
        OcclusionLevel.NO_OCCLUSION: 1.0,
        OcclusionLevel.LOW: 0.9,
        OcclusionLevel.MODERATE: 0.8,
        OcclusionLevel.HIGH: 0.7,
        OcclusionLevel.ALTERED: 0.75,
    },
)


# --------------------------------------------------------------------------
# response curve


def test_logistic_midpoint_and_symmetry():
    assert logistic(0.0) == 0.5
    rng = random.Random(3)
    for _ in range(100):
        x = rng.uniform(-30.0, 30.0)
        assert logistic(x) + logistic(-x) == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= logistic(x) <= 1.0
    assert logistic(700.0) == pytest.approx(1.0)
    assert logistic(-700.0) == pytest.approx(0.0)


def test_logistic_is_monotone():
    xs = [-8.0 + 0.5 * i for i in range(33)]
    ys = [logistic(x) for x in xs]
    assert all(b > a for a, b in zip(ys, ys[1:]))


def test_confidence_at_the_midpoint_is_half_of_p_max():
    scenario = _scenario()
    assert detect(PROFILE, scenario, PROFILE.d50_m) == PROFILE.p_max / 2.0


def test_confidence_rises_as_the_vehicle_approaches():
    scenario = _scenario()
    values = [detect(PROFILE, scenario, d) for d in (45.0, 35.0, 30.0, 20.0, 10.0)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] <= PROFILE.p_max


def test_confidence_falls_with_fog():
    for d in (35.0, 25.0, 15.0):
        values = [
            detect(PROFILE, _scenario(weather=_clear_weather(fog_density=f)), d)
            for f in (0.0, 25.0, 50.0, 75.0, 100.0)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))


def test_occlusion_orders_confidence():
    for profile in default_profiles():
        values = [
            detect(profile, _scenario(adversary=name), 25.0)
            for name in (
                AdversaryName.NONE,
                AdversaryName.AMBULANCE1,
                AdversaryName.AMBULANCE2,
                AdversaryName.FIRETRUCK,
            )
        ]
        assert all(b < a for a, b in zip(values, values[1:]))


def test_degradation_factor_is_one_in_the_clear():
    assert (
        degradation_factor(PROFILE, _clear_weather(), OcclusionLevel.NO_OCCLUSION)
        == 1.0
    )


# --------------------------------------------------------------------------
# stressor helpers


def test_lowlight_exposure_shape():
    assert lowlight_exposure(56.67) == 0.0
    assert lowlight_exposure(10.0) == 0.0
    assert lowlight_exposure(0.0) == pytest.approx(0.1)
    assert lowlight_exposure(-10.0) == pytest.approx(0.2)
    assert lowlight_exposure(-90.0) == pytest.approx(1.0)


def test_glare_alignment_band():
    assert glare_alignment(180.0, 5.0) == 1.0
    assert glare_alignment(170.0, 5.0) == pytest.approx(0.5)
    assert glare_alignment(190.0, 5.0) == pytest.approx(0.5)
    assert glare_alignment(160.0, 5.0) == 0.0
    assert glare_alignment(200.0, 5.0) == 0.0
    assert glare_alignment(120.0, 5.0) == 0.0


def test_glare_needs_a_low_sun():
    assert glare_alignment(180.0, GLARE_MAX_ALTITUDE_DEG) == 0.0
    assert glare_alignment(180.0, 56.67) == 0.0
    assert glare_alignment(180.0, GLARE_MAX_ALTITUDE_DEG - 0.001) == 1.0


# --------------------------------------------------------------------------
# keyed randomness


def test_record_seed_is_deterministic_and_wide():
    a = record_seed(1234, "set1-0001", "simdet-a", 43.55)
    b = record_seed(1234, "set1-0001", "simdet-a", 43.55)
    assert a == b
    assert 0 <= a < 2**64


def test_record_seed_depends_on_every_component():
    base = record_seed(1234, "set1-0001", "simdet-a", 43.55)
    assert record_seed(1235, "set1-0001", "simdet-a", 43.55) != base
    assert record_seed(1234, "set1-0002", "simdet-a", 43.55) != base
    assert record_seed(1234, "set1-0001", "simdet-b", 43.55) != base
    assert record_seed(1234, "set1-0001", "simdet-a", 40.55) != base


def test_noisy_records_replay_independently_of_batch_shape():
    profiles = default_profiles(noise_sigma=0.05)
    full = _scenario(distances=(40.0, 30.0, 20.0, 10.0))
    subset = _scenario(distances=(30.0, 10.0))

    by_key_full = {
        (r.model, r.distance_m): r.confidence
        for r in simulate_scenario(full, profiles, seed=77)
    }
    by_key_subset = {
        (r.model, r.distance_m): r.confidence
        for r in simulate_scenario(subset, profiles, seed=77)
    }
    for key, value in by_key_subset.items():
        assert value == by_key_full[key]

    # Profile order does not matter either: the draw is keyed, not streamed.
    reordered = tuple(reversed(profiles))
    by_key_reordered = {
        (r.model, r.distance_m): r.confidence
        for r in simulate_scenario(full, reordered, seed=77)
    }
    assert by_key_reordered == by_key_full


def test_noise_changes_with_the_campaign_seed():
    profiles = default_profiles(noise_sigma=0.05)
    scenario = _scenario(distances=(40.0, 30.0, 20.0))
    one = [r.confidence for r in simulate_scenario(scenario, profiles, seed=1)]
    two = [r.confidence for r in simulate_scenario(scenario, profiles, seed=2)]
    assert one != two


def test_zero_noise_is_rng_free_and_reproducible():
    profiles = default_profiles()
    scenario = _scenario(distances=(40.0, 30.0, 20.0))
    one = [r.confidence for r in simulate_scenario(scenario, profiles, seed=1)]
    two = [r.confidence for r in simulate_scenario(scenario, profiles, seed=999)]
    # Without noise the campaign seed is irrelevant.
    assert one == two


def test_confidence_is_clamped_under_extreme_noise():
    noisy = ModelProfile(
        model="noisy",
        p_max=0.9,
        d50_m=30.0,
        slope_per_m=0.5,
        fog_sensitivity=0.0,
        precip_sensitivity=0.0,
        cloud_sensitivity=0.0,
        lowlight_sensitivity=0.0,
        glare_sensitivity=0.0,
        occlusion_penalty=dict.fromkeys(OcclusionLevel, 1.0),
        noise_sigma=50.0,
    )
    scenario = _scenario()
    rng = random.Random(0)
    values = [detect(noisy, scenario, 30.0, rng) for _ in range(200)]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert 0.0 in values and 1.0 in values  # both rails are actually hit


def test_noise_requires_an_rng():
    noisy = ModelProfile(
        model="noisy",
        p_max=0.9,
        d50_m=30.0,
        slope_per_m=0.5,
        fog_sensitivity=0.0,
        precip_sensitivity=0.0,
        cloud_sensitivity=0.0,
        lowlight_sensitivity=0.0,
        glare_sensitivity=0.0,
        occlusion_penalty=dict.fromkeys(OcclusionLevel, 1.0),
        noise_sigma=0.1,
    )
    with pytest.raises(ValidationError):
        detect(noisy, _scenario(), 30.0)


# --------------------------------------------------------------------------
# campaign simulation


def test_campaign_yields_one_record_per_cell():
    scenario = baseline_scenario()
    profiles = default_profiles()
    records = list(simulate_campaign([scenario], profiles, seed=1234))
    assert len(records) == len(scenario.distances_m) * len(profiles)
    # Nesting: distance-major, then profile order.
    assert [r.model for r in records[: len(profiles)]] == [p.model for p in profiles]
    assert records[0].distance_m == scenario.distances_m[0]
    assert records[len(profiles)].distance_m == scenario.distances_m[1]


def test_campaign_requires_two_profiles():
    with pytest.raises(EnsembleSizeError):
        list(simulate_campaign([baseline_scenario()], default_profiles()[:1], seed=1))


def test_campaign_rejects_duplicate_model_names():
    profile = default_profiles()[0]
    with pytest.raises(ValidationError):
        list(simulate_campaign([baseline_scenario()], (profile, profile), seed=1))


# --------------------------------------------------------------------------
# bundled profiles and validation


def test_default_profiles_shape():
    profiles = default_profiles()
    assert len(profiles) == 5
    names = [p.model for p in profiles]
    assert len(set(names)) == 5
    assert len({p.d50_m for p in profiles}) == 5
    for profile in profiles:
        assert profile.noise_sigma == 0.0
        assert set(profile.occlusion_penalty) == set(OcclusionLevel)
    noisy = default_profiles(noise_sigma=0.05)
    assert all(p.noise_sigma == 0.05 for p in noisy)


def test_profile_validation():
    def build(**overrides):
        kwargs = dict(
            model="m",
            p_max=0.9,
            d50_m=30.0,
            slope_per_m=0.5,
            fog_sensitivity=0.1,
            precip_sensitivity=0.1,
            cloud_sensitivity=0.1,
            lowlight_sensitivity=0.1,
            glare_sensitivity=0.1,
            occlusion_penalty=dict.fromkeys(OcclusionLevel, 1.0),
        )
        kwargs.update(overrides)
        return ModelProfile(**kwargs)

    build()  # the base case is valid
    with pytest.raises(ValidationError):
        build(model="")
    with pytest.raises(ValidationError):
        build(p_max=1.5)
    with pytest.raises(ValidationError):
        build(p_max=0.0)
    with pytest.raises(ValidationError):
        build(d50_m=-3.0)
    with pytest.raises(ValidationError):
        build(slope_per_m=0.0)
    with pytest.raises(ValidationError):
        build(fog_sensitivity=-0.1)
    with pytest.raises(ValidationError):
        build(noise_sigma=-0.01)
    incomplete = dict.fromkeys(OcclusionLevel, 1.0)
    del incomplete[OcclusionLevel.HIGH]
    with pytest.raises(ValidationError):
        build(occlusion_penalty=incomplete)
    increasing = dict.fromkeys(OcclusionLevel, 1.0)
    increasing[OcclusionLevel.MODERATE] = 0.5
    with pytest.raises(ValidationError):
        build(occlusion_penalty=increasing)
    out_of_range = dict.fromkeys(OcclusionLevel, 1.0)
    out_of_range[OcclusionLevel.ALTERED] = 1.2
    with pytest.raises(ValidationError):
        build(occlusion_penalty=out_of_range)
