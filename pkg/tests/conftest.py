"""Shared fixtures and helpers for the test suite.

The Set 1 campaign is simulated once per session (noise-free, fixed seed)
and shared between the aggregation tests and the acceptance suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import pytest

from persens.ensemble import EnsembleFrame, EnsembleTrace, build_trace
from persens.scenarios import ScenarioConfig, expand, set1_manifest
from persens.synth import default_profiles, simulate_campaign

SET1_SEED = 1234
THETA_CHECK = 0.20


def make_trace(points, scenario_id="trace", sigma=0.0):
    """Hand-build a trace from (distance, mu[, sigma]) tuples.

    Points must be given farthest-first, matching the trace convention.
    """
    frames = []
    for point in points:
        d, mu = point[0], point[1]
        s = point[2] if len(point) > 2 else sigma
        frames.append(EnsembleFrame(distance_m=d, filtered={}, mu=mu, sigma=s))
    return EnsembleTrace(scenario_id=scenario_id, frames=tuple(frames))


@dataclass(frozen=True)
class Set1Run:
    scenarios: list[ScenarioConfig]
    scenario_map: dict[str, ScenarioConfig]
    traces: list[EnsembleTrace]
    record_count: int
    elapsed_s: float


@pytest.fixture(scope="session")
def set1_run() -> Set1Run:
    t0 = time.perf_counter()
    scenarios = expand(set1_manifest())
    profiles = default_profiles(noise_sigma=0.0)
    members = [p.model for p in profiles]
    by_scenario: dict[str, list] = {}
    count = 0
    for record in simulate_campaign(scenarios, profiles, seed=SET1_SEED):
        by_scenario.setdefault(record.scenario_id, []).append(record)
        count += 1
    traces = [
        build_trace(records, members, THETA_CHECK)
        for records in by_scenario.values()
    ]
    elapsed = time.perf_counter() - t0
    return Set1Run(
        scenarios=scenarios,
        scenario_map={s.scenario_id: s for s in scenarios},
        traces=traces,
        record_count=count,
        elapsed_s=elapsed,
    )
