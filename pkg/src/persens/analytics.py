"""Campaign-level aggregation of ensemble traces.

Aggregations never resample: traces entering one aggregation must share the
same distance grid, otherwise a grid-mismatch error is raised.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ensemble import EnsembleTrace
from .errors import (
    CoverageError,
    EmptyCellError,
    GridMismatchError,
    ValidationError,
)
from .safety import Classification, SafetyParams, classify
from .scenarios import OcclusionLevel, ScenarioConfig, WEATHER_PARAMS

#: Grouping field for the adversary occlusion level.
OCCLUSION_FIELD = "occlusion"

#: Accepted aliases for grouping fields on top of the canonical names.
FIELD_ALIASES = {
    "occlusion": OCCLUSION_FIELD,
    "cloudiness": "cloudiness",
    "cloud": "cloudiness",
    "precipitation": "precipitation",
    "precip": "precipitation",
    "fog_density": "fog_density",
    "fog": "fog_density",
    "sun_azimuth": "sun_azimuth",
    "azimuth": "sun_azimuth",
    "sun_altitude": "sun_altitude",
    "altitude": "sun_altitude",
}

_OCCLUSION_ORDER = {level: i for i, level in enumerate(OcclusionLevel)}


def resolve_group_field(name: str) -> str:
    try:
        return FIELD_ALIASES[name.strip().lower()]
    except KeyError:
        known = ", ".join(sorted(set(FIELD_ALIASES)))
        raise ValidationError(
            f"unknown grouping field {name!r} (known: {known})"
        ) from None


def _field_value(scenario: ScenarioConfig, field: str) -> object:
    if field == OCCLUSION_FIELD:
        return scenario.adversary.occlusion.value
    return scenario.weather.level(field)


def _field_sort_key(field: str, value: object) -> object:
    if field == OCCLUSION_FIELD:
        return _OCCLUSION_ORDER[OcclusionLevel(value)]
    return value


@dataclass(frozen=True)
class CurvePoint:
    distance_m: float
    mean_mu: float
    mean_sigma: float


@dataclass(frozen=True)
class GroupedCurve:
    """Pointwise mean of mu and sigma over every trace in one group."""

    key: tuple[tuple[str, object], ...]
    scenario_count: int
    points: tuple[CurvePoint, ...]

    def label(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.key)


def _lookup_scenarios(
    traces: Sequence[EnsembleTrace], scenarios: Mapping[str, ScenarioConfig]
) -> None:
    missing = [t.scenario_id for t in traces if t.scenario_id not in scenarios]
    if missing:
        raise ValidationError(
            f"traces reference scenarios missing from the scenario list: "
            f"{missing[:5]}{'...' if len(missing) > 5 else ''}"
        )


def _common_grid(traces: Sequence[EnsembleTrace], context: str) -> tuple[float, ...]:
    grids = {t.distances() for t in traces}
    if len(grids) > 1:
        raise GridMismatchError(
            f"{context}: traces mix {len(grids)} different distance grids; "
            "aggregation does not resample"
        )
    return next(iter(grids))


def group_curves(
    traces: Iterable[EnsembleTrace],
    scenarios: Mapping[str, ScenarioConfig],
    by: Sequence[str],
) -> list[GroupedCurve]:
    """Mean mu/sigma curves per combination of the requested fields."""
    fields = [resolve_group_field(f) for f in by]
    if not fields:
        raise ValidationError("group_curves needs at least one grouping field")
    if len(set(fields)) != len(fields):
        raise ValidationError(f"duplicate grouping fields: {fields}")
    ordered = sorted(traces, key=lambda t: t.scenario_id)
    if not ordered:
        raise ValidationError("group_curves needs at least one trace")
    _lookup_scenarios(ordered, scenarios)

    groups: dict[tuple, list[EnsembleTrace]] = {}
    for trace in ordered:
        scenario = scenarios[trace.scenario_id]
        key = tuple((f, _field_value(scenario, f)) for f in fields)
        groups.setdefault(key, []).append(trace)

    curves = []
    for key in sorted(
        groups, key=lambda k: tuple(_field_sort_key(f, v) for f, v in k)
    ):
        members = groups[key]
        grid = _common_grid(members, f"group {key}")
        n = len(members)
        points = tuple(
            CurvePoint(
                distance_m=d,
                mean_mu=sum(t.frames[i].mu for t in members) / n,
                mean_sigma=sum(t.frames[i].sigma for t in members) / n,
            )
            for i, d in enumerate(grid)
        )
        curves.append(GroupedCurve(key=key, scenario_count=n, points=points))
    return curves


@dataclass(frozen=True)
class SensitivityHeatmap:
    """Mean dispersion per (x level, y level) cell for one parameter pair."""

    x_param: str
    y_param: str
    x_levels: tuple[float, ...]
    y_levels: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]  # rows indexed by y, columns by x
    counts: tuple[tuple[int, ...], ...]

    def value_at(self, x_level: float, y_level: float) -> float:
        try:
            xi = self.x_levels.index(x_level)
            yi = self.y_levels.index(y_level)
        except ValueError:
            raise ValidationError(
                f"no cell ({x_level}, {y_level}) in heatmap "
                f"{self.x_param} x {self.y_param}"
            ) from None
        return self.values[yi][xi]


def pairwise_heatmaps(
    traces: Iterable[EnsembleTrace],
    scenarios: Mapping[str, ScenarioConfig],
    statistic: str = "mean_sigma",
) -> list[SensitivityHeatmap]:
    """One heatmap per unordered pair of weather parameters (10 in total).

    Cell (x, y) aggregates every frame of every scenario having those two
    levels, marginalising all remaining parameters.  ``statistic`` selects
    the aggregate: ``mean_sigma`` (mean per-frame ensemble spread) or
    ``pooled_mu_std`` (population std of the per-frame means, for
    single-model traces).
    """
    if statistic not in ("mean_sigma", "pooled_mu_std"):
        raise ValidationError(f"unknown heatmap statistic {statistic!r}")
    ordered = sorted(traces, key=lambda t: t.scenario_id)
    if not ordered:
        raise ValidationError("pairwise_heatmaps needs at least one trace")
    _lookup_scenarios(ordered, scenarios)
    _common_grid(ordered, "heatmap input")

    heatmaps = []
    for x_param, y_param in itertools.combinations(WEATHER_PARAMS, 2):
        x_levels = tuple(
            sorted({scenarios[t.scenario_id].weather.level(x_param) for t in ordered})
        )
        y_levels = tuple(
            sorted({scenarios[t.scenario_id].weather.level(y_param) for t in ordered})
        )
        samples: dict[tuple[float, float], list[float]] = {
            (x, y): [] for x in x_levels for y in y_levels
        }
        for trace in ordered:
            weather = scenarios[trace.scenario_id].weather
            cell = samples[(weather.level(x_param), weather.level(y_param))]
            if statistic == "mean_sigma":
                cell.extend(f.sigma for f in trace.frames)
            else:
                cell.extend(f.mu for f in trace.frames)
        empty = [key for key, values in samples.items() if not values]
        if empty:
            listed = ", ".join(f"({x_param}={x}, {y_param}={y})" for x, y in empty[:6])
            raise EmptyCellError(
                f"campaign is not factorial in ({x_param}, {y_param}); "
                f"empty cells: {listed}{'...' if len(empty) > 6 else ''}"
            )
        values = []
        counts = []
        for y in y_levels:
            row_values = []
            row_counts = []
            for x in x_levels:
                cell = samples[(x, y)]
                mean = sum(cell) / len(cell)
                if statistic == "pooled_mu_std":
                    var = sum((v - mean) ** 2 for v in cell) / len(cell)
                    row_values.append(math.sqrt(var))
                else:
                    row_values.append(mean)
                row_counts.append(len(cell))
            values.append(tuple(row_values))
            counts.append(tuple(row_counts))
        heatmaps.append(
            SensitivityHeatmap(
                x_param=x_param,
                y_param=y_param,
                x_levels=x_levels,
                y_levels=y_levels,
                values=tuple(values),
                counts=tuple(counts),
            )
        )
    return heatmaps


@dataclass(frozen=True)
class VerdictRow:
    scenario_id: str
    classification: Classification | None
    entry_distance_m: float | None
    mu_at_sd: float | None
    violation_count: int
    error: str | None = None


@dataclass(frozen=True)
class VerdictTable:
    rows: tuple[VerdictRow, ...]

    def all_nominal(self) -> bool:
        return all(
            row.error is None and row.classification is Classification.NOMINAL
            for row in self.rows
        )

    def counts(self) -> dict[str, int]:
        tally: dict[str, int] = {c.value: 0 for c in Classification}
        errors = 0
        for row in self.rows:
            if row.error is not None:
                errors += 1
            else:
                assert row.classification is not None
                tally[row.classification.value] += 1
        result = {name: n for name, n in tally.items() if n}
        if errors:
            result["Error"] = errors
        return result


def tabulate_verdicts(
    traces: Iterable[EnsembleTrace], params: SafetyParams
) -> VerdictTable:
    """Classify every trace; coverage problems become per-row errors."""
    rows = []
    for trace in sorted(traces, key=lambda t: t.scenario_id):
        try:
            verdict = classify(trace, params)
        except CoverageError as exc:
            rows.append(
                VerdictRow(
                    scenario_id=trace.scenario_id,
                    classification=None,
                    entry_distance_m=None,
                    mu_at_sd=None,
                    violation_count=0,
                    error=str(exc),
                )
            )
            continue
        rows.append(
            VerdictRow(
                scenario_id=trace.scenario_id,
                classification=verdict.classification,
                entry_distance_m=verdict.entry_distance_m,
                mu_at_sd=verdict.mu_at_sd,
                violation_count=len(verdict.violations),
            )
        )
    return VerdictTable(rows=tuple(rows))
