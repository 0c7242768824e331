"""Low-confidence filtering and per-frame ensemble statistics.

Per-model confidences below a check threshold are treated as non-detections
and contribute 0.  A frame's mean and standard deviation are taken over the
*whole* ensemble (population statistics, divisor ``|members|``), with models
that produced no record at that distance contributing 0 as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateRecordError,
    EmptyTraceError,
    EnsembleSizeError,
    ValidationError,
)
from .units import DistanceM, Probability


@dataclass(frozen=True)
class DetectionRecord:
    """One model's confidence for one scenario at one distance."""

    scenario_id: str
    model: str
    distance_m: float
    confidence: float

    def __post_init__(self) -> None:
        if not self.scenario_id:
            raise ValidationError("scenario_id must be non-empty")
        if not self.model:
            raise ValidationError("model must be non-empty")
        object.__setattr__(self, "distance_m", float(DistanceM(self.distance_m)))
        object.__setattr__(self, "confidence", float(Probability(self.confidence)))


@dataclass(frozen=True)
class EnsembleFrame:
    """Filtered per-model confidences plus ensemble statistics at one distance."""

    distance_m: float
    filtered: Mapping[str, float]
    mu: float
    sigma: float


@dataclass(frozen=True)
class EnsembleTrace:
    """Frames for one scenario, ordered by strictly decreasing distance."""

    scenario_id: str
    frames: tuple[EnsembleFrame, ...]

    def distances(self) -> tuple[float, ...]:
        return tuple(f.distance_m for f in self.frames)

    def frame_at(self, distance_m: float) -> EnsembleFrame:
        from .errors import FrameLookupError

        for f in self.frames:
            if f.distance_m == distance_m:
                return f
        raise FrameLookupError(
            f"trace {self.scenario_id!r} has no frame at distance {distance_m}"
        )


def filter_confidence(confidence: float, theta_check: float) -> float:
    """Zero out confidences below ``theta_check``; values at the threshold pass."""
    p = float(Probability(confidence))
    return p if p >= theta_check else 0.0


def ensemble_frame(
    distance_m: float,
    confidences: Mapping[str, float],
    members: Sequence[str],
    theta_check: float,
) -> EnsembleFrame:
    """Build one frame from per-model confidences at a single distance.

    ``members`` fixes the ensemble; a member absent from ``confidences``
    contributes 0.  Requires at least two members.
    """
    ordered = sorted(set(members))
    if len(ordered) < 2:
        raise EnsembleSizeError(f"ensemble needs >= 2 members, got {len(ordered)}")
    unknown = set(confidences) - set(ordered)
    if unknown:
        raise ValidationError(
            f"confidences given for models outside the ensemble: {sorted(unknown)}"
        )
    filtered = {
        m: filter_confidence(confidences.get(m, 0.0), theta_check) for m in ordered
    }
    n = len(ordered)
    mu = sum(filtered[m] for m in ordered) / n
    var = sum((filtered[m] - mu) ** 2 for m in ordered) / n
    return EnsembleFrame(
        distance_m=float(DistanceM(distance_m)),
        filtered=filtered,
        mu=mu,
        sigma=math.sqrt(var),
    )


def build_trace(
    records: Iterable[DetectionRecord],
    members: Sequence[str],
    theta_check: float,
) -> EnsembleTrace:
    """Group records by distance and reduce each group to an ensemble frame.

    All records must belong to one scenario; duplicate (model, distance)
    pairs are rejected; the resulting frames are ordered from the farthest
    distance to the nearest.
    """
    scenario_id: str | None = None
    by_distance: dict[float, dict[str, float]] = {}
    for rec in records:
        if scenario_id is None:
            scenario_id = rec.scenario_id
        elif rec.scenario_id != scenario_id:
            raise ValidationError(
                f"records mix scenarios {scenario_id!r} and {rec.scenario_id!r}"
            )
        group = by_distance.setdefault(rec.distance_m, {})
        if rec.model in group:
            raise DuplicateRecordError(
                f"duplicate record for model {rec.model!r} at "
                f"distance {rec.distance_m} in scenario {rec.scenario_id!r}"
            )
        group[rec.model] = rec.confidence
    if scenario_id is None:
        raise EmptyTraceError("no records to build a trace from")
    frames = tuple(
        ensemble_frame(d, by_distance[d], members, theta_check)
        for d in sorted(by_distance, reverse=True)
    )
    return EnsembleTrace(scenario_id=scenario_id, frames=frames)
