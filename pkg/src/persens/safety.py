"""Safety-quadrant assessment of ensemble confidence traces.

A trace is safe when the ensemble mean crosses the confidence threshold
``theta`` while the object is still farther away than the stopping distance
``sd_m``, and stays consistent afterwards: once entered, the mean must not
fall back below the threshold.

Verdicts, in decision order:

* ``SystemicFailure`` — near-zero mean *and* near-zero spread at every frame
  in the window ``[sd, sd + systemic_window_m]``: the ensemble agrees the
  object is not there.
* ``NeverConfident`` — the mean never durably reaches ``theta``.
* ``DelayedDetection`` — the entry happens closer than the stopping distance.
* ``TemporalInconsistency`` — entry in time, but the mean later falls below
  the threshold.
* ``Nominal`` — entry in time and held.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

from .errors import CoverageError, FrameLookupError, ValidationError
from .ensemble import EnsembleTrace


class Classification(enum.Enum):
    NOMINAL = "Nominal"
    DELAYED_DETECTION = "DelayedDetection"
    TEMPORAL_INCONSISTENCY = "TemporalInconsistency"
    SYSTEMIC_FAILURE = "SystemicFailure"
    NEVER_CONFIDENT = "NeverConfident"


class ViolationKind(enum.Enum):
    CONFIDENCE_DROP = "ConfidenceDrop"
    BELOW_THRESHOLD_AFTER_ENTRY = "BelowThresholdAfterEntry"


@dataclass(frozen=True)
class ViolationEvent:
    kind: ViolationKind
    at_distance_m: float
    mu_before: float
    mu_after: float


@dataclass(frozen=True)
class SevereDrop:
    """Report annotation for a sharp drop between consecutive frames."""

    at_distance_m: float
    mu_before: float
    mu_after: float


@dataclass(frozen=True)
class SafetyParams:
    """Thresholds and distances that parameterise the assessment.

    ``reversal_delta`` only controls report annotations (see
    :func:`severe_drops`); it never changes the classification.
    """

    sd_m: float
    theta: float = 0.75
    theta_check: float = 0.20
    reversal_delta: float = 0.20
    systemic_mu_max: float = 0.10
    systemic_sigma_max: float = 0.05
    systemic_window_m: float = 10.0
    consistency_epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not self.sd_m > 0.0:
            raise ValidationError(f"sd_m must be > 0, got {self.sd_m}")
        if not 0.0 < self.theta <= 1.0:
            raise ValidationError(f"theta must be in (0, 1], got {self.theta}")
        if not 0.0 <= self.theta_check <= 1.0:
            raise ValidationError(
                f"theta_check must be in [0, 1], got {self.theta_check}"
            )
        if not 0.0 < self.reversal_delta <= 1.0:
            raise ValidationError(
                f"reversal_delta must be in (0, 1], got {self.reversal_delta}"
            )
        if not 0.0 <= self.systemic_mu_max <= 1.0:
            raise ValidationError(
                f"systemic_mu_max must be in [0, 1], got {self.systemic_mu_max}"
            )
        if not 0.0 <= self.systemic_sigma_max <= 1.0:
            raise ValidationError(
                f"systemic_sigma_max must be in [0, 1], got {self.systemic_sigma_max}"
            )
        if self.systemic_window_m < 0.0:
            raise ValidationError(
                f"systemic_window_m must be >= 0, got {self.systemic_window_m}"
            )
        if self.consistency_epsilon < 0.0:
            raise ValidationError(
                f"consistency_epsilon must be >= 0, got {self.consistency_epsilon}"
            )


@dataclass(frozen=True)
class SafetyVerdict:
    scenario_id: str
    classification: Classification
    entry_distance_m: float | None
    mu_at_sd: float
    violations: tuple[ViolationEvent, ...] = field(default=())


def entry_distance(trace: EnsembleTrace, params: SafetyParams) -> float | None:
    """Distance at which the trace durably enters the confident region.

    Returns the largest frame distance where ``mu >= theta`` *and* every
    subsequent frame down to the stopping distance keeps
    ``mu >= theta - consistency_epsilon``.  Frames closer than the stopping
    distance do not break the hold.  ``None`` when no such distance exists.
    """
    frames = trace.frames
    floor = params.theta - params.consistency_epsilon
    for i, frame in enumerate(frames):
        if frame.mu < params.theta:
            continue
        held = all(
            later.mu >= floor
            for later in frames[i + 1 :]
            if later.distance_m >= params.sd_m
        )
        if held:
            return frame.distance_m
    return None


def _pairs_from(
    trace: EnsembleTrace, from_distance_m: float
) -> Iterator[tuple[float, float, float]]:
    """Yield (distance_after, mu_before, mu_after) for consecutive frames."""
    started = False
    prev_mu: float | None = None
    for frame in trace.frames:
        if not started:
            if frame.distance_m == from_distance_m:
                started = True
                prev_mu = frame.mu
            continue
        assert prev_mu is not None
        yield frame.distance_m, prev_mu, frame.mu
        prev_mu = frame.mu
    if not started:
        raise FrameLookupError(
            f"trace {trace.scenario_id!r} has no frame at distance {from_distance_m}"
        )


def check_temporal_consistency(
    trace: EnsembleTrace, params: SafetyParams, from_distance_m: float
) -> tuple[ViolationEvent, ...]:
    """Violations of the hold condition from ``from_distance_m`` inward.

    The first time the mean falls below ``theta`` is reported as a single
    ``BelowThresholdAfterEntry`` event; any other pair where the mean both
    declines by more than ``consistency_epsilon`` and sits below ``theta``
    is a ``ConfidenceDrop``.
    """
    events: list[ViolationEvent] = []
    below_seen = False
    for at, mu_before, mu_after in _pairs_from(trace, from_distance_m):
        if not below_seen and mu_after < params.theta:
            below_seen = True
            events.append(
                ViolationEvent(
                    ViolationKind.BELOW_THRESHOLD_AFTER_ENTRY, at, mu_before, mu_after
                )
            )
        elif (
            mu_after < mu_before - params.consistency_epsilon
            and mu_after < params.theta
        ):
            events.append(
                ViolationEvent(ViolationKind.CONFIDENCE_DROP, at, mu_before, mu_after)
            )
    return tuple(events)


def severe_drops(trace: EnsembleTrace, reversal_delta: float) -> tuple[SevereDrop, ...]:
    """Consecutive-frame drops of at least ``reversal_delta``, anywhere.

    Purely an annotation aid for reports; never affects classification.
    """
    if not trace.frames:
        return ()
    drops = []
    for at, mu_before, mu_after in _pairs_from(trace, trace.frames[0].distance_m):
        if mu_before - mu_after >= reversal_delta:
            drops.append(SevereDrop(at, mu_before, mu_after))
    return tuple(drops)


def classify(trace: EnsembleTrace, params: SafetyParams) -> SafetyVerdict:
    """Classify one trace against the safety quadrant.

    The trace must cover at least one frame at or beyond the stopping
    distance, otherwise the assessment is undefined and a
    :class:`~persens.errors.CoverageError` is raised.
    """
    beyond = [f for f in trace.frames if f.distance_m >= params.sd_m]
    if not beyond:
        raise CoverageError(
            f"trace {trace.scenario_id!r} has no frame at or beyond "
            f"the stopping distance {params.sd_m} m"
        )
    mu_at_sd = beyond[-1].mu  # frame nearest to (at or just beyond) sd

    entry = entry_distance(trace, params)
    violations: tuple[ViolationEvent, ...] = ()
    if entry is not None:
        violations = check_temporal_consistency(trace, params, entry)

    window = [
        f
        for f in trace.frames
        if params.sd_m <= f.distance_m <= params.sd_m + params.systemic_window_m
    ]
    systemic = bool(window) and all(
        f.mu <= params.systemic_mu_max and f.sigma <= params.systemic_sigma_max
        for f in window
    )

    if systemic:
        cls = Classification.SYSTEMIC_FAILURE
    elif entry is None:
        cls = Classification.NEVER_CONFIDENT
    elif entry < params.sd_m:
        cls = Classification.DELAYED_DETECTION
    elif violations:
        cls = Classification.TEMPORAL_INCONSISTENCY
    else:
        cls = Classification.NOMINAL
    return SafetyVerdict(
        scenario_id=trace.scenario_id,
        classification=cls,
        entry_distance_m=entry,
        mu_at_sd=mu_at_sd,
        violations=violations,
    )
