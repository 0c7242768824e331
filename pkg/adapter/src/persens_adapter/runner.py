"""Reduce per-frame detector output to one confidence per (frame, model).

Each detector may report any number of boxes per frame; only boxes whose
label matches the target class count, and the frame's score is the maximum
of their confidences (0.0 when none match).  Scores below the reporting
floor are published as 0.0 — the same floor the downstream ensemble
reduction applies, so flooring here is idempotent.

Frames may be scored in parallel, one worker per model; results are sorted
by (scenario, distance descending, model) before writing so output is
deterministic regardless of worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .detectors import Detector
from .errors import AdapterError
from .frames import FrameSample

logger = logging.getLogger("persens_adapter")

#: Reporting floor: scores below this are published as 0.0.
DEFAULT_THETA_CHECK = 0.20


@dataclass(frozen=True)
class LogLine:
    """One detection-log record, ready for serialization."""

    scenario_id: str
    model: str
    distance_m: float
    confidence: float


def reduce_detections(labels_scores, target_label: str) -> float:
    """Max confidence over boxes of the target class; 0.0 when none match.

    Idempotent and order-independent: the max over any permutation, or over
    a stream that already collapsed to its max, is the same value.
    """
    best = 0.0
    for label, confidence in labels_scores:
        if label == target_label and confidence > best:
            best = confidence
    return best


def _score_model(
    detector: Detector,
    frames: Sequence[FrameSample],
    target_label: str,
    theta_check: float,
) -> list[LogLine]:
    lines = []
    for frame in frames:
        boxes = detector.detect(frame)
        score = reduce_detections(((b.label, b.confidence) for b in boxes), target_label)
        if score < theta_check:
            score = 0.0
        lines.append(
            LogLine(
                scenario_id=frame.scenario_id,
                model=detector.name,
                distance_m=frame.distance_m,
                confidence=score,
            )
        )
    return lines


@dataclass(frozen=True)
class RunResult:
    lines: tuple[LogLine, ...]
    skipped_frames: int


def run_models(
    frames: Sequence[FrameSample],
    detectors: Sequence[Detector],
    theta_check: float = DEFAULT_THETA_CHECK,
    *,
    target_label: str = "stop sign",
    workers: int = 1,
) -> RunResult:
    """Score every usable frame with every detector.

    Frames without distance ground truth cannot feed the safety analysis;
    they are skipped with a logged warning and counted in the result.
    Output is sorted by (scenario, distance descending, model).
    """
    if not 0.0 <= theta_check < 1.0:
        raise AdapterError(f"theta_check must be in [0, 1), got {theta_check}")
    if workers < 1:
        raise AdapterError(f"workers must be >= 1, got {workers}")
    if not detectors:
        raise AdapterError("at least one detector is required")

    usable: list[FrameSample] = []
    skipped = 0
    for frame in frames:
        if frame.distance_m is None:
            skipped += 1
            logger.warning(
                "frame %s has no distance ground truth; skipped", frame.frame_id
            )
            continue
        usable.append(frame)
    if skipped:
        logger.warning("%d frame(s) skipped for missing distance", skipped)

    if workers == 1 or len(detectors) == 1:
        per_model = [
            _score_model(d, usable, target_label, theta_check) for d in detectors
        ]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(detectors))) as pool:
            per_model = list(
                pool.map(
                    lambda d: _score_model(d, usable, target_label, theta_check),
                    detectors,
                )
            )

    lines = [line for batch in per_model for line in batch]
    lines.sort(key=lambda l: (l.scenario_id, -l.distance_m, l.model))
    return RunResult(lines=tuple(lines), skipped_frames=skipped)
