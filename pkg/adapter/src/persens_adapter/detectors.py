"""Detector backends behind a common per-frame interface.

Models are declared in a JSON config file (name + backend + weights path);
the adapter never pins framework versions.  The ``stub`` backend replays
detections recorded in a JSON table and exists so that the full pipeline is
testable without any ML stack; real backends are loaded lazily and fail
with a named error when their package is missing.
"""

from __future__ import annotations

import importlib.util
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from .errors import ConfigError, ModelLoadError
from .frames import FrameSample

#: Object class profiled by the safety analysis (COCO name).
DEFAULT_TARGET_LABEL = "stop sign"


@dataclass(frozen=True)
class Detection:
    """One predicted box: class label and confidence score."""

    label: str
    confidence: float


class Detector(Protocol):
    name: str

    def detect(self, frame: FrameSample) -> Sequence[Detection]:
        """All predicted boxes for one frame."""


@dataclass(frozen=True)
class StubDetector:
    """Replays per-frame detections from a JSON table keyed by frame id.

    Table layout: ``{"frame_0001.png": [{"label": "stop sign",
    "confidence": 0.9}, ...], ...}``.  Frames without an entry produce no
    detections.
    """

    name: str
    table: dict[str, tuple[Detection, ...]]

    def detect(self, frame: FrameSample) -> tuple[Detection, ...]:
        return self.table.get(frame.frame_id, ())


def _load_stub(name: str, weights: Path) -> StubDetector:
    if not weights.exists():
        raise ModelLoadError(f"model {name!r}: stub table {weights} does not exist")
    try:
        raw = json.loads(weights.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"model {name!r}: invalid stub table: {exc}") from None
    if not isinstance(raw, dict):
        raise ModelLoadError(f"model {name!r}: stub table must be an object")
    table: dict[str, tuple[Detection, ...]] = {}
    for frame_id, entries in raw.items():
        if not isinstance(entries, list):
            raise ModelLoadError(
                f"model {name!r}: detections for {frame_id!r} must be a list"
            )
        boxes = []
        for entry in entries:
            try:
                label = entry["label"]
                confidence = float(entry["confidence"])
            except (TypeError, KeyError, ValueError) as exc:
                raise ModelLoadError(
                    f"model {name!r}: bad detection entry for {frame_id!r}: {exc}"
                ) from None
            if not 0.0 <= confidence <= 1.0:
                raise ModelLoadError(
                    f"model {name!r}: confidence out of [0, 1] for {frame_id!r}: "
                    f"{confidence}"
                )
            boxes.append(Detection(label=str(label), confidence=confidence))
        table[frame_id] = tuple(boxes)
    return StubDetector(name=name, table=table)


#: Real backends and the package each one needs at load time.
_REAL_BACKENDS = {
    "ultralytics": "ultralytics",
    "detr": "transformers",
}


def _load_real(name: str, backend: str, weights: Path) -> Detector:
    package = _REAL_BACKENDS[backend]
    if importlib.util.find_spec(package) is None:
        raise ModelLoadError(
            f"model {name!r}: backend {backend!r} needs the {package!r} package, "
            "which is not installed; use the 'stub' backend for offline runs"
        )
    # Lazy import keeps the hard dependency out of every non-inference path.
    raise ModelLoadError(
        f"model {name!r}: backend {backend!r} found {package!r} but no weights "
        f"loader is wired for {weights}; use the 'stub' backend"
    )


def load_detectors(config_path: str | Path) -> tuple[tuple[Detector, ...], str]:
    """Load the detector bank from a config file.

    Returns ``(detectors, target_label)``.  Weight paths resolve relative
    to the config file's directory.
    """
    p = Path(config_path)
    if not p.exists():
        raise ConfigError(f"{p}: config file does not exist")
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or obj.get("schema") != "detectors":
        raise ConfigError(f"{p}: expected a document with schema 'detectors'")
    if obj.get("version") != 1:
        raise ConfigError(f"{p}: unsupported version {obj.get('version')!r}")
    target = obj.get("target_label", DEFAULT_TARGET_LABEL)
    if not isinstance(target, str) or not target:
        raise ConfigError(f"{p}: target_label must be a non-empty string")
    models = obj.get("models")
    if not isinstance(models, list) or not models:
        raise ConfigError(f"{p}: 'models' must be a non-empty list")

    detectors: list[Detector] = []
    seen: set[str] = set()
    for i, entry in enumerate(models):
        if not isinstance(entry, dict):
            raise ConfigError(f"{p}: model entry {i} must be an object")
        try:
            name = entry["name"]
            backend = entry["backend"]
            weights_ref = entry["weights"]
        except KeyError as exc:
            raise ConfigError(f"{p}: model entry {i} is missing {exc}") from None
        if not isinstance(name, str) or not name:
            raise ConfigError(f"{p}: model entry {i}: name must be non-empty")
        if name in seen:
            raise ConfigError(f"{p}: duplicate model name {name!r}")
        seen.add(name)
        weights = Path(weights_ref)
        if not weights.is_absolute():
            weights = p.parent / weights
        if backend == "stub":
            detectors.append(_load_stub(name, weights))
        elif backend in _REAL_BACKENDS:
            detectors.append(_load_real(name, backend, weights))
        else:
            known = ", ".join(["stub", *sorted(_REAL_BACKENDS)])
            raise ConfigError(
                f"{p}: model entry {i}: unknown backend {backend!r} (known: {known})"
            )
    return tuple(detectors), target
