"""Detector adapter: turns recorded drive frames into detection logs.

Wraps pretrained object detectors and recorded drive data (image folders
or bag files plus a distance sidecar), reduces per-frame detections of the
target class to a single confidence per model, and writes the canonical
detection-log format consumed by the analysis toolchain.  The log file is
the only integration boundary — this package shares no code with the
analysis side.
"""

from .detectors import (
    DEFAULT_TARGET_LABEL,
    Detection,
    Detector,
    StubDetector,
    load_detectors,
)
from .errors import (
    AdapterError,
    BagFormatError,
    ConfigError,
    FrameSourceError,
    ModelLoadError,
    SidecarError,
    TopicNotFoundError,
)
from .frames import (
    BagMessage,
    DistanceSidecar,
    FrameSample,
    iter_bag_frames,
    iter_folder_frames,
    load_sidecar,
    read_bag_messages,
)
from .logwrite import header_line, record_line, write_log
from .runner import (
    DEFAULT_THETA_CHECK,
    LogLine,
    RunResult,
    reduce_detections,
    run_models,
)

__version__ = "1.0.0"

__all__ = [
    "AdapterError",
    "BagFormatError",
    "BagMessage",
    "ConfigError",
    "DEFAULT_TARGET_LABEL",
    "DEFAULT_THETA_CHECK",
    "Detection",
    "Detector",
    "DistanceSidecar",
    "FrameSample",
    "FrameSourceError",
    "LogLine",
    "ModelLoadError",
    "RunResult",
    "SidecarError",
    "StubDetector",
    "TopicNotFoundError",
    "header_line",
    "iter_bag_frames",
    "iter_folder_frames",
    "load_detectors",
    "load_sidecar",
    "read_bag_messages",
    "record_line",
    "reduce_detections",
    "run_models",
    "write_log",
]
