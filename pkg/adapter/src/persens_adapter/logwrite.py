"""Serialize scored frames to the canonical detection-log format.

The format is the integration boundary with the analysis toolchain, so the
writer reproduces it byte for byte: a one-line JSON header naming the
schema, version, and model roster, then one JSON object per record with
keys in a fixed order.  JSON uses default separators and raw (non-ASCII
escaped) text.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Sequence

from .runner import LogLine

LOG_SCHEMA = "detlog"
LOG_VERSION = 1


def header_line(models: Sequence[str]) -> str:
    header = {"schema": LOG_SCHEMA, "version": LOG_VERSION, "models": list(models)}
    return json.dumps(header, ensure_ascii=False) + "\n"


def record_line(line: LogLine) -> str:
    return (
        json.dumps(
            {
                "scenario_id": line.scenario_id,
                "model": line.model,
                "distance_m": line.distance_m,
                "confidence": line.confidence,
            },
            ensure_ascii=False,
        )
        + "\n"
    )


def write_log(
    path: str | Path, lines: Iterable[LogLine], models: Sequence[str]
) -> int:
    """Write a complete log file; returns the number of records written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        count = dump_log(fh, lines, models)
    return count


def dump_log(fh: IO[str], lines: Iterable[LogLine], models: Sequence[str]) -> int:
    fh.write(header_line(models))
    count = 0
    for line in lines:
        fh.write(record_line(line))
        count += 1
    return count
