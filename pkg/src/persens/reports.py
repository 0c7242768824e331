"""CSV and SVG emission for assessment results and aggregates.

CSV numbers are written with six decimal places; logs keep full precision.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .analytics import GroupedCurve, SensitivityHeatmap, VerdictTable
from .ensemble import EnsembleTrace


def _num(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def write_verdicts_csv(path: str | Path, table: VerdictTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "scenario_id",
                "classification",
                "entry_distance_m",
                "mu_at_sd",
                "violation_count",
                "error",
            ]
        )
        for row in table.rows:
            writer.writerow(
                [
                    row.scenario_id,
                    "" if row.classification is None else row.classification.value,
                    _num(row.entry_distance_m),
                    _num(row.mu_at_sd),
                    row.violation_count,
                    row.error or "",
                ]
            )


def write_curves_csv(path: str | Path, curves: Sequence[GroupedCurve]) -> None:
    if not curves:
        raise ValueError("no curves to write")
    fields = [name for name, _ in curves[0].key]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields + ["scenario_count", "distance_m", "mean_mu", "mean_sigma"])
        for curve in curves:
            key_values = [
                value if isinstance(value, str) else _num(float(value))
                for _, value in curve.key
            ]
            for point in curve.points:
                writer.writerow(
                    key_values
                    + [
                        curve.scenario_count,
                        _num(point.distance_m),
                        _num(point.mean_mu),
                        _num(point.mean_sigma),
                    ]
                )


def heatmap_basename(hm: SensitivityHeatmap) -> str:
    return f"heatmap_{hm.x_param}__{hm.y_param}"


def write_heatmap_csv(path: str | Path, hm: SensitivityHeatmap) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [f"{hm.y_param}\\{hm.x_param}"] + [_num(x) for x in hm.x_levels]
        )
        for yi, y_level in enumerate(hm.y_levels):
            writer.writerow(
                [_num(y_level)] + [_num(v) for v in hm.values[yi]]
            )


def write_trace_csv(path: str | Path, trace: EnsembleTrace) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["distance_m", "mu", "sigma"])
        for frame in trace.frames:
            writer.writerow([_num(frame.distance_m), _num(frame.mu), _num(frame.sigma)])
