"""Minimal static SVG charts; no plotting dependencies.

Charts draw the approach left-to-right (far distances on the left), so the
safe region sits in the top-left quadrant formed by the generated stopping
distance and confidence-threshold guide lines.
"""

from __future__ import annotations

from typing import Sequence

from .analytics import SensitivityHeatmap
from .ensemble import EnsembleTrace
from .errors import ValidationError
from .safety import SafetyParams, SevereDrop


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


class _Canvas:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}" '
            'font-family="Helvetica, Arial, sans-serif">',
            f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str,
             width: float = 1.0, dash: str | None = None) -> None:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width}"{dash_attr}/>'
        )

    def polyline(self, points: Sequence[tuple[float, float]], stroke: str,
                 width: float = 2.0) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"/>'
        )

    def polygon(self, points: Sequence[tuple[float, float]], fill: str,
                opacity: float = 1.0) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(
            f'<polygon points="{coords}" fill="{fill}" fill-opacity="{opacity}" '
            'stroke="none"/>'
        )

    def rect(self, x: float, y: float, w: float, h: float, fill: str,
             stroke: str | None = None) -> None:
        stroke_attr = f' stroke="{stroke}"' if stroke else ""
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}"{stroke_attr}/>'
        )

    def circle(self, x: float, y: float, r: float, fill: str) -> None:
        self.parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{fill}"/>'
        )

    def text(self, x: float, y: float, content: str, size: int = 11,
             anchor: str = "start", fill: str = "#333333",
             rotate: float | None = None) -> None:
        transform = (
            f' transform="rotate({rotate} {x:.2f} {y:.2f})"' if rotate is not None else ""
        )
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" '
            f'text-anchor="{anchor}" fill="{fill}"{transform}>{_escape(content)}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def trace_chart(
    trace: EnsembleTrace,
    params: SafetyParams | None = None,
    drops: Sequence[SevereDrop] = (),
    title: str | None = None,
) -> str:
    """Mean-confidence-vs-distance chart with a +/- sigma band.

    With ``params`` given, vertical/horizontal guide lines mark the stopping
    distance and the confidence threshold; ``drops`` are marked with dots.
    """
    if not trace.frames:
        raise ValidationError("cannot chart an empty trace")
    width, height = 720, 420
    left, right, top, bottom = 62.0, 20.0, 40.0, 52.0
    plot_w = width - left - right
    plot_h = height - top - bottom
    distances = trace.distances()
    d_max, d_min = distances[0], distances[-1]
    span = d_max - d_min if d_max > d_min else 1.0

    def x_of(d: float) -> float:
        return left + (d_max - d) / span * plot_w

    def y_of(v: float) -> float:
        return top + (1.0 - v) * plot_h

    c = _Canvas(width, height)
    c.text(left, 22, title if title is not None else f"scenario {trace.scenario_id}",
           size=14, fill="#111111")

    # Axes and gridlines.
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y_of(frac)
        c.line(left, y, left + plot_w, y, "#dddddd")
        c.text(left - 8, y + 4, f"{frac:.2f}", anchor="end")
    for d in distances:
        x = x_of(d)
        c.line(x, top + plot_h, x, top + plot_h + 4, "#888888")
    step = max(1, len(distances) // 8)
    for d in distances[::step]:
        c.text(x_of(d), top + plot_h + 18, _fmt(d), anchor="middle")
    c.line(left, top, left, top + plot_h, "#333333")
    c.line(left, top + plot_h, left + plot_w, top + plot_h, "#333333")
    c.text(left + plot_w / 2, height - 12, "distance to object (m)", anchor="middle")
    c.text(16, top + plot_h / 2, "ensemble confidence", anchor="middle", rotate=-90.0)

    # Sigma band, then the mean on top.
    upper = [(x_of(f.distance_m), y_of(min(1.0, f.mu + f.sigma))) for f in trace.frames]
    lower = [(x_of(f.distance_m), y_of(max(0.0, f.mu - f.sigma))) for f in trace.frames]
    c.polygon(upper + lower[::-1], fill="#6699cc", opacity=0.25)
    c.polyline([(x_of(f.distance_m), y_of(f.mu)) for f in trace.frames], "#1f4e8c")

    if params is not None:
        theta_y = y_of(params.theta)
        c.line(left, theta_y, left + plot_w, theta_y, "#2e8b57", dash="6,4")
        c.text(left + plot_w - 4, theta_y - 6, f"theta={_fmt(params.theta)}",
               anchor="end", fill="#2e8b57")
        if d_min <= params.sd_m <= d_max:
            sd_x = x_of(params.sd_m)
            c.line(sd_x, top, sd_x, top + plot_h, "#b22222", dash="6,4")
            c.text(sd_x + 4, top + 14, f"sd={_fmt(params.sd_m)} m", fill="#b22222")

    for drop in drops:
        c.circle(x_of(drop.at_distance_m), y_of(drop.mu_after), 4.5, "#e07b00")
    if drops:
        c.text(left + 4, top + plot_h - 8,
               f"{len(drops)} severe drop(s) marked", fill="#e07b00")
    return c.render()


def heatmap_chart(hm: SensitivityHeatmap, title: str | None = None) -> str:
    """Color-matrix rendering of one sensitivity heatmap."""
    cell_w, cell_h = 96, 54
    left, top = 120.0, 56.0
    width = int(left + cell_w * len(hm.x_levels) + 40)
    height = int(top + cell_h * len(hm.y_levels) + 70)
    c = _Canvas(width, height)
    c.text(left, 24, title if title is not None else f"{hm.y_param} vs {hm.x_param}",
           size=14, fill="#111111")
    vmax = max((v for row in hm.values for v in row), default=0.0)
    for yi, y_level in enumerate(hm.y_levels):
        for xi, x_level in enumerate(hm.x_levels):
            v = hm.values[yi][xi]
            frac = 0.0 if vmax <= 0.0 else v / vmax
            # White -> deep red ramp.
            red = 255
            green = blue = round(255 * (1.0 - 0.85 * frac))
            x = left + xi * cell_w
            y = top + yi * cell_h
            c.rect(x, y, cell_w, cell_h, f"rgb({red},{green},{blue})", stroke="#999999")
            c.text(x + cell_w / 2, y + cell_h / 2 + 4, f"{v:.3f}",
                   anchor="middle", fill="#111111")
    for xi, x_level in enumerate(hm.x_levels):
        c.text(left + xi * cell_w + cell_w / 2, top + cell_h * len(hm.y_levels) + 18,
               _fmt(x_level), anchor="middle")
    for yi, y_level in enumerate(hm.y_levels):
        c.text(left - 10, top + yi * cell_h + cell_h / 2 + 4, _fmt(y_level),
               anchor="end")
    c.text(left + cell_w * len(hm.x_levels) / 2,
           top + cell_h * len(hm.y_levels) + 42, hm.x_param, anchor="middle")
    c.text(24, top + cell_h * len(hm.y_levels) / 2, hm.y_param,
           anchor="middle", rotate=-90.0)
    return c.render()
