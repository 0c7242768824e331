"""Command-line pipeline: grid -> simulate -> assess / curves / heatmap / report.

Per-scenario stages run through a worker pool (``--workers`` or the
``PERSENS_WORKERS`` environment variable); outputs are written in scenario
order, so results are identical at any parallelism.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

from . import analytics, logio, reports, svgchart
from .errors import PersensError
from .safety import severe_drops
from .scenarios import expand
from .synth import simulate_scenario

WORKERS_ENV_VAR = "PERSENS_WORKERS"

_T = TypeVar("_T")
_R = TypeVar("_R")


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV_VAR)
    if raw is None:
        return 1
    try:
        count = int(raw)
    except ValueError:
        raise PersensError(f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}") from None
    if count < 1:
        raise PersensError(f"{WORKERS_ENV_VAR} must be >= 1, got {count}")
    return count


def _pooled_map(
    fn: Callable[[_T], _R], items: Iterable[_T], workers: int
) -> Iterator[_R]:
    """Order-preserving map, threaded when workers > 1."""
    if workers <= 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, items)


def _add_workers_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help=f"worker pool size (default: ${WORKERS_ENV_VAR} or 1)",
    )


def _resolve_workers(args: argparse.Namespace) -> int:
    if args.workers is None:
        return _default_workers()
    if args.workers < 1:
        raise PersensError(f"--workers must be >= 1, got {args.workers}")
    return args.workers


def _cmd_grid(args: argparse.Namespace) -> int:
    manifest = logio.resolve_manifest(args.manifest)
    scenarios = expand(manifest)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    logio.save_scenarios(out_dir / "scenarios.json", scenarios)
    logio.save_manifest(out_dir / "manifest.json", manifest)
    print(f"{len(scenarios)} scenarios")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    campaign = logio.load_campaign(args.campaign)
    seed = campaign.seed if args.seed is None else args.seed
    scenarios = expand(campaign.manifest)
    profiles = campaign.profiles
    workers = _resolve_workers(args)
    with logio.LogWriter(args.out, models=[p.model for p in profiles]) as writer:
        for records in _pooled_map(
            lambda sc: simulate_scenario(sc, profiles, seed), scenarios, workers
        ):
            writer.write_records(records)
        count = writer.count
    print(f"{count} records -> {args.out}")
    return 0


def _cmd_assess(args: argparse.Namespace) -> int:
    safety = logio.load_safety(args.safety)
    log = logio.open_log(args.log)
    traces = logio.iter_traces(log, safety.theta_check)
    table = analytics.tabulate_verdicts(traces, safety)
    reports.write_verdicts_csv(args.out, table)
    summary = ", ".join(f"{name}={n}" for name, n in table.counts().items())
    print(f"{len(table.rows)} scenarios: {summary}")
    return 0 if table.all_nominal() else 2


def _load_traces(args: argparse.Namespace) -> list:
    log = logio.open_log(args.log)
    return list(
        logio.iter_traces(log, args.theta_check, model=args.model)
    )


def _cmd_curves(args: argparse.Namespace) -> int:
    scenarios = {s.scenario_id: s for s in logio.load_scenarios(args.scenarios)}
    traces = _load_traces(args)
    by = [field.strip() for field in args.group_by.split(",") if field.strip()]
    curves = analytics.group_curves(traces, scenarios, by)
    reports.write_curves_csv(args.out, curves)
    print(f"{len(curves)} curves -> {args.out}")
    return 0


def _cmd_heatmap(args: argparse.Namespace) -> int:
    scenarios = {s.scenario_id: s for s in logio.load_scenarios(args.scenarios)}
    traces = _load_traces(args)
    statistic = "mean_sigma" if args.model is None else "pooled_mu_std"
    heatmaps = analytics.pairwise_heatmaps(traces, scenarios, statistic=statistic)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for hm in heatmaps:
        base = reports.heatmap_basename(hm)
        reports.write_heatmap_csv(out_dir / f"{base}.csv", hm)
        if args.format == "svg":
            (out_dir / f"{base}.svg").write_text(
                svgchart.heatmap_chart(hm), encoding="utf-8"
            )
    print(f"{len(heatmaps)} heatmaps -> {out_dir}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    safety = logio.load_safety(args.safety)
    log = logio.open_log(args.log)
    traces = logio.iter_traces(log, safety.theta_check, model=args.model)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for trace in traces:
        if args.format == "csv":
            reports.write_trace_csv(out_dir / f"{trace.scenario_id}.csv", trace)
        else:
            drops = severe_drops(trace, safety.reversal_delta)
            (out_dir / f"{trace.scenario_id}.svg").write_text(
                svgchart.trace_chart(trace, safety, drops), encoding="utf-8"
            )
        count += 1
    print(f"{count} reports -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persens",
        description=(
            "Ensemble sensitivity and stopping-distance safety analytics "
            "for stop-sign perception."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grid", help="expand a campaign manifest to a scenario list")
    p.add_argument("--manifest", required=True,
                   help="manifest file, or builtin name (set1, baseline)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_grid)

    p = sub.add_parser("simulate", help="run the synthetic detector ensemble")
    p.add_argument("--campaign", required=True, help="campaign document")
    p.add_argument("--seed", type=int, default=None,
                   help="override the campaign seed")
    _add_workers_flag(p)
    p.add_argument("--out", required=True, help="output detection log")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("assess", help="classify each scenario of a log")
    p.add_argument("--log", required=True, help="detection log")
    p.add_argument("--safety", required=True, help="safety parameter document")
    p.add_argument("--out", required=True, help="output verdict CSV")
    _add_workers_flag(p)
    p.set_defaults(fn=_cmd_assess)

    p = sub.add_parser("curves", help="grouped mean confidence curves")
    p.add_argument("--log", required=True, help="detection log")
    p.add_argument("--scenarios", required=True, help="scenario list (from grid)")
    p.add_argument("--group-by", required=True,
                   help="comma-separated fields, e.g. occlusion,fog")
    p.add_argument("--theta-check", type=float, default=0.20,
                   help="low-confidence filter threshold (default 0.20)")
    p.add_argument("--model", default=None, help="restrict to one model")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(fn=_cmd_curves)

    p = sub.add_parser("heatmap", help="pairwise weather sensitivity heatmaps")
    p.add_argument("--log", required=True, help="detection log")
    p.add_argument("--scenarios", required=True, help="scenario list (from grid)")
    p.add_argument("--theta-check", type=float, default=0.20,
                   help="low-confidence filter threshold (default 0.20)")
    p.add_argument("--model", default=None, help="restrict to one model")
    p.add_argument("--format", choices=("csv", "svg"), default="csv",
                   help="csv matrices only, or csv plus svg charts")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_heatmap)

    p = sub.add_parser("report", help="per-scenario confidence charts")
    p.add_argument("--log", required=True, help="detection log")
    p.add_argument("--safety", required=True, help="safety parameter document")
    p.add_argument("--model", default=None, help="restrict to one model")
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (PersensError, OSError) as exc:
        print(f"persens: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
