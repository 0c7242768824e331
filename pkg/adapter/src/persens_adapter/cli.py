"""Command-line entry point: score recorded frames into a detection log.

One subcommand, ``run``: read frames from an image folder or a recorded
bag topic, attach ground-truth distances from a sidecar CSV, score every
frame with every configured detector, and write the canonical detection
log. Runtime failures print ``persens-adapter: error: ...`` and exit 1;
usage errors exit 2.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from .detectors import load_detectors
from .errors import AdapterError
from .frames import iter_bag_frames, iter_folder_frames, load_sidecar
from .logwrite import write_log
from .runner import DEFAULT_THETA_CHECK, run_models


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persens-adapter",
        description="Score recorded drive frames into a detection log.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="score frames and write a detection log")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--images", help="folder of frame images")
    source.add_argument("--bag", help="recorded bag file")
    run.add_argument("--topic", help="image topic inside the bag")
    run.add_argument(
        "--distances", required=True, help="distance sidecar CSV (ground truth)"
    )
    run.add_argument("--detectors", required=True, help="detector config JSON")
    run.add_argument(
        "--scenario-id", required=True, help="scenario id stamped on every record"
    )
    run.add_argument(
        "--theta-check",
        type=float,
        default=DEFAULT_THETA_CHECK,
        help="reporting floor: scores below this are published as 0.0",
    )
    run.add_argument("--workers", type=int, default=1, help="parallel model workers")
    run.add_argument("--out", required=True, help="output log path")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    if args.bag is not None and args.topic is None:
        raise AdapterError("--bag requires --topic")
    if args.images is not None and args.topic is not None:
        raise AdapterError("--topic only applies to --bag sources")

    sidecar = load_sidecar(args.distances)
    if args.images is not None:
        frames = list(iter_folder_frames(args.images, sidecar, args.scenario_id))
    else:
        frames = list(iter_bag_frames(args.bag, args.topic, sidecar, args.scenario_id))

    detectors, target_label = load_detectors(args.detectors)
    result = run_models(
        frames,
        detectors,
        args.theta_check,
        target_label=target_label,
        workers=args.workers,
    )
    models = [d.name for d in detectors]
    count = write_log(args.out, result.lines, models)
    print(f"{count} records -> {args.out}")
    if result.skipped_frames:
        print(f"skipped {result.skipped_frames} frame(s) without distance")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="persens-adapter: %(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _cmd_run(args)
    except AdapterError as exc:
        print(f"persens-adapter: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
