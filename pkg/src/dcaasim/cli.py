"""Command-line entry point.

Every subcommand reads an optional JSON config and applies the common
overrides, then writes its CSV outputs plus a manifest into the output
directory. Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analysis import NullSearchError
from .harness import (
    ARCHITECTURES,
    ConfigError,
    RunConfig,
    load_config,
    run_beampattern,
    run_design,
    run_montecarlo,
    run_music_once,
    run_radius_sweep,
    run_rate_sweep,
    run_resolution_maps,
)

_COMMANDS = {
    "design": run_design,
    "beampattern": run_beampattern,
    "resolution": run_resolution_maps,
    "radius-sweep": run_radius_sweep,
    "music": run_music_once,
    "montecarlo": run_montecarlo,
    "rate": run_rate_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcaasim",
        description="Spherical DCAA ISAC simulator: design, beam patterns, "
        "2D MUSIC sensing and Monte-Carlo benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, _fn in _COMMANDS.items():
        p = sub.add_parser(name, help=f"run the {name} workflow")
        p.add_argument("--config", help="JSON config file", default=None)
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out-dir", default=None, help="output directory override")
        p.add_argument(
            "--arch",
            choices=ARCHITECTURES,
            default=None,
            help="restrict to one architecture (default: both)",
        )
        p.add_argument("--trials", type=int, default=None, help="trial count override")
        p.add_argument("--workers", type=int, default=None, help="worker process count")
    return parser


def _apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    doc = config.to_dict()
    if args.seed is not None:
        doc["master_seed"] = args.seed
    if args.out_dir is not None:
        doc["out_dir"] = args.out_dir
    if args.arch is not None:
        doc["architectures"] = [args.arch]
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.workers is not None:
        doc["workers"] = args.workers
    return RunConfig.from_dict(doc)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else RunConfig()
        config = _apply_overrides(config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NullSearchError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    summary = {k: v for k, v in result.items() if isinstance(v, (str, int, float, bool))}
    print(json.dumps(summary, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
