"""Command-line front end: `ipsl <config.cfg> [--out DIR] [--seed N] ...`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigurationError
from .experiment import parse_config
from .runner import execute


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipsl",
        description=(
            "Batch runner for the influence-process simulator: "
            "funding-loop runs, network emergence, structure evolution, "
            "and learning ablations."
        ),
    )
    parser.add_argument("config", help="experiment config file (key = value sections)")
    parser.add_argument("--out", help="output directory (overrides the config file)")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config file)")
    parser.add_argument(
        "--replications", type=int, help="replication count (overrides the config file)"
    )
    parser.add_argument(
        "--threads", type=int, help="worker threads, 0 = all cores (overrides the config file)"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    path = Path(args.config)
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"ipsl: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
        if args.out is not None:
            config.out_dir = args.out
        if args.seed is not None:
            config.master_seed = args.seed
        if args.replications is not None:
            config.replications = args.replications
        if args.threads is not None:
            config.threads = args.threads
        config.validate()
    except ConfigurationError as exc:
        print(f"ipsl: config error: {exc}", file=sys.stderr)
        return 2
    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
