"""Command line entry point: ``nbreliability run|validate --config FILE``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .experiment import default_jobs, filter_config, read_config, run_experiment, validate_config

LOG_ENV = "NBRELIABILITY_LOG_LEVEL"


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbreliability",
        description="Uncertainty vs. robustness reliability benchmark for Naive Bayes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "run the benchmark and write all outputs"),
                            ("validate", "parse the config and manifests only")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML experiment config")
        p.add_argument("--datasets", type=lambda s: [x for x in s.split(",") if x],
                       help="comma-separated dataset names to keep")
        p.add_argument("--seed", type=int, help="override master_seed (unsigned 64-bit)")
        p.add_argument("--out", help="override output_dir")
        if name == "run":
            p.add_argument("--jobs", type=int, default=1,
                           help="datasets processed in parallel, 0 for one per CPU "
                                "(output is identical)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get(LOG_ENV, "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = _parser().parse_args(argv)
    try:
        config = filter_config(read_config(args.config), args.datasets, args.seed, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        problems = validate_config(config)
        for p in problems:
            print(p, file=sys.stderr)
        if not problems:
            print(f"ok: {len(config.manifests)} dataset(s)")
        return 1 if problems else 0

    status, results = run_experiment(config, jobs=args.jobs if args.jobs > 0 else default_jobs())
    print(f"{len(results)} dataset(s) written to {config.output_dir}")
    return status


if __name__ == "__main__":
    sys.exit(main())
