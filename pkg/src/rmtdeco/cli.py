"""Command line front end: run a study config and export its tables.

Usage:
    rmtdeco <study> --config study.cfg --out results/ [--seed N]
                    [--workers K] [--format csv]

where <study> is one of convergence, werner, layers, ensemble and must
match the ``study`` key of the config file. Exit codes: 0 success, 2 bad
configuration, 3 numerical-regime failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .errors import ConfigError, NumericalRegimeError
from .experiments import STUDY_KINDS, ExperimentConfig, export_result, run_study

_HELP = {
    "convergence": "sweep environment sizes against second-order predictions",
    "werner": "measure Werner-ness of partition means of a Bell ensemble",
    "layers": "compare Monte-Carlo, kernel-integral, and Markov descriptions",
    "ensemble": "summarize one Monte-Carlo ensemble over the times",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtdeco",
        description="decoherence studies with random-matrix environments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STUDY_KINDS:
        sp = sub.add_parser(name, help=_HELP[name])
        sp.add_argument("--config", required=True,
                        help="path to a flat key = value study config")
        sp.add_argument("--out", required=True,
                        help="directory for the CSV, schema, and manifest")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config's root_seed")
        sp.add_argument("--workers", type=int, default=0,
                        help="worker processes (results are identical for "
                             "any count)")
        sp.add_argument("--format", default="csv", choices=("csv",),
                        help="output table format")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_file(args.config)
        if config.study != args.command:
            raise ConfigError(
                f"config declares study {config.study!r} but the "
                f"{args.command!r} command was invoked")
        if args.seed is not None:
            config = dataclasses.replace(config, root_seed=args.seed)
        result = run_study(config, workers=args.workers)
        for path in export_result(result, args.out, fmt=args.format):
            print(path)
        return 0
    except ConfigError as exc:
        print(f"rmtdeco: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalRegimeError as exc:
        print(f"rmtdeco: numerical regime error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"rmtdeco: i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
