"""Command-line front end: ``kerrnqs run | sweep | presets``.

Exit status: 0 success, 1 usage/configuration/I-O error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .fock import NumericalError
from .scenario import KEYS, PRESETS, ConfigError, parse_config, preset_text, run_scenario, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_scenario_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS))
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--name", help="scenario name used for output files")
    parser.add_argument("--output-dir", default=".", help="directory for CSV/JSON output")
    parser.add_argument(
        "--no-timing",
        action="store_true",
        help="write runtime_seconds as null so the JSON is byte-reproducible",
    )
    group = parser.add_argument_group("config keys (override file and preset values)")
    for key in KEYS:
        group.add_argument(f"--{key}", metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kerrnqs", description="Kicked Kerr coupler simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one scenario")
    _add_scenario_args(run)

    sweep = sub.add_parser("sweep", help="simulate one scenario per value of a key")
    _add_scenario_args(sweep)
    sweep.add_argument("--key", required=True)
    sweep.add_argument("--values", nargs="*", default=[])
    sweep.add_argument("--workers", type=int, default=1)

    presets = sub.add_parser("presets", help="list presets or print one as a config file")
    presets.add_argument("preset", nargs="?", choices=sorted(PRESETS))
    return parser


def _scenario_from_args(args):
    overrides = {k: getattr(args, k) for k in KEYS if getattr(args, k) is not None}
    return parse_config(args.config, overrides, args.preset, args.name)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            if args.preset is None:
                print("\n".join(sorted(PRESETS)))
            else:
                sys.stdout.write(preset_text(args.preset))
            return EXIT_OK

        scenario = _scenario_from_args(args)
        timing = not args.no_timing
        if args.command == "run":
            result = run_scenario(scenario, args.output_dir, timing)
            print(json.dumps(result.summary, indent=2))
        else:
            aggregate = run_sweep(
                scenario, args.key, args.values, args.output_dir, args.workers, timing
            )
            if aggregate is not None:
                print(json.dumps({k: v for k, v in aggregate.items() if k != "runs"}, indent=2))
        return EXIT_OK
    except ConfigError as exc:
        print(f"kerrnqs: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"kerrnqs: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"kerrnqs: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
