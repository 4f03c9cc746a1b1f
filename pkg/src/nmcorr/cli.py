"""Command-line interface.

Subcommands: ``correlate``, ``spectrum``, ``sweep``, ``oracle-compare`` and
``preset list``.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure.
"""

import argparse
import sys

from .bath import QuadratureError
from .coefficients import PlateauNotReachedError
from .config import MODE_ALIASES, ConfigError, parse_config
from .presets import get_preset, preset_lines
from .runner import run_correlate, run_oracle_compare, run_spectrum, run_sweep

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(sub):
    sub.add_argument("--config", help="path to an INI run configuration")
    sub.add_argument("--preset", help="name of a built-in scenario")
    sub.add_argument("--mode", choices=sorted(MODE_ALIASES) + ["all"],
                     help="override the configured evaluation mode(s)")
    sub.add_argument("--out", help="output directory (default from config)")
    sub.add_argument("--seed", type=int, default=None,
                     help="reserved; the engine is deterministic")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nmcorr",
        description="Two-time correlation functions of open quantum systems"
                    " beyond the regression theorem")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, hlp in [("correlate", "emit correlator CSV files"),
                      ("spectrum", "emit spectrum CSV files"),
                      ("sweep", "run a parameter sweep of correlate"),
                      ("oracle-compare", "compare the engine against the exact"
                                         " discretized-bath reference")]:
        sub = subs.add_parser(name, help=hlp)
        _add_common(sub)
    preset = subs.add_parser("preset", help="inspect built-in scenarios")
    preset.add_argument("action", choices=["list"])
    return parser


def _load_config(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = parse_config(args.config)
    elif args.preset:
        try:
            cfg = get_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    else:
        raise ConfigError("one of --config or --preset is required")
    if args.mode:
        cfg.modes = args.mode
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            for line in preset_lines():
                print(line)
            return EXIT_OK
        cfg = _load_config(args)
        if args.command == "correlate":
            written = run_correlate(cfg, args.out)
        elif args.command == "spectrum":
            written = run_spectrum(cfg, args.out)
        elif args.command == "sweep":
            written = run_sweep(cfg, args.out)
        elif args.command == "oracle-compare":
            written = [run_oracle_compare(cfg, args.out)]
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
        for path in written:
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, PlateauNotReachedError, FloatingPointError,
            RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
