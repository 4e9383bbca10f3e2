"""Command-line front end: run, check, or tabulate from a config file.

Exit codes: 0 all verdicts pass, 1 a verdict failed or a runtime error,
2 configuration problems.
"""

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, parse_config
from .experiments import run_experiment, validate


def _add_common(sub):
    sub.add_argument("config", help="experiment configuration file")
    sub.add_argument("--output-dir", default=None,
                     help="override the configured output directory")
    sub.add_argument("--deterministic", action="store_true",
                     help="force ordered reductions (recorded in the "
                          "summary; reductions are ordered either way)")
    sub.add_argument("--quiet", action="store_true",
                     help="suppress progress output")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="twophase1d",
        description="Two-phase flow decay experiments and spectral tables.")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, hint in (("run", "execute the configured experiment"),
                       ("check", "validate the configuration and exit"),
                       ("dispersion", "write the dispersion table only")):
        _add_common(subs.add_parser(name, help=hint))
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
    except FileNotFoundError:
        print(f"error: no such config file: {args.config}", file=sys.stderr)
        return 2
    except ConfigError as e:
        print(f"error: {args.config}: {e}", file=sys.stderr)
        return 2
    if args.output_dir is not None:
        cfg = replace(cfg, output_dir=args.output_dir)
    if args.command == "dispersion":
        cfg = replace(cfg, kind="dispersion-table")

    if args.command == "check":
        try:
            validate(cfg)
        except ConfigError as e:
            print(f"error: {args.config}: {e}", file=sys.stderr)
            return 2
        if not args.quiet:
            print(f"ok: {cfg.kind}")
        return 0

    try:
        summary = run_experiment(cfg, deterministic=args.deterministic,
                                 quiet=args.quiet)
    except ConfigError as e:
        print(f"error: {args.config}: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0 if summary["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
