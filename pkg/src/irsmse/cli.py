"""Command-line interface.

``irsmse run`` executes a sweep and writes a results CSV; ``irsmse
validate`` checks a config file; ``irsmse defaults`` prints the packaged
default configuration. Exit codes: 0 on success, 2 for configuration
problems, 3 for I/O failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from importlib import resources

from . import harness

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def default_config_text() -> str:
    """The packaged default configuration (JSON text)."""
    return resources.files("irsmse").joinpath("data/paper-defaults.json").read_text("utf-8")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsmse",
        description="Monte Carlo sweeps for robust transceiver/IRS-phase design",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write a results CSV")
    run.add_argument("--config", required=True, help="experiment config (JSON)")
    run.add_argument(
        "--experiment", required=True, choices=("power", "elements"),
        help="sweep the transmit-power grid or the element-count grid",
    )
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--seed", type=int, default=None, help="override the master seed")
    run.add_argument("--trials", type=int, default=None, help="override the trial count")
    run.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")

    val = sub.add_parser("validate", help="check a config file and exit")
    val.add_argument("--config", required=True, help="experiment config (JSON)")

    dfl = sub.add_parser("defaults", help="print the packaged default config")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = harness.load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.trials is not None:
            cfg = replace(cfg, trials=args.trials)
        problems = harness.validate_config(cfg)
        if problems:
            raise harness.ConfigError("; ".join(problems))
        if args.threads < 1:
            raise harness.ConfigError(f"--threads must be >= 1, got {args.threads}")
        if args.experiment == "power":
            records = harness.run_power_sweep(cfg, workers=args.threads)
        else:
            records = harness.run_element_sweep(cfg, workers=args.threads)
        harness.write_results(records, args.out)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        harness.load_config(args.config)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print("ok")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "defaults":
        sys.stdout.write(default_config_text())
        return EXIT_OK
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
