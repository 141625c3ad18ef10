"""Command-line entry point.

    rhode solve --config run.json [--out out.csv] [--cache r.txt]
    rhode validate --config run.json [--out report.csv]
    rhode converge --config run.json [--out table.csv]
    rhode oracle-compare --config run.json [--out side_by_side.csv]

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 validation threshold breach.
"""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .errors import ConfigError, RhodeError, UnsupportedFamily
from .modes import run_mode

_SUBCOMMANDS = ("solve", "validate", "converge", "oracle-compare")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhode",
        description=(
            "Factorize 2x2 matrix jump problems on a vertical half-line "
            "cut: reconstruct the residue field, then transport the "
            "canonical factor to evaluation points."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run description")
        p.add_argument("--out", default=None,
                       help="CSV output path (overrides config 'output')")
        p.add_argument("--cache", default=None,
                       help="residue-field cache path (overrides config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, mode=args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.cache is not None:
        cfg.cache = args.cache
    try:
        report = run_mode(cfg, out=args.out)
    except (ConfigError, UnsupportedFamily) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RhodeError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(report.summary())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
