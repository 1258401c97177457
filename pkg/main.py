#!/usr/bin/env python3
"""
Main entry point for fracperim.

Parses the command line into a RunConfig, configures logging and hands
over to src.cli.run. Tables are written to stdout (or --output); logs go
to stderr.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

# Add repo root to path
REPO_ROOT = os.path.abspath(os.path.dirname(__file__))
sys.path.insert(0, REPO_ROOT)

from src import __version__
from src.cli import COMMANDS, EMITS, EXIT_BAD_INPUT, RunConfig, run
from src.core.logging_config import VALID_LEVELS, setup_logging
from src.curvature.scans import SCAN_MODES
from src.minimizer.solvers import SOLVERS
from src.minimizer.sweep import PRESETS

logger = logging.getLogger(__name__)


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _s_grid(text: str) -> List[float]:
    """Either a list `0.2,0.1,0.05` or a geometric spec `geom:start,ratio,count`."""
    if text.startswith("geom:"):
        parts = _floats(text[len("geom:"):])
        if len(parts) != 3 or parts[2] < 1:
            raise argparse.ArgumentTypeError("geom:start,ratio,count needs three values")
        start, ratio, count = parts
        return [start * ratio ** k for k in range(int(count))]
    return _floats(text)


def _pair(text: str) -> tuple:
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return tuple(values)


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _key_values(items: Optional[List[str]]) -> Dict[str, Any]:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        out[key] = _value(value)
    return out


def _overrides(items: Optional[List[str]]) -> Dict[str, Dict[str, Any]]:
    """`section.key=value` pairs grouped by section."""
    out: Dict[str, Dict[str, Any]] = {}
    for key, value in _key_values(items).items():
        section, sep, name = key.partition(".")
        if not sep:
            raise argparse.ArgumentTypeError(f"override {key!r} must look like section.key=value")
        out.setdefault(section, {})[name] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracperim",
        description="Fractional mean curvature, contribution from infinity and stickiness experiments",
    )
    parser.add_argument('--version', action='version', version=f"fracperim {__version__}")
    parser.add_argument('command', choices=COMMANDS, help='What to compute')

    geometry = parser.add_argument_group('geometry')
    geometry.add_argument('--set', dest='set_name', help='Canonical set family name')
    geometry.add_argument('--param', action='append', metavar='KEY=VALUE',
                          help='Family parameter (repeatable, values parsed as JSON)')
    geometry.add_argument('--set-file', help='Set-spec JSON file')
    geometry.add_argument('--n', type=int, help='Ambient dimension')
    geometry.add_argument('--point', type=_floats, help='Boundary point x1,x2[,x3]')
    geometry.add_argument('--q', type=_floats, help='Center of the excluded ball for alpha')
    geometry.add_argument('--r', type=float, default=1.0, help='Radius of the excluded ball for alpha')

    orders = parser.add_argument_group('fractional order')
    orders.add_argument('--s', type=float, help='Single value of s')
    orders.add_argument('--s-grid', type=_s_grid, help='List a,b,c or geom:start,ratio,count')
    orders.add_argument('--mode', choices=SCAN_MODES, default='raw', help='Scaling reported by scan')

    thresholds = parser.add_argument_group('thresholds')
    thresholds.add_argument('--alpha-bar', type=float, default=0.0, help='Upper contribution from infinity')
    thresholds.add_argument('--sigma', type=float, help='Largest order the positivity bound is claimed for')
    thresholds.add_argument('--witness-center', type=_floats, help='Center of an exterior ball tangent at --point')
    thresholds.add_argument('--witness-radius', type=float, help='Radius of that ball')
    thresholds.add_argument('--bracket', type=_pair, help='Root bracket lo,hi')
    thresholds.add_argument('--tol-s', type=float, help='Root tolerance in s')

    minimizer = parser.add_argument_group('minimizer')
    minimizer.add_argument('--problem', dest='problem_file', help='Problem JSON file')
    minimizer.add_argument('--preset', choices=sorted(PRESETS), help='Built-in sweep geometry')
    minimizer.add_argument('--resolution', type=int, help='Cells across the domain')
    minimizer.add_argument('--solver', choices=SOLVERS, default='auto')
    minimizer.add_argument('--seed', type=int, help='First annealing seed')

    output = parser.add_argument_group('configuration and output')
    output.add_argument('--config', dest='config_file', help='Configuration JSON file')
    output.add_argument('--override', action='append', metavar='SECTION.KEY=VALUE',
                        help='Configuration override (repeatable)')
    output.add_argument('--emit', choices=EMITS, default='csv')
    output.add_argument('--output', help='Artifact path (stdout when omitted)')
    output.add_argument('--criteria', type=_ints, help='verify: criterion numbers to run')
    output.add_argument('--skip-slow', action='store_true', help='verify: skip the slow criteria')

    logs = parser.add_argument_group('logging')
    logs.add_argument('--log-level', choices=sorted(VALID_LEVELS), default='WARNING')
    logs.add_argument('--log-file', help='Also log to this file at DEBUG level')
    logs.add_argument('--no-color', action='store_true', help='Plain log output')
    logs.add_argument('--debug', action='store_true', help='Enable debug logging')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        set_name=args.set_name,
        set_params=_key_values(args.param),
        set_file=args.set_file,
        point=args.point,
        q=args.q,
        r=args.r,
        n=args.n,
        s=args.s,
        s_grid=args.s_grid,
        mode=args.mode,
        alpha_bar=args.alpha_bar,
        sigma=args.sigma,
        witness_center=args.witness_center,
        witness_radius=args.witness_radius,
        bracket=args.bracket,
        tol_s=args.tol_s,
        problem_file=args.problem_file,
        preset=args.preset,
        resolution=args.resolution,
        solver=args.solver,
        seed=args.seed,
        config_file=args.config_file,
        overrides=_overrides(args.override),
        emit=args.emit,
        output=args.output,
        criteria=args.criteria,
        include_slow=not args.skip_slow,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging('DEBUG' if args.debug else args.log_level, args.log_file, colored=not args.no_color)
    if args.debug:
        logger.debug("Debug logging enabled")

    try:
        rc = config_from_args(args)
    except argparse.ArgumentTypeError as e:
        logger.error(f"Bad argument: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
