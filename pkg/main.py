#!/usr/bin/env python3
"""
Main program for kbinomial: iterated binomial transforms of k-Lucas and
k-Fibonacci sequences, with exact identity verification.

Exit codes: 0 success or verified, 1 identity falsified or methods disagree,
2 usage error.
"""

import argparse
import logging
import os
import re
import sys
from pathlib import Path
from typing import List, Optional

import yaml
from dotenv import load_dotenv

from identities import IdentityId
from recurrences import FAMILIES, PRESETS
from router import FORMATS, METHODS, Router

DEFAULT_CONFIG = Path(__file__).with_name("config.yaml")

_ENV_REF = re.compile(r"^\$\{([A-Za-z_][A-Za-z0-9_]*)\}$")

# argparse treats "-3..3" as an option unless it looks like a negative number
_NEGATIVE_VALUE = re.compile(r"^-\d+$|^-\d*\.\d+$|^-\d+\.\.-?\d+$")


def _expand_env(value):
    """Replace "${NAME}" strings with the environment value (None when unset)."""
    if isinstance(value, dict):
        return {key: _expand_env(v) for key, v in value.items()}
    if isinstance(value, list):
        return [_expand_env(v) for v in value]
    if isinstance(value, str):
        match = _ENV_REF.match(value)
        if match:
            return os.getenv(match.group(1))
    return value


def load_config(config_path: str):
    """Load configuration from YAML file."""
    load_dotenv()
    try:
        with open(config_path, 'r') as file:
            config = yaml.safe_load(file) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ValueError(f"Error loading config file: {e}")
    return _expand_env(config)


def setup_logging(config: dict):
    """Setup logging configuration."""
    log_config = config.get('logging', {}) or {}

    handlers = [logging.StreamHandler()]
    if log_config.get('file'):
        handlers.append(logging.FileHandler(log_config['file']))

    logging.basicConfig(
        level=getattr(logging, str(log_config.get('level') or 'WARNING').upper()),
        format=log_config.get('format') or '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )

    return logging.getLogger(__name__)


def parse_range(text: str) -> range:
    """Parse "A..B" (inclusive, A <= B) or a single integer."""
    match = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", str(text))
    if not match:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) is not None else lo
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}: {lo} > {hi}")
    return range(lo, hi + 1)


def _add_family_args(parser: argparse.ArgumentParser, defaults: dict):
    parser.add_argument("--family", choices=FAMILIES + tuple(PRESETS),
                        default=defaults.get('family', 'k-lucas'),
                        help="Sequence family or preset (lucas, pell-lucas, fibonacci, pell)")
    parser.add_argument("--k", type=int, help="Sequence parameter, nonzero")
    parser.add_argument("--r", type=int, default=0, help="Number of binomial transforms (default 0)")


def build_parser(config: dict) -> argparse.ArgumentParser:
    defaults = config.get('defaults', {}) or {}
    verify_conf = config.get('verify', {}) or {}
    bench_conf = config.get('bench', {}) or {}

    parser = argparse.ArgumentParser(
        prog="kbinomial",
        description="Iterated binomial transforms of k-Lucas and k-Fibonacci sequences",
    )
    parser.add_argument("--config", default=str(DEFAULT_CONFIG), help="Path to configuration file")
    sub = parser.add_subparsers(dest="command", metavar="<command>")
    sub.required = True

    emit = sub.add_parser("emit", help="Write the first terms of a transformed sequence")
    _add_family_args(emit, defaults)
    emit.add_argument("--count", type=int, required=True, help="Number of terms")
    emit.add_argument("--format", choices=FORMATS, default=defaults.get('format', 'plain'))
    emit.add_argument("--method", choices=METHODS, default=defaults.get('method', 'matrix'))

    term = sub.add_parser("term", help="Write a single term")
    _add_family_args(term, defaults)
    term.add_argument("--n", type=int, required=True, help="Index of the term")
    term.add_argument("--mod", type=int, help="Reduce modulo this value (at least 2)")
    term.add_argument("--method", choices=METHODS, default=defaults.get('method', 'matrix'))

    verify = sub.add_parser("verify", help="Check an identity over a (k, r, n) grid")
    verify.add_argument("--identity", required=True, choices=[i.value for i in IdentityId])
    verify.add_argument("--k-range", type=parse_range, default=parse_range(verify_conf.get('k_range', '1..5')))
    verify.add_argument("--r-range", type=parse_range, default=parse_range(verify_conf.get('r_range', '0..4')))
    verify.add_argument("--n-max", type=int, default=int(verify_conf.get('n_max', 64)))
    verify.add_argument("--workers", type=int, default=int(verify_conf.get('workers', 1)))
    verify.add_argument("--json", action="store_true", help="Structured report")
    verify._negative_number_matcher = _NEGATIVE_VALUE

    bench = sub.add_parser("bench", help="Time iteration against matrix powering")
    _add_family_args(bench, defaults)
    bench.add_argument("--n-max", type=int, required=True)
    bench.add_argument("--method", choices=METHODS + ("both",), default="both")
    bench.add_argument("--mod", type=int, default=bench_conf.get('mod'))
    bench.add_argument("--repeats", type=int, default=int(bench_conf.get('repeats', 3)))

    check = sub.add_parser("check", help="Compare a stored b-file with a computed sequence")
    _add_family_args(check, defaults)
    check.add_argument("--bfile", help="Path to the b-file")
    check.add_argument("--name", help="Name of a b-file in the configured folder")

    sub.add_parser("list", help="List families, presets and identities")

    return parser


def _config_path(argv: List[str]) -> str:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=str(DEFAULT_CONFIG))
    known, _ = pre.parse_known_args(argv)
    return known.config


def main(argv: Optional[List[str]] = None) -> int:
    """Main function; returns the process exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)

    try:
        config = load_config(_config_path(argv))
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    logger = setup_logging(config)

    try:
        args = build_parser(config).parse_args(argv)
    except argparse.ArgumentTypeError as e:
        print(f"Error: invalid configuration: {e}", file=sys.stderr)
        return 2
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    router = Router(config, logger)
    try:
        if args.command == "emit":
            return router.emit(args.family, args.k, args.r, args.count, args.format, args.method)
        if args.command == "term":
            return router.term(args.family, args.k, args.r, args.n, args.mod, args.method)
        if args.command == "verify":
            return router.verify(args.identity, args.k_range, args.r_range, args.n_max, args.json,
                                 workers=args.workers)
        if args.command == "bench":
            return router.bench(args.family, args.k, args.r, args.n_max, args.method,
                                mod=args.mod, repeats=args.repeats)
        if args.command == "check":
            return router.check(args.family, args.k, args.r, args.bfile, args.name)
        return router.list_catalog()
    except (ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"Unexpected failure in {args.command}: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
