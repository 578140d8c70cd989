#!/usr/bin/env python3
"""
chatelet - construct and certify Chatelet surfaces over Q
Main entry point
"""

import argparse
import logging
import sys
from typing import List, Optional

from command_registry import CommandRegistry
from config import Config
from ui_utils import UIUtils

c_PROG = "chatelet"

# flags whose values routinely start with "-" (coefficient lists, negative rationals)
c_VALUE_FLAGS = ("--minpoly", "--subfield", "--a", "--S", "--off", "--place")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for all subcommands"""
    parser = argparse.ArgumentParser(
        prog=c_PROG,
        description="Construct Chatelet surfaces with prescribed local invariants and certify them.",
        epilog="Negative fractions as positional values need a preceding --, e.g. hilbert -- -1/3 5 --place 3.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--config", help="JSON config file (default ~/.chatelet/config.json)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    hilbert = sub.add_parser("hilbert", help="Hilbert symbol (a, b)_v")
    hilbert.add_argument("a")
    hilbert.add_argument("b")
    hilbert.add_argument("--place", required=True, help="a prime or 'real'")

    construct = sub.add_parser("construct", help="build a surface and print its certificate")
    construct.add_argument("--kind", required=True, choices=["v1", "v2"])
    construct.add_argument("--minpoly", required=True, help='coefficients constant term first, e.g. "-3,0,1"')
    construct.add_argument("--S", required=True, help='places, e.g. "73" or "real,13"; "" for the empty set')
    construct.add_argument("--a", help="pin a instead of searching for it")
    construct.add_argument("--v1", type=int, help="pin the prime v1")
    construct.add_argument("--v2", type=int, help="pin the prime v2")
    construct.add_argument("--out", help="write the certificate here and its SHA-256 to OUT.sha256")
    construct.add_argument("--sample-bound", type=int, help="also record every prime below this bound")

    invariants = sub.add_parser("invariants", help="local invariant set at one place")
    invariants.add_argument("--cert", required=True)
    invariants.add_argument("--place", required=True)

    verdict = sub.add_parser("verdict", help="Hasse principle (v2) or weak approximation (v1) verdict")
    verdict.add_argument("--cert", required=True)
    verdict.add_argument("--subfield", help="minimal polynomial of a field between Q and L")
    verdict.add_argument("--off", help="places T for weak approximation off T (v1 only)")

    verify = sub.add_parser("verify", help="recompute a certificate and compare")
    verify.add_argument("--cert", required=True)

    sub.add_parser("verify-paper-examples", help="rebuild the two worked examples end to end")
    return parser


def attach_flag_values(argv: List[str]) -> List[str]:
    """Rewrite "--minpoly -3,0,1" as "--minpoly=-3,0,1" so argparse does not read the value as a flag"""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in c_VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, load config and dispatch"""
    parser = build_parser()
    args = parser.parse_args(attach_flag_values(list(sys.argv[1:] if argv is None else argv)))
    if not args.command:
        parser.print_help(sys.stderr)
        return 2

    setup_logging(args.verbose)
    config = Config(args.config)
    ui = UIUtils(config.color_mode())
    for warning in config.warnings:
        ui.status(ui.warning(warning))

    registry = CommandRegistry(ui, config)
    return registry.execute(args.command, args)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n" + UIUtils().dim("^C"), file=sys.stderr)
        sys.exit(130)
