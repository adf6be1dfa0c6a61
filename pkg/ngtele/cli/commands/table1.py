"""
table1: maximum of R = deltaF * P for the one-photon subtraction and
catalysis columns (TMST at kappa = 0.51, TMSV at kappa = 0.5)
"""

import argparse

from cli.common import build_config, execute

NAME = "table1"


def register(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, parents=parents, help="optimal R table for 1-PS and 1-PC resources")
    parser.add_argument("--oracle", action="store_true", default=None, help="add Fock-basis cross-check columns")
    parser.add_argument("--cutoff", type=int, default=None, help="Fock cutoff for --oracle")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace):
    config = build_config(NAME, args, {"oracle": args.oracle, "cutoff": args.cutoff, "objective": "R"})
    return execute(NAME, args, config)
