"""
r-profile: F, deltaF, P and R along the transmissivity grid at fixed squeezing
"""

import argparse

from cli.common import add_input_flags, add_kappa_flag, build_config, execute
from core.parameter_config import describe, get_squeezing_parameters

NAME = "r-profile"


def register(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, parents=parents, help="figures of merit versus T at fixed r")
    add_input_flags(parser)
    parser.add_argument("--specs", nargs="+", default=None, help="herald labels")
    parser.add_argument("--r", type=float, default=None, help=describe(get_squeezing_parameters()))
    add_kappa_flag(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace):
    config = build_config(NAME, args, {
        "input": args.input,
        "eps": args.eps,
        "specs": args.specs,
        "r": args.r,
        "kappa": args.kappa,
    })
    return execute(NAME, args, config)
