"""
fid-scan: teleportation fidelity versus squeezing, transmissivity optimized per point
"""

import argparse

from cli.common import add_input_flags, add_kappa_flag, build_config, execute

NAME = "fid-scan"


def register(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, parents=parents, help="F versus r with T optimized")
    add_input_flags(parser)
    add_kappa_flag(parser)
    parser.add_argument("--specs", nargs="+", default=None, help="herald labels, e.g. sym-1-PS asym-1-PA")
    parser.add_argument("--objective", choices=("F", "deltaF", "R"), default=None,
                        help="quantity maximized over T (default F)")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace):
    config = build_config(NAME, args, {
        "input": args.input,
        "eps": args.eps,
        "kappa": args.kappa,
        "specs": args.specs,
        "objective": args.objective,
    })
    return execute(NAME, args, config)
