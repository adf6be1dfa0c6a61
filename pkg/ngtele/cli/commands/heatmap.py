"""
heatmap: P, deltaF and the gray/black region flags over the (r, T) plane
"""

import argparse

from cli.common import add_input_flags, add_kappa_flag, build_config, execute

NAME = "heatmap"


def register(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, parents=parents, help="(r, T) grid of P, deltaF and region flags")
    add_input_flags(parser)
    parser.add_argument("--spec", default=None, help="herald label, e.g. sym-1-PS")
    add_kappa_flag(parser)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace):
    config = build_config(NAME, args, {
        "input": args.input,
        "eps": args.eps,
        "specs": [args.spec] if args.spec else None,
        "kappa": args.kappa,
    })
    return execute(NAME, args, config)
