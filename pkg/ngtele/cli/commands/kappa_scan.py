"""
kappa-scan: fidelity versus thermal parameter at fixed squeezing, with the optimal T column.
Without --r each herald spec uses the squeezing that maximizes its deltaF at kappa = 0.51.
"""

import argparse

from cli.common import add_input_flags, build_config, execute
from core.parameter_config import get_kappa_parameters, grid_text

NAME = "kappa-scan"


def register(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(NAME, parents=parents, help="F versus kappa with T optimized")
    add_input_flags(parser)
    parser.add_argument("--specs", nargs="+", default=None, help="herald labels")
    parser.add_argument("--r", type=float, default=None, help="fixed squeezing")
    parser.add_argument("--grid-kappa", dest="grid_kappa", default=None,
                        help=f"kappa grid A:B:STEP (default {grid_text(get_kappa_parameters())})")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace):
    config = build_config(NAME, args, {
        "input": args.input,
        "eps": args.eps,
        "specs": args.specs,
        "r": args.r,
        "grid_kappa": args.grid_kappa,
    })
    return execute(NAME, args, config)
