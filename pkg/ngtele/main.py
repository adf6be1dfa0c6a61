"""
Command-line entry point for ngtele
"""

import argparse
import sys
from pathlib import Path

# Add the application directory to Python path
app_dir = Path(__file__).parent
sys.path.insert(0, str(app_dir))

from cli.commands import fid_scan, heatmap, kappa_scan, r_profile, table1
from cli.common import global_flags
from core.config import settings
from core.exceptions import NGTeleError
from utils.logger import log_error, log_info

COMMANDS = (table1, fid_scan, kappa_scan, heatmap, r_profile)

EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_USAGE_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Heralded non-Gaussian TMST resources for continuous-variable teleportation",
    )
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [global_flags()]
    for command in COMMANDS:
        command.register(subparsers, parents)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    log_info(f"{settings.APP_NAME} {settings.VERSION} | command {args.command}")
    try:
        args.handler(args)
    except NGTeleError as e:
        log_error(f"{args.command} failed", error=e, context={"command": args.command, "argv": argv or sys.argv[1:]})
        print(f"{settings.APP_NAME}: error: {e}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except OSError as e:
        log_error(f"{args.command} failed", error=e, context={"command": args.command})
        print(f"{settings.APP_NAME}: error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
