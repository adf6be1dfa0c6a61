"""
Shared CLI plumbing: global flags, config-file loading and result emission
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import ValidationError

from core.exceptions import ParameterDomainError
from core.parameter_config import (
    describe,
    get_input_squeezing_parameters,
    get_kappa_parameters,
    get_squeezing_parameters,
    get_transmissivity_parameters,
    grid_text,
)
from core.sweep_controller import SweepConfig, SweepController, SweepResult
from utils.logger import log_operation, log_warning, ngtele_logger
from utils.output_writer import build_metadata, render_csv, render_json, write_output
from utils.version_generator import config_digest, generate_run_id

logger = logging.getLogger(__name__)


def global_flags() -> argparse.ArgumentParser:
    """Parent parser carrying the flags every subcommand accepts"""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("global options")
    group.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    group.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    group.add_argument("--workers", type=int, default=None, help="parallel grid workers")
    group.add_argument("--grid-r", dest="grid_r", default=None,
                       help=f"squeezing grid A:B:STEP (default {grid_text(get_squeezing_parameters())})")
    group.add_argument("--grid-t", dest="grid_t", default=None,
                       help=f"transmissivity grid A:B:STEP (default {grid_text(get_transmissivity_parameters())})")
    group.add_argument("--config", type=Path, default=None, help="JSON or YAML sweep configuration")
    group.add_argument("--no-progress", action="store_true", help="disable progress bars")
    return parser


def add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", choices=("coherent", "sqvac"), default=None, help="teleported state")
    parser.add_argument("--eps", type=float, default=None, help=describe(get_input_squeezing_parameters()))


def add_kappa_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kappa", type=float, default=None, help=describe(get_kappa_parameters()))


def load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """Read a JSON or YAML sweep configuration; YAML is chosen by extension"""
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"Could not read config file {path}: {e}") from e
    try:
        data = yaml.safe_load(text) if Path(path).suffix.lower() in (".yaml", ".yml") else json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ParameterDomainError(f"Could not parse config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ParameterDomainError(f"Config file {path} must contain a mapping, got {type(data).__name__}")
    return {key.replace("-", "_"): value for key, value in data.items()}


def build_config(mode: str, args: argparse.Namespace, flag_fields: Dict[str, Any]) -> SweepConfig:
    """File values first, explicit flags on top"""
    values = load_config_file(getattr(args, "config", None))
    explicit = {
        "workers": args.workers,
        "grid_r": args.grid_r,
        "grid_t": args.grid_t,
        **flag_fields,
    }
    values.update({key: value for key, value in explicit.items() if value is not None})
    values["mode"] = mode
    try:
        return SweepConfig(**values)
    except ValidationError as e:
        raise ParameterDomainError(f"Invalid {mode} configuration: {e.errors(include_url=False)}") from e


@log_operation("SWEEP execute")
def execute(mode: str, args: argparse.Namespace, config: SweepConfig) -> SweepResult:
    """Run the sweep and emit its rows in the requested format"""
    config_echo = config.model_dump(mode="json")
    run_id = generate_run_id(mode, config_echo)
    ngtele_logger.log_sweep_operation(mode, sweep_id=run_id, status="started", details=config_echo)

    result = SweepController(config, sweep_id=run_id, show_progress=not args.no_progress).run()
    missing = sum(1 for row in result.rows if row.get("F", 0.0) is None)
    if missing:
        log_warning(f"SWEEP {run_id} | {missing} grid points could not be heralded and are left empty")
    ngtele_logger.log_sweep_operation(mode, sweep_id=run_id, status="completed",
                                      details={"rows": len(result.rows), "elapsed": round(result.progress.elapsed, 3)})

    if args.format == "json":
        metadata = build_metadata(mode, config_echo, config_digest(config_echo), result.extras or None)
        text = render_json(result.rows, result.columns, metadata)
    else:
        text = render_csv(result.rows, result.columns)
    write_output(text, args.out)
    return result
