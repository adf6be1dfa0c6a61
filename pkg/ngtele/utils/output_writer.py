"""
Output Writer
Emits sweep rows as CSV (pandas) or JSON with a metadata block
"""

import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from core.config import settings

logger = logging.getLogger(__name__)


def round_significant(value: Any, digits: Optional[int] = None) -> Any:
    """Floats rounded to the configured number of significant digits; other values unchanged"""
    digits = settings.FLOAT_SIGNIFICANT_DIGITS if digits is None else digits
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.{digits}g}")
    return value


def build_metadata(command: str, config: Dict[str, Any], digest: str, extras: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    metadata = {
        "tool": settings.APP_NAME,
        "version": settings.VERSION,
        "command": command,
        "config_digest": digest,
        "config": config,
    }
    if extras:
        metadata.update(extras)
    return metadata


def render_csv(rows: List[Dict[str, Any]], columns: List[str]) -> str:
    frame = pd.DataFrame(rows, columns=columns)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=f"%.{settings.FLOAT_SIGNIFICANT_DIGITS}g", lineterminator="\n")
    return buffer.getvalue()


def render_json(rows: List[Dict[str, Any]], columns: List[str], metadata: Dict[str, Any]) -> str:
    payload = {
        "metadata": {key: _clean(value) for key, value in metadata.items()},
        "rows": [{column: round_significant(_native(row.get(column))) for column in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_output(text: str, path: Optional[Path]) -> None:
    """Write to path, or to stdout when no path is given"""
    if path is None:
        print(text, end="")
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"Could not write results to {path}: {e}") from e
    logger.info(f"Results written to {path} ({len(text)} bytes)")


def _native(value: Any) -> Any:
    """numpy scalars to Python scalars"""
    return value.item() if hasattr(value, "item") else value


def _clean(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    return round_significant(_native(value))
