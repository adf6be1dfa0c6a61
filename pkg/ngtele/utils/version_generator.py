"""
Version Generator Utility
Deterministic identifiers for sweep runs, derived from their configuration
"""

import hashlib
import json
import re
from typing import Any, Dict, Optional

RUN_ID_PATTERN = re.compile(r"^(?P<prefix>[a-z0-9-]+)_(?P<digest>[0-9a-f]{12})$")


def config_digest(config: Dict[str, Any]) -> str:
    """
    SHA-256 of the canonical JSON form of a configuration

    Args:
        config: JSON-serializable configuration mapping

    Returns:
        64-character hex digest; key order does not matter
    """
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def generate_run_id(prefix: str, config: Dict[str, Any]) -> str:
    """
    Run identifier like "fid-scan_3f9a1c0b2d4e"; identical configs give identical ids
    """
    return f"{prefix}_{config_digest(config)[:12]}"


def extract_digest_from_run_id(run_id: str) -> Optional[str]:
    """Short digest part of a run id, or None if the id is malformed"""
    match = RUN_ID_PATTERN.match(run_id)
    return match.group("digest") if match else None
