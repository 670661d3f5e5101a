"""
Run configuration loading.

Values come from CARDDL_* environment variables (a .env file in the working
directory is read first) and are overridden by explicit command-line flags.
"""

import logging
import os
from typing import Any, Dict, Optional

from dotenv import find_dotenv, load_dotenv

from models.config import RunConfig

logger = logging.getLogger(__name__)

ENV_PREFIX = "CARDDL_"

# field -> (environment variable suffix, converter)
_ENVIRONMENT: Dict[str, tuple] = {
    "max_venn": ("MAX_VENN", int),
    "max_types": ("MAX_TYPES", int),
    "timeout": ("TIMEOUT", float),
    "jobs": ("JOBS", int),
    "oracle_size": ("ORACLE_SIZE", int),
    "seed": ("SEED", int),
    "trace": ("TRACE", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    "exhaustive": ("EXHAUSTIVE", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    "log_level": ("LOG_LEVEL", str.upper),
}


def _from_environment() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for field_name, (suffix, convert) in _ENVIRONMENT.items():
        raw: Optional[str] = os.getenv(f"{ENV_PREFIX}{suffix}")
        if raw is None or raw == "":
            continue
        try:
            values[field_name] = convert(raw)
        except ValueError:
            logger.warning(f"Ignoring {ENV_PREFIX}{suffix}={raw!r}: not a valid value")
    return values


def load_config(**overrides: Any) -> RunConfig:
    """
    Build a RunConfig from the environment plus explicit overrides.

    Overrides that are None are treated as not given.
    """
    load_dotenv(find_dotenv(usecwd=True))
    values = _from_environment()
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = RunConfig(**values)
    logger.debug(f"Run configuration: {config.model_dump()}")
    return config
