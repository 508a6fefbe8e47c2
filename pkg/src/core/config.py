"""
Configuration Loader
Numeric limits for enumeration, sampling and verification
"""
import json
import os
from pathlib import Path
from typing import Dict, Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field


class Limits(BaseModel):
    """Limits read from config/limits.json"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    weyl_order_bound: int = Field(default=51840, gt=0)
    rank_bound: int = Field(default=4, ge=0)
    membership_tolerance: float = Field(default=1e-9, gt=0)
    disjointness_margin: float = Field(default=1e-6, gt=0)
    covering_index_bound: int = Field(default=4, ge=1)
    tempered_samples: int = Field(default=10000, ge=1)
    sample_seed: int = 20240601
    parallel_workers: int = Field(default=4, ge=1)
    oracle_torsion_order: int = Field(default=6, ge=1)


# Environment variable -> Limits field
ENV_OVERRIDES: Dict[str, str] = {
    "RESIDUA_WEYL_BOUND": "weyl_order_bound",
    "RESIDUA_RANK_BOUND": "rank_bound",
    "RESIDUA_WORKERS": "parallel_workers",
}

_active = Limits()


def load_limits(config_dir: str = "config") -> Limits:
    """
    Load limits from <config_dir>/limits.json with environment overrides

    Falls back to the defaults when the file is missing or invalid.
    """
    load_dotenv()
    values: Dict = {}
    path = Path(config_dir) / "limits.json"

    try:
        if path.exists():
            with open(path, 'r') as f:
                values = json.load(f).get('limits', {})
        else:
            logger.debug(f"No limits file at {path}, using defaults")
    except Exception as e:
        logger.error(f"Failed to load limits config: {e}")
        values = {}

    for env_name, field in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw:
            values[field] = int(raw)

    try:
        limits = Limits(**values)
    except Exception as e:
        logger.error(f"Invalid limits config: {e}")
        limits = Limits()

    logger.info(f"Limits loaded: weyl bound {limits.weyl_order_bound}, rank bound {limits.rank_bound}")
    return limits


def configure(limits: Limits) -> None:
    """Install the limits used when a call does not pass its own"""
    global _active
    _active = limits


def current_limits(limits: Optional[Limits] = None) -> Limits:
    return limits if limits is not None else _active
