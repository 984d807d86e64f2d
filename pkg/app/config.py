"""
Run configuration.

Defaults come from environment variables (optionally via a .env file);
every CLI run is described by a validated RunConfig that is stored next to
its results.
"""

import os
import logging
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

RINGS = ("gf2", "q", "z")


def get_default_params() -> Dict[str, Any]:
    """Get toolkit defaults from environment variables.

    Returns:
        Dict with thread count, size caps and output directory
    """
    return {
        "threads": int(os.environ.get("COARSE_THREADS", 4)),
        "max_points": int(os.environ.get("COARSE_MAX_POINTS", 20000)),
        "max_simplices": int(os.environ.get("COARSE_MAX_SIMPLICES", 5_000_000)),
        "full_complex_max_points": int(os.environ.get("COARSE_FULL_COMPLEX_MAX_POINTS", 6)),
        "output_dir": os.environ.get("COARSE_OUTPUT_DIR", "results"),
    }


class RunConfig(BaseModel):
    """Parameters of a single CLI invocation."""

    command: str
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    ring: str = "gf2"
    scale: Optional[float] = Field(default=None, ge=0.0)
    max_dim: int = Field(default=3, ge=0)
    r_grid: Optional[List[float]] = None
    threads: int = Field(default=1, ge=1)
    output_dir: str = "results"
    params: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("ring")
    @classmethod
    def _known_ring(cls, value: str) -> str:
        if value not in RINGS:
            raise ValueError(f"ring must be one of {RINGS}, got {value!r}")
        return value

    @field_validator("r_grid")
    @classmethod
    def _increasing_grid(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is None:
            return value
        if any(r < 0 for r in value):
            raise ValueError("r_grid entries must be nonnegative")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("r_grid must be strictly increasing")
        return value
