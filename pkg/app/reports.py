"""
Result persistence.

Every CLI run writes a JSON document holding its RunConfig, a hash of its
inputs and the result, plus optional plot-ready TSV tables.
"""

import os
import json
import hashlib
import logging
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.config import RunConfig

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """JSON fallback for numpy scalars, arrays, sets and tuples."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return str(value)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=_plain)


def input_hash(inputs: Any) -> str:
    """sha256 of the canonical JSON of the inputs."""
    return hashlib.sha256(canonical_json(inputs).encode("utf-8")).hexdigest()


def build_document(payload: Dict[str, Any], config: RunConfig, inputs: Any,
                   created_at: Optional[str] = None) -> Dict[str, Any]:
    """The JSON document written for one run; only created_at varies between reruns."""
    return {
        "config": config.model_dump(),
        "input_hash": input_hash(inputs),
        "created_at": created_at or datetime.now(timezone.utc).isoformat(),
        "result": payload,
    }


def write_result(name: str, payload: Dict[str, Any], config: RunConfig, inputs: Any,
                 out_dir: Optional[str] = None) -> str:
    """Write <name>.json into out_dir.

    Args:
        name: File stem
        payload: The result (anything JSON-serializable, numpy scalars included)
        config: The validated run configuration
        inputs: What the run read (space description, cochain, ...), hashed
        out_dir: Target directory, defaults to config.output_dir

    Returns:
        str: Path of the written file
    """
    directory = out_dir or config.output_dir
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{name}.json")
    document = build_document(payload, config, inputs)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, sort_keys=True, indent=2, default=_plain)
        f.write("\n")
    logger.info(f"Wrote {path}")
    return path


def write_tsv(name: str, rows: List[Dict[str, Any]], columns: Sequence[str], out_dir: str) -> str:
    """Write rows as <name>.tsv with the given column order."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.tsv")
    frame = pd.DataFrame(rows, columns=list(columns))
    frame.to_csv(path, sep="\t", index=False)
    logger.info(f"Wrote {path} ({len(frame)} rows)")
    return path


def load_result(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
