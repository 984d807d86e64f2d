"""
Space ingestion from files.

Supported inputs:
- CSV distance matrix (square, header row optional)
- JSON distance matrix {"points": [...], "dist": [[...]]}
- JSON point cloud: a list of coordinate vectors, or {"coords": [[...]]}
- result documents written by the `gen` command
"""

import json
import logging
import os
from typing import Any, Dict, Optional

import pandas as pd

from app.config import get_default_params
from app.errors import SizeLimit
from app.spaces.metric import FiniteMetricSpace, from_distance_matrix, point_cloud

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)


def _check_size(count: int) -> None:
    cap = get_default_params()["max_points"]
    if count > cap:
        raise SizeLimit(f"Input has {count} points, cap is {cap}")


def _is_number(value: Any) -> bool:
    try:
        float(value)
        return True
    except (TypeError, ValueError):
        return False


def load_csv_matrix(path: str, strict: bool = False) -> FiniteMetricSpace:
    """Load a square CSV distance matrix.

    A first row that does not parse as numbers is taken as point labels.

    Args:
        path: Path to the CSV file
        strict: Check the triangle inequality

    Returns:
        FiniteMetricSpace: The validated space
    """
    frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    labels = None
    if not all(_is_number(v) for v in frame.iloc[0]):
        labels = [str(v).strip() for v in frame.iloc[0]]
        frame = frame.iloc[1:]
    table = frame.astype(float).to_numpy()
    _check_size(table.shape[0])
    name = os.path.splitext(os.path.basename(path))[0]
    logger.info(f"Loaded {table.shape[0]}x{table.shape[1]} distance matrix from {path}")
    return from_distance_matrix(table, labels=labels, strict=strict, name=name)


def space_from_json(data: Any, strict: bool = False, name: str = "input") -> FiniteMetricSpace:
    """Build a space from parsed JSON (distance matrix or point cloud)."""
    if isinstance(data, list):
        _check_size(len(data))
        return point_cloud(data, name=name)
    if not isinstance(data, dict):
        raise ValueError("JSON input must be a list of coordinates or an object")
    if "result" in data and "config" in data:
        # a document written by `gen`
        data = data["result"]
    basepoint: Optional[int] = data.get("basepoint")
    options: Dict[str, Any] = {
        "basepoint": basepoint,
        "unbounded_model": bool(data.get("unbounded_model", False)),
        "truncation_radius": data.get("truncation_radius"),
        "sample_spacing": data.get("sample_spacing"),
    }
    if "dist" in data:
        _check_size(len(data["dist"]))
        return from_distance_matrix(data["dist"], labels=data.get("points"), strict=strict,
                                    groups=data.get("groups"), name=data.get("name", name), **options)
    if "coords" in data:
        _check_size(len(data["coords"]))
        return point_cloud(data["coords"], labels=data.get("points"), groups=data.get("groups"),
                           name=data.get("name", name), **options)
    raise ValueError("JSON input needs a 'dist' table or 'coords' list")


def load_json(path: str, strict: bool = False) -> FiniteMetricSpace:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    name = os.path.splitext(os.path.basename(path))[0]
    space = space_from_json(data, strict=strict, name=name)
    logger.info(f"Loaded {space} from {path}")
    return space


def load_space(path: str, strict: bool = False) -> FiniteMetricSpace:
    """Load a space, choosing the format from the file extension."""
    if not os.path.isfile(path):
        raise FileNotFoundError(f"File not found: {path}")
    if path.lower().endswith(".csv"):
        return load_csv_matrix(path, strict=strict)
    return load_json(path, strict=strict)
