"""
Example space generators.

Finite models of unbounded spaces: integer grids modelling R^n and the
"pack of circles" (a ray with circles of growing radius hanging on it, the
gaps between consecutive circles growing without bound).
"""

import itertools
import logging
import math
from typing import Dict, List, Optional

import numpy as np

from app.config import get_default_params
from app.errors import SizeLimit
from app.spaces.metric import FiniteMetricSpace, point_cloud

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

# Gap between circle i and circle i+1 is i * DEFAULT_BASE_GAP
DEFAULT_BASE_GAP = 4.0
DEFAULT_RAY_SPACING = 1.0
# Rips scale relative to the sample spacing (fills unit squares, keeps holes)
DEFAULT_SCALE_FACTOR = 1.5


def _check_size(count: int, max_points: Optional[int]) -> None:
    cap = max_points if max_points is not None else get_default_params()["max_points"]
    if count > cap:
        raise SizeLimit(f"Requested {count} points, cap is {cap}")


def generate_grid(dimension: int, half_extent: float, spacing: float = 1.0,
                  max_points: Optional[int] = None) -> FiniteMetricSpace:
    """Integer-grid sample of the cube [-L, L]^n modelling R^n.

    Args:
        dimension: n, between 1 and 3
        half_extent: L, at least the spacing
        spacing: Distance between neighbouring grid points
        max_points: Override of the configured point cap

    Returns:
        FiniteMetricSpace: Euclidean grid, basepoint at the origin
    """
    if dimension not in (1, 2, 3):
        raise ValueError(f"Grid dimension must be 1, 2 or 3, got {dimension}")
    if spacing <= 0:
        raise ValueError("Grid spacing must be positive")
    if half_extent < spacing:
        raise ValueError("Grid half extent must be at least the spacing")
    k = int(math.floor(half_extent / spacing + 1e-9))
    axis = [i * spacing for i in range(-k, k + 1)]
    _check_size(len(axis) ** dimension, max_points)

    coords = np.array(list(itertools.product(axis, repeat=dimension)), dtype=np.float64)
    origin = int(np.argmin(np.abs(coords).sum(axis=1)))
    labels = ["(" + ",".join(f"{c:g}" for c in row) + ")" for row in coords]
    logger.info(f"Generated grid({dimension}, {half_extent}, {spacing}) with {len(coords)} points")
    return point_cloud(coords, labels=labels, basepoint=origin, unbounded_model=True,
                       truncation_radius=float(half_extent), groups={"origin": [origin]},
                       name=f"grid{dimension}d", sample_spacing=float(spacing))


def circle_centers(num_circles: int, base_gap: float = DEFAULT_BASE_GAP) -> List[float]:
    """x-coordinates of the circle centres; circle i sits at height i."""
    centers = []
    left = base_gap
    for i in range(1, num_circles + 1):
        centers.append(left + i)
        left = left + 2 * i + i * base_gap
    return centers


def generate_circle_pack(num_circles: int, points_per_circle: int,
                         base_gap: float = DEFAULT_BASE_GAP,
                         ray_spacing: float = DEFAULT_RAY_SPACING,
                         max_points: Optional[int] = None) -> FiniteMetricSpace:
    """Planar sample of a ray with circles C_1, C_2, ... hanging on it.

    Circle i has radius i and touches the ray [0, inf) x {0} from above at
    its lowest point. The horizontal gap between circle i and circle i+1 is
    i * base_gap; circle 1 starts at x = base_gap. The ray extends base_gap
    past the last circle and its length is the truncation radius.

    Args:
        num_circles: Number of circles, at least 1
        points_per_circle: Samples per circle, at least 8
        base_gap: Gap growth unit
        ray_spacing: Distance between ray samples
        max_points: Override of the configured point cap

    Returns:
        FiniteMetricSpace: With groups "ray" and "circle_1".."circle_k"
    """
    if num_circles < 1:
        raise ValueError("A circle pack needs at least one circle")
    if points_per_circle < 8:
        raise ValueError("A circle needs at least 8 samples")
    centers = circle_centers(num_circles, base_gap)
    ray_length = centers[-1] + num_circles + base_gap
    steps = int(math.floor(ray_length / ray_spacing + 1e-9))
    ray = [(i * ray_spacing, 0.0) for i in range(steps + 1)]
    _check_size(len(ray) + num_circles * points_per_circle, max_points)

    coords = list(ray)
    labels = [f"ray:{x:g}" for x, _ in ray]
    groups: Dict[str, List[int]] = {"ray": list(range(len(ray)))}
    for i, cx in enumerate(centers, start=1):
        members = []
        for k in range(points_per_circle):
            angle = -math.pi / 2 + 2 * math.pi * k / points_per_circle
            x = cx + i * math.cos(angle)
            y = i + i * math.sin(angle)
            if k == 0:
                y = 0.0
                touching = [j for j, (rx, _) in enumerate(ray) if abs(rx - x) <= 1e-9]
                if touching:
                    members.append(touching[0])
                    continue
            members.append(len(coords))
            coords.append((x, y))
            labels.append(f"circle{i}:{k}")
        groups[f"circle_{i}"] = members

    logger.info(f"Generated circle_pack({num_circles}, {points_per_circle}) with {len(coords)} points")
    return point_cloud(np.array(coords), labels=labels, basepoint=0, unbounded_model=True,
                       truncation_radius=float(ray_length), groups=groups, name="circle_pack",
                       sample_spacing=float(ray_spacing))


def default_scale(X: FiniteMetricSpace) -> float:
    """Modelling scale: 1.5 x the sample spacing.

    Generated spaces record their spacing (the ray spacing for circle packs);
    otherwise it is the largest nearest-neighbour distance, so the scale
    graph has no isolated sample points.
    """
    if X.sample_spacing is not None:
        return DEFAULT_SCALE_FACTOR * X.sample_spacing
    if X.size == 1:
        return 0.0
    nearest = np.where(X.dist > 1e-9, X.dist, np.inf).min(axis=1)
    finite = nearest[np.isfinite(nearest)]
    if finite.size == 0:
        return 0.0
    return DEFAULT_SCALE_FACTOR * float(finite.max())
