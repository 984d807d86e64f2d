"""
Control functions.

Nondecreasing piecewise-linear functions r -> f(r) used for the far-from-
basepoint thresholds (mu) and the filling/contraction radii (rho), plus the
per-dimension families mu_n, rho_n.
"""

import bisect
import math
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

_TOL = 1e-9


class ControlFunction:
    """A nondecreasing piecewise-linear table.

    Between breakpoints the value is interpolated linearly; past the last
    breakpoint the last segment's slope is continued (a single breakpoint is
    a constant). Left of the first breakpoint the first value is used.
    """

    def __init__(self, points: Iterable[Tuple[float, float]]):
        pts = sorted((float(r), float(v)) for r, v in points)
        if not pts:
            raise ValueError("A control function needs at least one breakpoint")
        for (r0, v0), (r1, v1) in zip(pts, pts[1:]):
            if r1 - r0 <= _TOL:
                raise ValueError(f"Duplicate breakpoint at r={r1}")
            if v1 < v0 - _TOL:
                raise ValueError(f"Control function decreases between r={r0} and r={r1}")
        if pts[0][1] < -_TOL:
            raise ValueError("Control function must be nonnegative")
        self.points: List[Tuple[float, float]] = pts
        self._rs = [r for r, _ in pts]

    @classmethod
    def constant(cls, value: float) -> "ControlFunction":
        return cls([(0.0, value)])

    @classmethod
    def affine(cls, slope: float, intercept: float) -> "ControlFunction":
        """r -> slope * r + intercept."""
        if slope < 0:
            raise ValueError("Affine control functions need a nonnegative slope")
        return cls([(0.0, intercept), (1.0, slope + intercept)])

    @classmethod
    def quadratic(cls, a: float, b: float, c: float, r_max: float,
                  samples: int = 64) -> "ControlFunction":
        """r -> a r^2 + b r + c tabulated on [0, r_max], linear afterwards."""
        if a < 0 or b < 0:
            raise ValueError("Quadratic control functions need nonnegative coefficients")
        step = r_max / max(samples, 1)
        return cls([(i * step, a * (i * step) ** 2 + b * i * step + c) for i in range(samples + 1)])

    @classmethod
    def parse(cls, text: str, r_max: float = 1000.0) -> "ControlFunction":
        """Parse a CLI description.

        Accepted forms: "3" (constant), "affine:a,b", "quad:a,b,c",
        "table:r0=v0;r1=v1;...".
        """
        text = text.strip()
        kind, _, body = text.partition(":")
        if not body:
            return cls.constant(float(kind))
        if kind == "affine":
            a, b = (float(x) for x in body.split(","))
            return cls.affine(a, b)
        if kind == "quad":
            a, b, c = (float(x) for x in body.split(","))
            return cls.quadratic(a, b, c, r_max)
        if kind == "table":
            pairs = [item.split("=") for item in body.split(";") if item]
            return cls([(float(r), float(v)) for r, v in pairs])
        raise ValueError(f"Unknown control function form: {text!r}")

    @classmethod
    def envelope(cls, samples: Iterable[Tuple[float, float]]) -> "ControlFunction":
        """Smallest step-like table dominating measured (r, value) samples.

        At every sampled r the result is the running maximum of the values
        measured at radii <= r, so evaluating at a sampled r never
        underestimates that sample.
        """
        best: Dict[float, float] = {}
        for r, v in samples:
            key = math.floor(float(r) * 1e9) / 1e9
            best[key] = max(best.get(key, 0.0), float(v))
        if not best:
            return cls.constant(0.0)
        pts = []
        running = 0.0
        for r in sorted(best):
            running = max(running, best[r])
            pts.append((r, running))
        # Flat continuation past the last measured radius.
        pts.append((pts[-1][0] + 1.0, pts[-1][1]))
        if pts[0][0] > 0:
            pts.insert(0, (0.0, pts[0][1] if pts[0][0] <= _TOL else 0.0))
        return cls(_stepify(pts))

    def __call__(self, r: float) -> float:
        rs, pts = self._rs, self.points
        if len(pts) == 1 or r <= rs[0]:
            return pts[0][1]
        i = bisect.bisect_right(rs, r) - 1
        if i >= len(pts) - 1:
            (r0, v0), (r1, v1) = pts[-2], pts[-1]
        else:
            (r0, v0), (r1, v1) = pts[i], pts[i + 1]
        return v0 + (v1 - v0) * (r - r0) / (r1 - r0)

    def dominates(self, other: "ControlFunction", radii: Sequence[float]) -> bool:
        return all(self(r) >= other(r) - _TOL for r in radii)

    def to_dict(self) -> Dict[str, List[List[float]]]:
        return {"points": [[r, v] for r, v in self.points]}

    def __repr__(self) -> str:
        return f"ControlFunction({self.points})"


def _stepify(points: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    """Insert a breakpoint just before each jump so interpolation never
    lowers a measured value."""
    out = [points[0]]
    for r, v in points[1:]:
        pr, pv = out[-1]
        if v > pv + _TOL and r - pr > 2e-6:
            out.append((r - 1e-6, pv))
        out.append((r, v))
    return out


class ControlFunctions:
    """The pair (mu, rho) with optional per-dimension overrides."""

    def __init__(self, mu: ControlFunction, rho: ControlFunction,
                 mu_n: Optional[Dict[int, ControlFunction]] = None,
                 rho_n: Optional[Dict[int, ControlFunction]] = None):
        self.mu = mu
        self.rho = rho
        self.mu_n = dict(mu_n or {})
        self.rho_n = dict(rho_n or {})

    def mu_at(self, n: int) -> ControlFunction:
        return self.mu_n.get(n, self.mu)

    def rho_at(self, n: int) -> ControlFunction:
        return self.rho_n.get(n, self.rho)

    def to_dict(self) -> Dict[str, object]:
        return {
            "mu": self.mu.to_dict(),
            "rho": self.rho.to_dict(),
            "mu_n": {str(n): f.to_dict() for n, f in sorted(self.mu_n.items())},
            "rho_n": {str(n): f.to_dict() for n, f in sorted(self.rho_n.items())},
        }
