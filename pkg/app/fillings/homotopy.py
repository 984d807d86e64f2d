"""
Cone-operator chain homotopies.

For a chain map f that preserves augmentation, D is built by induction on
the degree:

    c = sigma - f(sigma) - D(d sigma),    D(sigma) = T_v(c)

with v the smallest point ID in |c| (and D(sigma) = 0 when c = 0). Then
dD + Dd = id - f holds on every tuple.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.fillings.chains import Chain, distance_to_simplex
from app.fillings.maps import ControlledChainMap, random_controlled_map
from app.spaces.generators import default_scale
from app.spaces.metric import TOL, FiniteMetricSpace

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

DEFAULT_TUPLES_PER_DEGREE = 6


class ChainHomotopy:
    """D with dD + Dd = id - f on the tuples where `active` holds; D vanishes
    elsewhere."""

    def __init__(self, f: ControlledChainMap, max_dim: int,
                 active: Optional[Callable[[Simplex], bool]] = None):
        self.f = f
        self.ring = f.ring
        self.max_dim = max_dim
        self.active = active
        self._values: Dict[Simplex, Chain] = {}
        self._lock = threading.RLock()

    def __call__(self, simplex: Sequence[int]) -> Chain:
        key = tuple(simplex)
        n = len(key) - 1
        if n > self.max_dim:
            raise ValueError(f"Tuple {key} is above the homotopy's dimension {self.max_dim}")
        with self._lock:
            hit = self._values.get(key)
            if hit is not None:
                return hit
            if self.active is not None and not self.active(key):
                value = Chain.zero(n + 1, self.ring)
            else:
                sigma = Chain.simplex(key, self.ring)
                c = sigma - self.f.image(key)
                if n > 0:
                    c = c - self.apply(sigma.boundary())
                if c.is_zero():
                    value = Chain.zero(n + 1, self.ring)
                else:
                    value = c.cone(min(c.vertices()))
            self._values[key] = value
            return value

    def apply(self, chain: Chain) -> Chain:
        total = Chain.zero(chain.degree + 1, self.ring)
        for simplex, coeff in chain:
            total = total + self(simplex).scaled(coeff)
        return total

    def defect(self, simplex: Sequence[int]) -> Chain:
        """dD(sigma) + D(d sigma) - (sigma - f(sigma)); zero when the identity holds."""
        key = tuple(simplex)
        sigma = Chain.simplex(key, self.ring)
        lhs = self(key).boundary()
        if len(key) > 1:
            lhs = lhs + self.apply(sigma.boundary())
        return lhs - (sigma - self.f.image(key))

    def displacement(self, simplex: Sequence[int]) -> float:
        key = tuple(simplex)
        return distance_to_simplex(self.f.X, self(key).vertices(), key)


def cone_homotopy_D(f: ControlledChainMap, max_dim: int,
                    active: Optional[Callable[[Simplex], bool]] = None) -> ChainHomotopy:
    """The cone homotopy between the identity and f, up to max_dim.

    f must send every point to a chain of augmentation 1; values are
    computed on demand and memoized.
    """
    return ChainHomotopy(f, max_dim, active)


@dataclass
class HomotopyFailure:
    map_seed: int
    simplex: List[int]
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"map_seed": self.map_seed, "simplex": self.simplex, "reason": self.reason}


@dataclass
class HomotopySuiteReport:
    space: str
    ring: str
    maps: int
    checked: int
    failures: List[HomotopyFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "space": self.space,
            "ring": self.ring,
            "maps": self.maps,
            "checked": self.checked,
            "failures": [f.to_dict() for f in self.failures],
        }


def verify_homotopy_suite(X: FiniteMetricSpace, ring: str, count: int, seed: int, max_degree: int = 3,
                          displacement: Optional[float] = None,
                          tuples_per_degree: int = DEFAULT_TUPLES_PER_DEGREE) -> HomotopySuiteReport:
    """Check dD + Dd = id - f and |D(sigma)| within rho_n(diam sigma) of sigma
    for `count` seeded random controlled maps.

    Each map is checked on seeded random tuples (degenerate ones included) of
    every degree up to max_degree. Failures are collected, not raised.
    """
    rng = np.random.default_rng(seed)
    step = displacement if displacement is not None else 2.0 * default_scale(X)
    report = HomotopySuiteReport(space=X.name, ring=ring, maps=count, checked=0)
    for _ in range(count):
        map_seed = int(rng.integers(0, 2 ** 32))
        f = random_controlled_map(X, ring, step, terms=3, seed=map_seed)
        D = cone_homotopy_D(f, max_degree)
        for n in range(max_degree + 1):
            for _ in range(tuples_per_degree):
                simplex = tuple(int(p) for p in rng.integers(0, X.size, size=n + 1))
                report.checked += 1
                if not D.defect(simplex).is_zero():
                    report.failures.append(HomotopyFailure(map_seed, list(simplex), "identity"))
                    continue
                bound = f.rho(n)(X.diameter_of(simplex))
                if D.displacement(simplex) > bound + TOL:
                    report.failures.append(HomotopyFailure(map_seed, list(simplex), "displacement"))
    logger.info(f"Homotopy suite on {X.name} ({ring}): {report.checked} checks, "
                f"{len(report.failures)} failures")
    return report
