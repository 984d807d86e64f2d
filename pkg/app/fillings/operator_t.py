"""
The operator T = id - dD - Dd and its dual.

Given a boundedly supported cochain phi, a cover adapted to phi and the
cover-constrained filling S, D is the cone homotopy between the identity and
S on the far subcomplex (zero elsewhere). The audit evaluates

    T*phi(sigma) = phi(T sigma),   (D*psi)(tau) = -psi(D tau)

on a finite evaluation domain, checks phi + d(D*phi) = T*phi - D*(d phi)
pointwise and checks the support claims:

(a) a tuple where T*phi is nonzero is outside C^F or within rho_n(diam) of U;
    as in the far condition, the distance from a tuple to a set is that of
    its closest vertex
(b) a tuple where D*(d phi) is nonzero sees some tuple of |d phi| in D(sigma)
    within rho_n(diam) of itself
(c) ||D*phi|| lies in ||phi||, U or N_mu(b)
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from app.algebra import get_ring
from app.cochains import RawCochain, SupportReport, is_coarse_on_truncation, support_report
from app.errors import CoverMismatch, FillingNotFound
from app.fillings.chains import Chain, distance_to_simplex
from app.fillings.homotopy import ChainHomotopy, cone_homotopy_D
from app.fillings.maps import ControlledChainMap, FarSubcomplexSpec, cover_filling_S
from app.spaces.metric import TOL, FiniteMetricSpace, SubsetSelection, neighborhood

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]

# Above this many tuples the evaluation domain is restricted to near-diagonal tuples and |phi|
DEFAULT_EVAL_LIMIT = 5000


def adapted_cover(X: FiniteMetricSpace, phi: RawCochain, u_radius: float, radii: Sequence[float],
                  base: Optional[SubsetSelection] = None) -> Tuple[SubsetSelection, List[SubsetSelection]]:
    """A cover adapted to phi.

    U = N_u(vertices of |phi| and the base); every x outside U gets the
    largest ball B(x, s), s from radii, that contains no tuple of |phi|
    (falling back to {x}).

    Returns:
        (U, cover) with U as the first cover member
    """
    if base is None:
        base = X.base_selection()
    U = neighborhood(X, X.select(phi.vertices() | base.members), u_radius)
    tuples = [set(s) for s in phi.values]
    members = [U]
    seen = {U.members}
    for x in X.points:
        if x in U:
            continue
        chosen = X.select([x])
        for s in sorted(radii, reverse=True):
            ball = set(np.nonzero(X.dist[x] <= s + TOL)[0].tolist())
            if not any(t <= ball for t in tuples):
                chosen = X.select(ball)
                break
        if chosen.members not in seen:
            seen.add(chosen.members)
            members.append(chosen)
    logger.debug(f"Adapted cover: |U| = {len(U)}, {len(members)} members")
    return U, members


def check_adapted(phi: RawCochain, U: SubsetSelection, cover: Sequence[SubsetSelection]) -> None:
    """Raises CoverMismatch unless ||phi|| lies in U and no member other than
    U contains a tuple of |phi|."""
    trace = {s[0] for s in phi.values if len(set(s)) == 1}
    if not trace <= U.members:
        raise CoverMismatch("The bounded member U does not contain the diagonal trace of the cochain")
    for member in cover:
        if member == U:
            continue
        for simplex in phi.values:
            if set(simplex) <= member.members:
                raise CoverMismatch(f"Cover member contains the support tuple {simplex}")


@dataclass
class OperatorTSetup:
    spec: FarSubcomplexSpec
    U: SubsetSelection
    cover: List[SubsetSelection]
    S: ControlledChainMap
    D: ChainHomotopy


def prepare_operator_T(X: FiniteMetricSpace, phi: RawCochain, spec: FarSubcomplexSpec, scale: float,
                       u_radius: Optional[float] = None, radii: Optional[Sequence[float]] = None,
                       cap: Optional[float] = None) -> OperatorTSetup:
    """Adapted cover, the filling S over it and the homotopy D between id and S."""
    u = u_radius if u_radius is not None else scale
    ball_radii = radii if radii is not None else [scale * k for k in (1, 2, 3, 4)]
    U, cover = adapted_cover(X, phi, u, ball_radii, base=spec.base)
    top = max(phi.degree, 1)
    S = cover_filling_S(X, spec, cover, scale, max_dim=top, ring=phi.ring, cap=cap)
    D = cone_homotopy_D(S, top, active=lambda s: spec.is_far(X, s))
    return OperatorTSetup(spec=spec, U=U, cover=cover, S=S, D=D)


@dataclass
class OperatorTAudit:
    """Results of one operator_T run."""

    degree: int
    evaluated: int
    T_phi: RawCochain
    D_phi: Optional[RawCochain]
    D_dphi: RawCochain
    reports: Dict[str, SupportReport]
    rho: Dict[str, Any]
    mu: Dict[str, Any]
    identity_failures: List[Simplex] = field(default_factory=list)
    claim_a_failures: List[Simplex] = field(default_factory=list)
    claim_b_failures: List[Simplex] = field(default_factory=list)
    claim_c_failures: List[int] = field(default_factory=list)
    coarse_failures: List[float] = field(default_factory=list)
    fill_failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.identity_failures or self.claim_a_failures or self.claim_b_failures
                    or self.claim_c_failures or self.coarse_failures or self.fill_failures)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "degree": self.degree,
            "evaluated": self.evaluated,
            "T_phi": self.T_phi.to_json(),
            "D_phi": self.D_phi.to_json() if self.D_phi is not None else None,
            "D_dphi": self.D_dphi.to_json(),
            "supports": {key: report.to_dict() for key, report in self.reports.items()},
            "rho": self.rho,
            "mu": self.mu,
            "identity_failures": [list(s) for s in self.identity_failures],
            "claim_a_failures": [list(s) for s in self.claim_a_failures],
            "claim_b_failures": [list(s) for s in self.claim_b_failures],
            "claim_c_failures": self.claim_c_failures,
            "coarse_failures": self.coarse_failures,
            "fill_failures": self.fill_failures,
        }


def evaluation_domain(X: FiniteMetricSpace, degree: int, scale: float, extra: Sequence[Simplex] = (),
                      limit: int = DEFAULT_EVAL_LIMIT) -> List[Simplex]:
    """All (degree+1)-tuples when there are at most `limit` of them, otherwise
    the tuples inside scale-balls about their first vertex plus `extra`."""
    if X.size ** (degree + 1) <= limit:
        return [tuple(t) for t in itertools.product(X.points, repeat=degree + 1)]
    out: Set[Simplex] = {tuple(s) for s in extra if len(s) == degree + 1}
    for x in X.points:
        near = np.nonzero(X.dist[x] <= scale + TOL)[0].tolist()
        for rest in itertools.product(near, repeat=degree):
            out.add((x,) + tuple(rest))
    return sorted(out)


def operator_T(X: FiniteMetricSpace, phi: RawCochain, setup: OperatorTSetup, scale: float,
               r_grid: Optional[Sequence[float]] = None, limit: int = DEFAULT_EVAL_LIMIT) -> OperatorTAudit:
    """Evaluate T*phi, D*phi and D*(d phi) and audit the identity and the support claims.

    Failures (including fillings that could not be found) are collected in
    the returned audit.

    Raises:
        CoverMismatch: if the cover is not adapted to phi
    """
    check_adapted(phi, setup.U, setup.cover)
    ring = get_ring(phi.ring)
    n = phi.degree
    D, spec = setup.D, setup.spec
    grid = list(r_grid) if r_grid is not None else [0.0, scale, 2 * scale]
    audit_fill: List[str] = []

    def dphi_on(chain: Chain) -> Any:
        return phi.evaluate(chain.boundary().terms)

    domain = evaluation_domain(X, n, scale, phi.support, limit)
    lower = evaluation_domain(X, n - 1, scale, [s[1:] for s in phi.support], limit) if n > 0 else []

    T_values: Dict[Simplex, Any] = {}
    Ddphi_values: Dict[Simplex, Any] = {}
    Dphi_values: Dict[Simplex, Any] = {}
    failed: Set[Simplex] = set()

    def dual_D(tau: Simplex) -> Optional[Any]:
        if tau in failed:
            return None
        if tau not in Dphi_values:
            try:
                Dphi_values[tau] = ring.neg(phi.evaluate(D(tau).terms))
            except FillingNotFound as e:
                audit_fill.append(str(e))
                failed.add(tau)
                return None
        return Dphi_values[tau]

    for tau in lower:
        dual_D(tau)

    for sigma in domain:
        try:
            chain = Chain.simplex(sigma, phi.ring)
            D_sigma = D(sigma)
            T_chain = chain - D_sigma.boundary()
            if n > 0:
                T_chain = T_chain - D.apply(chain.boundary())
            T_values[sigma] = phi.evaluate(T_chain.terms)
            Ddphi_values[sigma] = ring.neg(dphi_on(D_sigma))
        except FillingNotFound as e:
            audit_fill.append(str(e))
            failed.add(sigma)

    T_phi = RawCochain(n, phi.ring, T_values, X.size)
    D_dphi = RawCochain(n, phi.ring, Ddphi_values, X.size)

    # phi + d(D*phi) = T*phi - D*(d phi)
    identity_failures = []
    for sigma in domain:
        if sigma in failed:
            continue
        lhs = phi(sigma)
        complete = True
        for i in range(n + 1 if n > 0 else 0):
            value = dual_D(sigma[:i] + sigma[i + 1:])
            if value is None:
                complete = False
                break
            lhs = ring.add(lhs, value if i % 2 == 0 else ring.neg(value))
        if not complete:
            continue
        rhs = ring.add(T_phi(sigma), ring.neg(D_dphi(sigma)))
        if not ring.is_zero(ring.add(lhs, ring.neg(rhs))):
            identity_failures.append(sigma)

    D_phi = RawCochain(n - 1, phi.ring, Dphi_values, X.size) if n > 0 else None
    rho = {k: setup.S.rho(k) for k in range(n + 1)}
    mu = {k: spec.controls.mu_at(k) for k in range(n + 1)}
    audit = OperatorTAudit(
        degree=n, evaluated=len(domain), T_phi=T_phi, D_phi=D_phi, D_dphi=D_dphi,
        reports={}, rho={str(k): f.to_dict() for k, f in rho.items()},
        mu={str(k): f.to_dict() for k, f in mu.items()},
        identity_failures=identity_failures, fill_failures=audit_fill,
    )

    U_ids = setup.U.sorted()
    for sigma in T_phi.support:
        if not spec.is_far(X, sigma):
            continue
        # closest vertex, the same measure FarSubcomplexSpec.is_far uses for the base
        reach = float(X.dist[np.ix_(list(sigma), U_ids)].min())
        if reach > rho[n](X.diameter_of(sigma)) + TOL:
            audit.claim_a_failures.append(sigma)

    for sigma in D_dphi.support:
        bound = rho[n](X.diameter_of(sigma))
        witnesses = [tau for tau, _ in D(sigma)
                     if not ring.is_zero(dphi_on(Chain.simplex(tau, phi.ring)))
                     and distance_to_simplex(X, tau, sigma) <= bound + TOL]
        if not witnesses:
            audit.claim_b_failures.append(sigma)

    if D_phi is not None:
        trace = support_report(phi, X, []).diag_trace
        allowed = trace | setup.U.members | neighborhood(X, spec.base, mu[n - 1](0.0)).members
        audit.claim_c_failures = sorted(support_report(D_phi, X, []).diag_trace - allowed)

    if X.basepoint is not None:
        to_b = X.distance_to([X.basepoint])
        radius_U = float(to_b[U_ids].max())
        radius_base = float(to_b[spec.base.sorted()].max())
        for r in grid:
            bound = max(mu[n](2 * r) + radius_base, rho[n](2 * r) + radius_U) + 2 * r
            if not is_coarse_on_truncation(T_phi, X, [r], bound):
                audit.coarse_failures.append(r)

    audit.reports = {
        "T_phi": support_report(T_phi, X, grid),
        "D_dphi": support_report(D_dphi, X, grid),
    }
    if D_phi is not None:
        audit.reports["D_phi"] = support_report(D_phi, X, grid)
    logger.info(f"operator_T audit (degree {n}, {len(domain)} tuples): {'PASS' if audit.passed else 'FAIL'}")
    return audit
