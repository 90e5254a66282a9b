"""Complete enumeration solver for LCP(M, q).

Every index set alpha is visited: for nonsingular C_M(alpha) the single
candidate p = C_M(alpha)^{-1} q is accepted when p >= 0, for singular ones
the feasible set {p >= 0 : C_M(alpha) p = q} is described as an affine
continuum.  Solutions are reported in x = w - z coordinates together with
their (z, w) split.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .core import (
    DEFAULT_TOL,
    ENUMERATION_CAP,
    DimensionError,
    IndexSet,
    LcpProblem,
    complementary_matrix,
    det_tol,
    orthant_matrix,
    x_to_zw,
)

logger = logging.getLogger(__name__)

ILL_CONDITIONED = 1e-6
MERGE_FACTOR = 10.0


class Regularity(str, enum.Enum):
    REGULAR = "regular"
    SINGULAR = "singular"
    UNKNOWN = "unknown"


@dataclass
class SolutionPoint:
    x: np.ndarray
    z: np.ndarray
    w: np.ndarray
    witnesses: list[IndexSet] = field(default_factory=list)
    regularity: Regularity = Regularity.UNKNOWN
    ill_conditioned: bool = False

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "z": self.z.tolist(),
            "w": self.w.tolist(),
            "witnesses": [str(a) for a in self.witnesses],
            "regularity": self.regularity.value,
        }


def _pivot(d) -> int:
    """First index whose magnitude matches the largest entry of ``d``."""
    a = np.abs(d)
    return int(np.flatnonzero(a >= a.max() * (1 - 1e-9))[0])


@dataclass
class ContinuumSolution:
    """Solutions x = base + directions @ t for t in param_box (nullity 1: exact).

    For nullity 1 the direction is scaled so that its largest entry (first on
    ties) is 1
    and ``base`` has a zero there, so the parameter is that x coordinate.
    """

    alpha: IndexSet
    base: np.ndarray
    directions: np.ndarray
    param_box: np.ndarray
    dim: int

    def point(self, t) -> np.ndarray:
        return self.base + self.directions.T @ np.atleast_1d(np.asarray(t, dtype=float))

    def endpoints(self) -> list[np.ndarray]:
        if self.dim != 1:
            raise ValueError("endpoints are defined for one-dimensional continua only")
        return [self.point(t) for t in self.param_box[0]]

    def sample(self, k: int) -> list[np.ndarray]:
        if self.dim != 1:
            raise ValueError("sampling is defined for one-dimensional continua only")
        lo, hi = self.param_box[0]
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("continuum is unbounded")
        return [self.point(t) for t in np.linspace(lo, hi, k)]

    def contains(self, x, tol: float) -> bool:
        if self.dim != 1:
            return False
        d = self.directions[0]
        j = _pivot(d)
        t = (x[j] - self.base[j]) / d[j]
        lo, hi = self.param_box[0]
        if t < lo - tol or t > hi + tol:
            return False
        return bool(np.max(np.abs(self.point(t) - x)) <= tol)

    def to_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "base": self.base.tolist(),
            "directions": self.directions.tolist(),
            "param_box": self.param_box.tolist(),
            "dim": self.dim,
        }


@dataclass
class SolveResult:
    isolated: list[SolutionPoint]
    continua: list[ContinuumSolution]

    def __iter__(self):
        return iter((self.isolated, self.continua))

    @property
    def count(self) -> int | float:
        return float("inf") if self.continua else len(self.isolated)

    def to_dict(self) -> dict:
        return {
            "solutions": [s.to_dict() for s in self.isolated],
            "continua": [c.to_dict() for c in self.continua],
        }


@dataclass(frozen=True)
class ResidualReport:
    nonnegativity: float
    complementarity: float
    linear: float
    tol: float

    @property
    def certified(self) -> bool:
        return max(self.nonnegativity, self.complementarity, self.linear) <= self.tol


def verify_solution(problem: LcpProblem, s: SolutionPoint, tol: float = DEFAULT_TOL) -> ResidualReport:
    z, w = np.asarray(s.z, float), np.asarray(s.w, float)
    neg = max(0.0, -float(np.min(z)), -float(np.min(w)))
    gap = abs(float(z @ w))
    lin = float(np.max(np.abs(w - problem.m @ z - problem.q)))
    return ResidualReport(neg, gap, lin, problem.tol(tol))


def nullspace(c: np.ndarray, rtol: float, min_nullity: int = 0) -> tuple[np.ndarray, int]:
    """Orthonormal nullspace basis (columns) and rank of ``c`` via SVD."""
    _, sv, vt = np.linalg.svd(c)
    rank = min(int(np.sum(sv > rtol)), c.shape[1] - min_nullity)
    return vt[rank:].T, rank


def feasible_interval(c0, d, tol: float) -> tuple[float, float] | None:
    """The set {t : c0 + t d >= -tol}, computed from componentwise ratio bounds."""
    lo, hi = -np.inf, np.inf
    for ci, di in zip(c0, d):
        if di > 0:
            lo = max(lo, (-tol - ci) / di)
        elif di < 0:
            hi = min(hi, (-tol - ci) / di)
        elif ci < -tol:
            return None
    if lo > hi:
        return None
    return lo, hi


def _singular_continuum(c, alpha, q, tol) -> ContinuumSolution | None:
    basis, _ = nullspace(c, tol, min_nullity=1)
    p0, *_ = np.linalg.lstsq(c, q, rcond=None)
    if np.max(np.abs(c @ p0 - q), initial=0.0) > tol:
        return None
    k = basis.shape[1]
    s = orthant_matrix(alpha)
    if k == 1:
        v = basis[:, 0]
        dx = s @ v
        j = _pivot(dx)
        v = v / dx[j]
        dx = dx / dx[j] + 0.0
        # shift the particular solution so that x_j is the parameter itself
        p0 = p0 - (s @ p0)[j] * v
        iv = feasible_interval(p0, v, 0.0)
        if iv is None:
            # feasible only within rounding: collapse to a single point
            near = feasible_interval(p0, v, tol)
            if near is None:
                return None
            iv = (0.5 * (near[0] + near[1]),) * 2
        base = s @ p0
        return ContinuumSolution(alpha, base, dx[None, :], np.array([iv], dtype=float), 1)
    # nullity >= 2: bounding box of {t : p0 + B t >= 0} by linear programming
    box = []
    for i in range(k):
        bounds = []
        for sense in (1.0, -1.0):
            cost = np.zeros(k)
            cost[i] = sense
            res = linprog(cost, A_ub=-basis, b_ub=p0, bounds=[(None, None)] * k, method="highs")
            if res.status == 2:
                res = linprog(cost, A_ub=-basis, b_ub=p0 + tol, bounds=[(None, None)] * k, method="highs")
            if res.status == 2:
                return None
            if res.status == 3:
                bounds.append(-sense * np.inf)
            else:
                bounds.append(float(res.x[i]))
        box.append((bounds[0], bounds[1]))
    return ContinuumSolution(alpha, s @ p0 + 0.0, (s @ basis).T + 0.0, np.array(box, dtype=float), k)


def solve_alpha(problem: LcpProblem, alpha: IndexSet, tol: float = DEFAULT_TOL):
    """Solutions of f_M(x) = q inside the orthant alpha.

    Returns a SolutionPoint, a ContinuumSolution, or None.
    """
    m, q = problem.m, problem.q
    atol = problem.tol(tol)
    dtol = det_tol(m, tol)
    c = complementary_matrix(m, alpha, 1)
    d = float(np.linalg.det(c))
    if abs(d) > dtol:
        p = np.linalg.solve(c, q)
        if np.min(p) < -atol:
            return None
        p = np.maximum(p, 0.0)
        x = orthant_matrix(alpha) @ p + 0.0
        z, w = x_to_zw(x)
        ill = abs(d) < ILL_CONDITIONED * max(1.0, float(np.max(np.abs(m)))) ** problem.n
        return SolutionPoint(x, z, w, [alpha], ill_conditioned=ill)
    return _singular_continuum(c, alpha, q, atol)


def solve_enumeration(problem: LcpProblem, tol: float = DEFAULT_TOL, cap: int = ENUMERATION_CAP) -> SolveResult:
    if problem.n > cap:
        raise DimensionError(f"n = {problem.n} exceeds the enumeration cap {cap}")
    atol = problem.tol(tol)
    merge = MERGE_FACTOR * atol
    points: list[SolutionPoint] = []
    continua: list[ContinuumSolution] = []
    for alpha in IndexSet.all(problem.n):
        out = solve_alpha(problem, alpha, tol)
        if out is None:
            continue
        if isinstance(out, ContinuumSolution):
            continua.append(out)
            continue
        for s in points:
            if np.max(np.abs(s.x - out.x)) <= merge:
                s.witnesses.append(alpha)
                s.ill_conditioned = s.ill_conditioned or out.ill_conditioned
                break
        else:
            points.append(out)
    if continua:
        # endpoints of a continuum are not isolated solutions
        points = [s for s in points if not any(c.contains(s.x, merge) for c in continua)]
    points.sort(key=lambda s: (min(a.mask for a in s.witnesses), tuple(s.x)))
    return SolveResult(points, continua)


def solve(m, q, tol: float = DEFAULT_TOL) -> SolveResult:
    return solve_enumeration(LcpProblem(m, q), tol)
