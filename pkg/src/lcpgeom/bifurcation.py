"""Solution branches of LCP(M, q(lambda)) along piecewise-linear paths.

On every path segment q(lambda) = a + b lambda is affine, so for each
nonsingular complementary matrix the cone coordinates
p(lambda) = C_M(alpha)^{-1} q(lambda) are affine too and the set where
p >= 0 is an interval found from ratio bounds.  Singular complementary
matrices contribute continua at the isolated parameters where the path
meets their (lower dimensional) cone.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .core import (
    DEFAULT_TOL,
    ENUMERATION_CAP,
    DimensionError,
    IndexSet,
    LcpProblem,
    as_matrix,
    complementary_matrix,
    det_tol,
    orthant_matrix,
    scaled_tol,
    x_to_zw,
)
from .singularity import classify_regularity
from .solver import ContinuumSolution, Regularity, solve_alpha

logger = logging.getLogger(__name__)

LAMBDA_TOL = 1e-10


@dataclass(frozen=True)
class PwlPath:
    """Piecewise-linear path through ``waypoints`` over ``domain``.

    With k segments, segment i covers lo + (hi - lo) [i/k, (i+1)/k].
    """

    waypoints: np.ndarray
    domain: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        w = np.atleast_2d(np.array(self.waypoints, dtype=float))
        if w.shape[0] < 2:
            raise ValueError("a path needs at least two waypoints")
        if not np.all(np.isfinite(w)):
            raise ValueError("waypoints must be finite")
        lo, hi = map(float, self.domain)
        if not hi > lo:
            raise ValueError("path domain must satisfy lo < hi")
        object.__setattr__(self, "waypoints", w)
        object.__setattr__(self, "domain", (lo, hi))

    @classmethod
    def parse(cls, text: str, domain=(0.0, 1.0)) -> "PwlPath":
        """Parse the literal ``"(a,b);(c,d);..."``."""
        parts = [p.strip() for p in text.split(";") if p.strip()]
        pts = []
        for part in parts:
            if not re.fullmatch(r"\(.*\)", part):
                raise ValueError(f"waypoint {part!r} must be parenthesised")
            pts.append([float(t) for t in part[1:-1].split(",")])
        if len({len(p) for p in pts}) > 1:
            raise ValueError("waypoints have different lengths")
        return cls(np.array(pts), domain)

    @property
    def n(self) -> int:
        return self.waypoints.shape[1]

    @property
    def segments(self) -> int:
        return self.waypoints.shape[0] - 1

    def breakpoints(self) -> np.ndarray:
        lo, hi = self.domain
        return lo + (hi - lo) * np.arange(self.segments + 1) / self.segments

    def affine(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(a, b) with q(lambda) = a + b lambda on segment i."""
        t = self.breakpoints()
        q0, q1 = self.waypoints[i], self.waypoints[i + 1]
        b = (q1 - q0) / (t[i + 1] - t[i])
        return q0 - b * t[i], b

    def segment_of(self, lam: float) -> int:
        t = self.breakpoints()
        i = int(np.searchsorted(t, lam, side="right")) - 1
        return min(max(i, 0), self.segments - 1)

    def __call__(self, lam: float) -> np.ndarray:
        a, b = self.affine(self.segment_of(lam))
        return a + b * lam


@dataclass
class SolutionBranch:
    segment: int
    alpha: IndexSet
    interval: tuple[float, float]
    x_affine: tuple[np.ndarray, np.ndarray]
    p_affine: tuple[np.ndarray, np.ndarray]

    def x(self, lam: float) -> np.ndarray:
        a, b = self.x_affine
        return a + b * lam

    def p(self, lam: float) -> np.ndarray:
        c, d = self.p_affine
        return c + d * lam

    def covers(self, lam: float, slack: float = 0.0) -> bool:
        return self.interval[0] - slack <= lam <= self.interval[1] + slack

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]


@dataclass
class ContinuumEvent:
    """Continuum of solutions met by the path; ``interval`` is a point unless the path runs inside a degenerate cone."""

    segment: int
    alpha: IndexSet
    interval: tuple[float, float]
    solution: ContinuumSolution

    @property
    def lam(self) -> float:
        return self.interval[0]


@dataclass
class Event:
    lam: float
    kind: str
    count_before: float
    count_after: float


@dataclass
class AnnotatedEvent:
    event: Event
    annotation: str
    meeting: list[tuple[np.ndarray, Regularity]] = field(default_factory=list)


@dataclass
class BifurcationDiagram:
    m: np.ndarray
    path: PwlPath
    branches: list[SolutionBranch]
    continua: list[ContinuumEvent]
    events: list[Event]
    count_fn: list[tuple[float, float, float]]
    tol: float = DEFAULT_TOL

    def count_at(self, lam: float) -> float:
        for lo, hi, c in self.count_fn:
            if lo <= lam <= hi:
                return c
        raise ValueError(f"lambda = {lam} outside the path domain")

    def solutions_at(self, lam: float) -> list[np.ndarray]:
        """Distinct x of every branch covering ``lam``."""
        merge = 10 * scaled_tol(self.m, self.path(lam), self.tol)
        out: list[np.ndarray] = []
        for br in self.branches:
            if br.covers(lam, LAMBDA_TOL):
                x = br.x(lam)
                if not any(np.max(np.abs(x - y)) <= merge for y in out):
                    out.append(x)
        return out


def _lambda_interval(c, d, lo, hi, atol) -> tuple[float, float] | None:
    """{lam in [lo, hi] : c + d lam >= 0} from exact per-coordinate ratios."""
    tiny = 1e-14 * max(1.0, float(np.max(np.abs(d), initial=0.0)))
    for ci, di in zip(c, d):
        if abs(di) <= tiny:
            if ci + di * lo < -atol and ci + di * hi < -atol:
                return None
            continue
        root = -ci / di
        if di > 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
    if lo > hi + LAMBDA_TOL:
        return None
    return float(lo), float(max(lo, hi))


def _range_complement(c, atol) -> np.ndarray:
    u, sv, _ = np.linalg.svd(c)
    rank = min(int(np.sum(sv > atol)), c.shape[0] - 1)
    return u[:, rank:]


def _continuum_interval(c, a, b, lo, hi, atol) -> tuple[float, float] | None:
    """Range of lambda in [lo, hi] with {p >= 0 : C p = a + b lam} nonempty (path inside a degenerate cone)."""
    n = c.shape[0]
    pinv = np.linalg.pinv(c)
    _, sv, vt = np.linalg.svd(c)
    rank = min(int(np.sum(sv > atol)), n - 1)
    basis = vt[rank:].T
    k = basis.shape[1]
    # variables (lam, t): pinv (a + b lam) + basis t >= 0
    a_ub = -np.hstack([(pinv @ b)[:, None], basis])
    b_ub = pinv @ a + atol
    bounds = [(lo, hi)] + [(None, None)] * k
    out = []
    for sense in (1.0, -1.0):
        cost = np.zeros(k + 1)
        cost[0] = sense
        res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if res.status != 0:
            return None
        out.append(float(res.x[0]))
    return out[0], out[1]


def _trace_segment(m, path, i, tol):
    n = m.shape[0]
    a, b = path.affine(i)
    t = path.breakpoints()
    lo, hi = float(t[i]), float(t[i + 1])
    scale_q = max(float(np.max(np.abs(path.waypoints[i]))), float(np.max(np.abs(path.waypoints[i + 1]))))
    atol = tol * max(1.0, float(np.max(np.abs(m))), scale_q)
    dtol = det_tol(m, tol)
    branches, continua = [], []
    for alpha in IndexSet.all(n):
        cmat = complementary_matrix(m, alpha, 1)
        s = orthant_matrix(alpha)
        if abs(np.linalg.det(cmat)) > dtol:
            cinv = np.linalg.inv(cmat)
            c, d = cinv @ a, cinv @ b
            iv = _lambda_interval(c, d, lo, hi, atol)
            if iv is not None:
                branches.append(SolutionBranch(i, alpha, iv, (s @ c, s @ d), (c, d)))
            continue
        perp = _range_complement(cmat, atol)
        ra, rb = perp.T @ a, perp.T @ b
        if np.linalg.norm(rb) <= atol:
            if np.linalg.norm(ra) > atol:
                continue
            iv = _continuum_interval(cmat, a, b, lo, hi, atol)
            if iv is None:
                continue
            sol = solve_alpha(LcpProblem(m, a + b * iv[0]), alpha, tol)
            if isinstance(sol, ContinuumSolution):
                continua.append(ContinuumEvent(i, alpha, iv, sol))
            continue
        lam = -float(ra @ rb) / float(rb @ rb)
        if not lo - LAMBDA_TOL <= lam <= hi + LAMBDA_TOL:
            continue
        if np.linalg.norm(ra + rb * lam) > atol:
            continue
        lam = min(max(lam, lo), hi)
        sol = solve_alpha(LcpProblem(m, a + b * lam), alpha, tol)
        if isinstance(sol, ContinuumSolution):
            continua.append(ContinuumEvent(i, alpha, (lam, lam), sol))
    return branches, continua


def _prune_points(branches, continua, m, path, tol):
    """Drop zero-length branches whose point already lies on another branch or continuum."""
    keep = []
    for br in branches:
        if br.length > LAMBDA_TOL:
            keep.append(br)
            continue
        lam = br.interval[0]
        x = br.x(lam)
        merge = 10 * scaled_tol(m, path(lam), tol)
        dup = any(
            o is not br and o.covers(lam, LAMBDA_TOL) and np.max(np.abs(o.x(lam) - x)) <= merge
            and (o.length > LAMBDA_TOL or o in keep)
            for o in branches
        )
        dup = dup or any(abs(c.lam - lam) <= LAMBDA_TOL and c.solution.contains(x, merge) for c in continua)
        if not dup:
            keep.append(br)
    return keep


def _count(d_branches, continua, m, path, lam, tol) -> float:
    if any(c.interval[0] - LAMBDA_TOL <= lam <= c.interval[1] + LAMBDA_TOL for c in continua):
        return math.inf
    merge = 10 * scaled_tol(m, path(lam), tol)
    xs: list[np.ndarray] = []
    for br in d_branches:
        if br.covers(lam):
            x = br.x(lam)
            if not any(np.max(np.abs(x - y)) <= merge for y in xs):
                xs.append(x)
    return float(len(xs))


def trace_path(m, path: PwlPath, tol: float = DEFAULT_TOL, cap: int = ENUMERATION_CAP) -> BifurcationDiagram:
    m = as_matrix(m)
    if path.n != m.shape[0]:
        raise DimensionError(f"path lives in R^{path.n} but M is {m.shape[0]}x{m.shape[0]}")
    if m.shape[0] > cap:
        raise DimensionError(f"n = {m.shape[0]} exceeds the enumeration cap {cap}")
    branches, continua = [], []
    for i in range(path.segments):
        br, co = _trace_segment(m, path, i, tol)
        branches += br
        continua += co
    branches = _prune_points(branches, continua, m, path, tol)
    branches.sort(key=lambda b: (b.segment, b.alpha.mask))

    lo, hi = path.domain
    cands = [c.interval[k] for c in continua for k in (0, 1)]
    for br in branches:
        for end in br.interval:
            if abs(float(np.min(br.p(end)))) <= 10 * scaled_tol(m, path(end), tol) * max(1.0, float(np.max(np.abs(br.p_affine[1])))):
                cands.append(end)
    cands = sorted(c for c in cands if lo + LAMBDA_TOL < c < hi - LAMBDA_TOL)
    marks: list[float] = []
    for c in cands:
        if not marks or c - marks[-1] > 1e3 * LAMBDA_TOL:
            marks.append(c)

    grid = [lo] + marks + [hi]
    count_fn = []
    for a, b in zip(grid[:-1], grid[1:]):
        count_fn.append((a, b, _count(branches, continua, m, path, 0.5 * (a + b), tol)))
    events = []
    for k, lam in enumerate(marks):
        before, after = count_fn[k][2], count_fn[k + 1][2]
        if any(c.interval[0] - 1e3 * LAMBDA_TOL <= lam <= c.interval[1] + 1e3 * LAMBDA_TOL for c in continua):
            kind = "continuum"
        elif before != after:
            kind = "count-change"
        else:
            kind = "face-crossing"
        events.append(Event(lam, kind, before, after))
    return BifurcationDiagram(m, path, branches, continua, events, count_fn, tol)


def meeting_points(d: BifurcationDiagram, lam: float) -> list[np.ndarray]:
    """Distinct x where some branch starts or ends at ``lam``."""
    merge = 10 * scaled_tol(d.m, d.path(lam), d.tol)
    out: list[np.ndarray] = []
    for br in d.branches:
        if min(abs(br.interval[0] - lam), abs(br.interval[1] - lam)) <= 1e3 * LAMBDA_TOL:
            x = br.x(lam)
            if not any(np.max(np.abs(x - y)) <= merge for y in out):
                out.append(x)
    return out


def detect_bifurcations(d: BifurcationDiagram, m=None) -> list[AnnotatedEvent]:
    m = d.m if m is None else as_matrix(m)
    out = []
    for ev in d.events:
        meeting = [(x, classify_regularity(m, x, d.tol)) for x in meeting_points(d, ev.lam)]
        if ev.kind == "continuum":
            note = "bifurcation (degenerate cone)"
        elif ev.kind == "count-change":
            singular = any(r is Regularity.SINGULAR for _, r in meeting)
            note = "bifurcation (non-smooth singularity)" if singular else "count change"
        else:
            note = "regular crossing"
        out.append(AnnotatedEvent(ev, note, meeting))
    return out


def connected_components(d: BifurcationDiagram) -> list[list[int]]:
    """Group branch indices whose endpoints meet at the same (lambda, x)."""
    nb = len(d.branches)
    parent = list(range(nb))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(nb):
        for j in range(i + 1, nb):
            bi, bj = d.branches[i], d.branches[j]
            for li in bi.interval:
                if bj.covers(li, 1e3 * LAMBDA_TOL):
                    merge = 10 * scaled_tol(d.m, d.path(li), d.tol)
                    if np.max(np.abs(bi.x(li) - bj.x(li))) <= merge:
                        parent[find(i)] = find(j)
            for lj in bj.interval:
                if bi.covers(lj, 1e3 * LAMBDA_TOL):
                    merge = 10 * scaled_tol(d.m, d.path(lj), d.tol)
                    if np.max(np.abs(bi.x(lj) - bj.x(lj))) <= merge:
                        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(nb):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


# --- sampling and export ------------------------------------------------------------


@dataclass(frozen=True)
class SampleRow:
    branch: int
    alpha: IndexSet
    lam: float
    x: np.ndarray
    z: np.ndarray


def sample_diagram(d: BifurcationDiagram, samples: int, dedupe: bool = False) -> list[SampleRow]:
    """Rows on a uniform lambda grid per branch, then points along each continuum.

    Branch ids count from 1 in diagram order; continua follow the branches.
    With ``dedupe`` a (lambda, x) already emitted by an earlier branch is skipped.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    rows: list[SampleRow] = []
    seen: list[tuple[float, np.ndarray]] = []

    def emit(bid, alpha, lam, x):
        if dedupe:
            for l0, x0 in seen:
                if abs(l0 - lam) <= LAMBDA_TOL and np.max(np.abs(x0 - x)) <= 1e-9 * max(1.0, float(np.max(np.abs(x)))):
                    return
            seen.append((lam, x))
        z, _ = x_to_zw(x)
        rows.append(SampleRow(bid, alpha, float(lam), x + 0.0, z))

    bid = 0
    for br in d.branches:
        bid += 1
        lo, hi = br.interval
        grid = [lo] if br.length <= LAMBDA_TOL else np.linspace(lo, hi, samples)
        for lam in grid:
            emit(bid, br.alpha, lam, br.x(lam))
    for ce in d.continua:
        bid += 1
        lams = [ce.lam] if ce.interval[1] - ce.interval[0] <= LAMBDA_TOL else np.linspace(*ce.interval, samples)
        for lam in lams:
            sol = ce.solution if lam == ce.lam else solve_alpha(LcpProblem(d.m, d.path(lam)), ce.alpha, d.tol)
            if not isinstance(sol, ContinuumSolution) or sol.dim != 1:
                continue
            try:
                pts = sol.sample(samples)
            except ValueError:
                logger.warning("skipping unbounded continuum for alpha %s at lambda %g", ce.alpha, lam)
                continue
            for x in pts:
                emit(bid, ce.alpha, lam, x)
    return rows


def fmt(v: float) -> str:
    s = format(float(v), ".12g")
    return "0" if s in ("-0", "0") else s


def _csv_text(rows: Sequence[SampleRow], n: int, with_branch: bool, coords: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["l"] + [f"x{i + 1}" for i in range(n)]
    writer.writerow((["branch"] if with_branch else []) + header)
    for r in rows:
        vals = r.z if coords == "z" else r.x
        line = [fmt(r.lam)] + [fmt(v) for v in vals]
        writer.writerow(([str(r.branch)] if with_branch else []) + line)
    return buf.getvalue()


def diagram_csv(rows: Sequence[SampleRow], n: int, coords: str = "x") -> str:
    """Single table with a leading ``branch`` column."""
    return _csv_text(rows, n, True, coords)


def branch_csvs(rows: Sequence[SampleRow], n: int, coords: str = "x") -> dict[int, str]:
    """One ``l,x1,...`` table per branch id."""
    by_branch: dict[int, list[SampleRow]] = {}
    for r in rows:
        by_branch.setdefault(r.branch, []).append(r)
    return {bid: _csv_text(rs, n, False, coords) for bid, rs in sorted(by_branch.items())}


def sample_pwl_graph(m, grid: tuple[float, float, float] | Sequence[np.ndarray]) -> list[tuple[float, float, float]]:
    """Triples (f_M(x)_1, f_M(x)_2, x_1) over a rectangular grid of x.

    ``grid`` is either (lo, hi, step) applied to both axes or a pair of 1-D
    coordinate arrays.
    """
    from .core import pwl_apply

    m = as_matrix(m)
    if m.shape != (2, 2):
        raise DimensionError("the graph sampler works on 2x2 matrices")
    if len(grid) == 3 and np.isscalar(grid[0]):
        lo, hi, step = map(float, grid)
        if step <= 0 or hi < lo:
            raise ValueError("grid needs lo <= hi and step > 0")
        axis = lo + step * np.arange(int(math.floor((hi - lo) / step + 1e-9)) + 1)
        xs, ys = axis, axis
    else:
        xs, ys = (np.asarray(g, float) for g in grid)
    out = []
    for x1 in xs:
        for x2 in ys:
            y = pwl_apply(m, [x1, x2])
            out.append((float(y[0]) + 0.0, float(y[1]) + 0.0, float(x1) + 0.0))
    return out
