"""Feedback interconnection of two LCPs and the pleat scenario.

Two LCPs coupled through their z variables,

    w_a = M_a z_a + H_a z_b + theta_a,    w_b = M_b z_b + H_b z_a + theta_b,

form a single LCP with block matrix [[M_a, H_a], [H_b, M_b]].  Coupling a
scalar ramp into the planar N-class matrix 2 O rotated by R_s sweeps the
pleat surface; moving the offset mu unfolds the pitchfork.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bifurcation import BifurcationDiagram, PwlPath, connected_components, trace_path
from .core import DEFAULT_TOL, DimensionError, LcpProblem, as_matrix, as_vector
from .equivalence import REP_O

DEFAULT_S = 10 * math.pi / 9


@dataclass(frozen=True)
class Affine:
    """theta(lambda) = const + slope * lambda."""

    const: np.ndarray
    slope: np.ndarray

    @classmethod
    def of(cls, value, n: int, name: str) -> "Affine":
        if isinstance(value, Affine):
            const, slope = value.const, value.slope
        elif isinstance(value, dict):
            if "const" not in value:
                raise KeyError(f"{name}.const")
            const = value["const"]
            slope = value.get("slope", np.zeros(n))
        else:
            const, slope = value, np.zeros(n)
        try:
            return cls(as_vector(const, n), as_vector(slope, n))
        except DimensionError as exc:
            raise DimensionError(f"{name}: {exc}") from None

    def at(self, lam: float) -> np.ndarray:
        return self.const + self.slope * lam


def _block(h, rows: int, cols: int, name: str) -> np.ndarray:
    a = np.zeros((rows, cols)) if h is None else np.array(h, dtype=float)
    if a.ndim == 1 and a.size == rows * cols:
        a = a.reshape(rows, cols)
    if a.shape != (rows, cols):
        raise DimensionError(f"{name} must be {rows}x{cols}, got {a.shape}")
    return a


@dataclass
class InterconnectionSpec:
    m_a: np.ndarray
    m_b: np.ndarray
    h_a: np.ndarray | None = None
    h_b: np.ndarray | None = None
    theta_a: Affine | None = None
    theta_b: Affine | None = None

    def __post_init__(self):
        self.m_a = as_matrix(self.m_a)
        self.m_b = as_matrix(self.m_b)
        na, nb = self.n_a, self.n_b
        try:
            self.h_a = _block(self.h_a, na, nb, "h_a")
            self.h_b = _block(self.h_b, nb, na, "h_b")
        except ValueError as exc:
            raise DimensionError(str(exc)) from None
        self.theta_a = Affine.of(np.zeros(na) if self.theta_a is None else self.theta_a, na, "theta_a")
        self.theta_b = Affine.of(np.zeros(nb) if self.theta_b is None else self.theta_b, nb, "theta_b")

    @property
    def n_a(self) -> int:
        return self.m_a.shape[0]

    @property
    def n_b(self) -> int:
        return self.m_b.shape[0]

    @classmethod
    def from_dict(cls, data: dict) -> "InterconnectionSpec":
        for key in ("m_a", "m_b"):
            if key not in data:
                raise KeyError(key)
        return cls(data["m_a"], data["m_b"], data.get("h_a"), data.get("h_b"), data.get("theta_a"), data.get("theta_b"))

    @classmethod
    def load(cls, path) -> "InterconnectionSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ParametricLcp:
    """LCP(M, q0 + lambda q1)."""

    m: np.ndarray
    q0: np.ndarray
    q1: np.ndarray

    @property
    def n(self) -> int:
        return self.m.shape[0]

    def at(self, lam: float) -> LcpProblem:
        return LcpProblem(self.m, self.q0 + self.q1 * lam)

    def as_path(self, lo: float = 0.0, hi: float = 1.0) -> PwlPath:
        return PwlPath(np.vstack([self.q0 + self.q1 * lo, self.q0 + self.q1 * hi]), (lo, hi))


def interconnect(spec: InterconnectionSpec) -> ParametricLcp:
    m = np.block([[spec.m_a, spec.h_a], [spec.h_b, spec.m_b]])
    q0 = np.concatenate([spec.theta_a.const, spec.theta_b.const])
    q1 = np.concatenate([spec.theta_a.slope, spec.theta_b.slope])
    return ParametricLcp(m, q0, q1)


def split_z(spec: InterconnectionSpec, z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=float)
    return z[: spec.n_a], z[spec.n_a:]


# --- pleat scenario ------------------------------------------------------------------


def scalar_ramp_solution(lam: float, slope: float = 2.0, offset: float = -1.0) -> float:
    """Solution z of the scalar LCP(1, offset + slope * lambda)."""
    return max(0.0, -(offset + slope * lam)) + 0.0


def rotation(s: float) -> np.ndarray:
    c, t = math.cos(s), math.sin(s)
    return np.array([[c, -t], [t, c]])


@dataclass
class PleatScenario:
    """Ramp q_a(lambda) = ramp[0] + ramp[1] lambda fed through R_s into 2 O, shifted by mu."""

    s: float = DEFAULT_S
    mu: np.ndarray = field(default_factory=lambda: np.zeros(2))
    lambda_range: tuple[float, float] = (0.0, 1.0)
    samples: int = 401
    ramp: tuple[float, float] = (1.0, -2.0)

    def __post_init__(self):
        self.mu = as_vector(self.mu, 2)
        lo, hi = map(float, self.lambda_range)
        if not hi > lo:
            raise ValueError("lambda_range must satisfy lo < hi")
        self.lambda_range = (lo, hi)
        if self.samples < 2:
            raise ValueError("samples must be at least 2")

    def z_a(self, lam: float) -> float:
        return scalar_ramp_solution(lam, slope=self.ramp[1], offset=self.ramp[0])

    def q_b(self, lam: float) -> np.ndarray:
        return rotation(self.s) @ np.array([self.z_a(lam), lam]) + self.mu

    def spec(self) -> InterconnectionSpec:
        c, t = math.cos(self.s), math.sin(self.s)
        return InterconnectionSpec(
            m_a=[[1.0]],
            m_b=2 * REP_O,
            h_a=np.zeros((1, 2)),
            h_b=[[c], [t]],
            theta_a={"const": [self.ramp[0]], "slope": [self.ramp[1]]},
            theta_b={"const": self.mu, "slope": [-t, c]},
        )


def build_pleat_problem(scenario: PleatScenario) -> tuple[ParametricLcp, PwlPath]:
    lcp = interconnect(scenario.spec())
    return lcp, lcp.as_path(*scenario.lambda_range)


def kink(scenario: PleatScenario) -> float:
    """Parameter where the ramp crosses zero."""
    return -scenario.ramp[0] / scenario.ramp[1]


def on_center_mu(s: float = DEFAULT_S, ramp: tuple[float, float] = (1.0, -2.0)) -> np.ndarray:
    """Offset that sends the path through the cone apex exactly at the ramp kink."""
    lam = -ramp[0] / ramp[1]
    za = scalar_ramp_solution(lam, slope=ramp[1], offset=ramp[0])
    return -rotation(s) @ np.array([za, lam]) + 0.0


def trace_pleat(scenario: PleatScenario, tol: float = DEFAULT_TOL) -> BifurcationDiagram:
    lcp, path = build_pleat_problem(scenario)
    return trace_path(lcp.m, path, tol)


@dataclass(frozen=True)
class Topology:
    """Coarse shape of a traced diagram.

    ``components`` holds the lambda extent of every connected piece and
    ``attached`` the rank (by coordinate ``axis``) of the piece starting at
    the left end among the solutions at the right end; it tells the two
    unfoldings of a pitchfork apart.
    """

    components: tuple[tuple[float, float], ...]
    counts: tuple[float, ...]
    attached: int | None = None

    @property
    def pitchfork(self) -> bool:
        return len(self.components) == 1 and self.counts in ((1.0, 3.0), (3.0, 1.0))

    @property
    def isolated_arc(self) -> bool:
        return len(self.components) == 2 and set(self.counts) == {1.0, 3.0}


def topology(d: BifurcationDiagram, axis: int = 1) -> Topology:
    lo_end, hi_end = d.path.domain
    groups = connected_components(d)
    comps = []
    for group in groups:
        lo = min(d.branches[i].interval[0] for i in group)
        hi = max(d.branches[i].interval[1] for i in group)
        comps.append((lo, hi))
    counts = []
    for _, _, c in d.count_fn:
        if not counts or counts[-1] != c:
            counts.append(c)
    ends = sorted((d.branches[i].x(hi_end)[axis], k) for k, g in enumerate(groups)
                  for i in g if d.branches[i].interval[1] >= hi_end)
    start = [k for k, (lo, _) in enumerate(comps) if lo <= lo_end]
    attached = None
    if len(start) == 1:
        ranks = [r for r, (_, k) in enumerate(ends) if k == start[0]]
        attached = ranks[0] if len(ranks) == 1 else None
    return Topology(tuple(sorted(comps)), tuple(counts), attached)


def unfolding_direction(s: float = DEFAULT_S, scan: int = 36, eps: float = 0.05,
                        scenario: PleatScenario | None = None) -> np.ndarray:
    """Unit vector u for which mu* + eps u and mu* - eps u give the two distinct unfoldings.

    Both offsets must split the diagram into a continuous branch and an
    isolated arc, attached to opposite outer branches.  Directions are
    scanned over a half circle and the middle of the longest admissible run
    is returned.
    """
    base = scenario or PleatScenario(s=s)
    mu0 = on_center_mu(base.s, base.ramp)
    angles = np.arange(scan) * math.pi / scan
    good = []
    for a in angles:
        u = np.array([math.cos(a), math.sin(a)])
        tops = [topology(trace_pleat(PleatScenario(base.s, mu0 + sg * eps * u, base.lambda_range,
                                                   base.samples, base.ramp)))
                for sg in (1.0, -1.0)]
        good.append(all(t.isolated_arc for t in tops) and tops[0].attached is not None
                    and tops[1].attached is not None and tops[0].attached != tops[1].attached)
    if not any(good):
        raise ValueError("no unfolding direction found")
    if all(good):
        return np.array([1.0, 0.0])
    best, best_len = 0, 0
    for start in range(scan):
        if not good[start] or good[start - 1]:
            continue
        k = 0
        while good[(start + k) % scan]:
            k += 1
        if k > best_len:
            best, best_len = start, k
    a = (best + (best_len - 1) / 2) * math.pi / scan
    return np.array([math.cos(a), math.sin(a)])
