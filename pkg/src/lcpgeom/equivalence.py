"""Equivalence and stability of planar LCP matrices.

Two matrices are LCP equivalent when a homeomorphism of the plane carries
the complementary cones of one onto those of the other.  The sign test on
off-diagonal entries and principal minors certifies equivalence cheaply;
otherwise the cyclic cone signature decides, with ``UNKNOWN`` reserved for
pairs whose signatures agree but where one matrix is not stable.
"""
from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .cones import ConeSignature, signature, signatures_match
from .core import (
    DEFAULT_TOL,
    DimensionError,
    IndexSet,
    as_matrix,
    complementary_matrix,
    det_tol,
    pwl_apply,
    orthant_matrix,
    scaled_tol,
)

# Representatives of the four classes of stable planar matrices.
REP_M = np.array([[-1.0, 1.0], [0.9, -1.0]])
REP_N = np.array([[-1.0, 1.0], [1.1, -1.0]])
REP_O = np.array([[0.5, 1.0], [1.0, 0.5]])
REP_K = np.array([[1.0, 1.0], [-1.0, 1.0]])
REP_L = np.array([[-0.5, -1.0], [-1.0, 0.5]])

REPRESENTATIVES = {"P": REP_K, "M-class": REP_M, "N-class": REP_N, "L-class": REP_L}


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    BOUNDARY = "boundary"


class Equivalence(str, enum.Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not-equivalent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class StabilityVerdict:
    status: Stability
    reasons: tuple[tuple[str, float, bool], ...]

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "conditions": [{"condition": c, "value": v, "passed": ok} for c, v, ok in self.reasons],
        }


def _planar(m) -> np.ndarray:
    m = as_matrix(m)
    if m.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got {m.shape}")
    return m


def _conditions(m) -> dict[str, float]:
    return {
        "M12": m[0, 1],
        "M21": m[1, 0],
        "det M11": m[0, 0],
        "det M22": m[1, 1],
        "det M": float(np.linalg.det(m)),
    }


def stability_2x2(m, tol: float = DEFAULT_TOL) -> StabilityVerdict:
    m = _planar(m)
    atol = scaled_tol(m, base=tol)
    dtol = det_tol(m, tol)
    reasons = []
    for name, value in _conditions(m).items():
        limit = dtol if name == "det M" else atol
        reasons.append((name, float(value), bool(abs(value) > limit)))
    passed = {name: ok for name, _, ok in reasons}
    if not all(passed[k] for k in ("det M11", "det M22", "det M")):
        status = Stability.UNSTABLE
    elif not (passed["M12"] and passed["M21"]):
        status = Stability.BOUNDARY
    else:
        status = Stability.STABLE
    return StabilityVerdict(status, tuple(reasons))


def equivalent_sufficient(m, n, tol: float = DEFAULT_TOL) -> bool:
    """Sign test: True certifies equivalence, False is inconclusive.

    Requires M12 N12 > 0, M21 N21 > 0 and det(M_aa) det(N_aa) > 0 for every
    nonempty alpha.  Pairs failing it may still be equivalent.
    """
    m, n = _planar(m), _planar(n)
    a, b = _conditions(m), _conditions(n)
    scale = scaled_tol(m, base=tol) * scaled_tol(n, base=tol)
    return all(a[k] * b[k] > scale for k in a)


@dataclass(frozen=True)
class EquivalenceResult:
    status: Equivalence
    method: str
    class_a: str
    class_b: str
    signature_a: ConeSignature | None = None
    signature_b: ConeSignature | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status.value, "method": self.method, "class_a": self.class_a, "class_b": self.class_b}
        if self.signature_a is not None:
            out["signature_a"] = self.signature_a.to_dict()
        if self.signature_b is not None:
            out["signature_b"] = self.signature_b.to_dict()
        return out


@functools.cache
def _representative_keys(tol: float) -> dict[tuple, str]:
    return {signature(rep, tol).canonical(): label for label, rep in REPRESENTATIVES.items()}


def _safe_signature(m, tol) -> ConeSignature | None:
    try:
        return signature(m, tol)
    except ValueError:
        return None


def classify_planar(m, tol: float = DEFAULT_TOL) -> str:
    """Class label of a 2x2 matrix: "P", "M-class", "N-class", "L-class" or "other(<hash>)"."""
    m = _planar(m)
    sig = _safe_signature(m, tol)
    tag = sig.digest() if sig is not None else "no-signature"
    if sig is None or stability_2x2(m, tol).status is not Stability.STABLE:
        return f"other({tag})"
    return _representative_keys(tol).get(sig.canonical(), f"other({tag})")


def equivalent(m, n, tol: float = DEFAULT_TOL) -> EquivalenceResult:
    m, n = _planar(m), _planar(n)
    ca, cb = classify_planar(m, tol), classify_planar(n, tol)
    sa, sb = _safe_signature(m, tol), _safe_signature(n, tol)
    if equivalent_sufficient(m, n, tol):
        return EquivalenceResult(Equivalence.EQUIVALENT, "sign-test", ca, cb, sa, sb)
    if sa is None or sb is None:
        return EquivalenceResult(Equivalence.UNKNOWN, "signature-undefined", ca, cb, sa, sb)
    if not signatures_match(sa, sb):
        return EquivalenceResult(Equivalence.NOT_EQUIVALENT, "signature", ca, cb, sa, sb)
    stable = all(stability_2x2(x, tol).status is Stability.STABLE for x in (m, n))
    if stable:
        return EquivalenceResult(Equivalence.EQUIVALENT, "signature", ca, cb, sa, sb)
    return EquivalenceResult(Equivalence.UNKNOWN, "signature", ca, cb, sa, sb)


@dataclass(frozen=True)
class NormalForm:
    label: str
    delta: tuple[int, ...]
    matrix: np.ndarray


def normal_forms() -> list[NormalForm]:
    """The 16 M_delta, 16 N_delta and 20 boundary O_delta matrices."""
    out = []
    for family, c in (("M", 2.0), ("N", 0.5)):
        for d0, d1, d2, d3 in itertools.product((-1, 1), repeat=4):
            mat = np.array([[d1, d3], [-d3 * (c * d0 - d1 * d2), d2]], dtype=float)
            out.append(NormalForm(family, (d0, d1, d2, d3), mat))
    for d1, d2, d3, d4 in itertools.product((-1, 1), (-1, 1), (-1, 0, 1), (-1, 0, 1)):
        if d3 * d4 == 0:
            out.append(NormalForm("O", (d1, d2, d3, d4), np.array([[d1, d3], [d4, d2]], dtype=float)))
    return out


# --- explicit equivalence witnesses -------------------------------------------------


@dataclass
class PiecewiseLinearMap:
    """y -> L_k y on the cone pos(G_k); pieces are given as (G_k, L_k)."""

    pieces: list[tuple[np.ndarray, np.ndarray]]
    tol: float = DEFAULT_TOL
    _inverse: list = field(init=False, repr=False)

    def __post_init__(self):
        cleaned, inverse = [], []
        for g, lin in self.pieces:
            g, lin = as_matrix(g), as_matrix(lin)
            if abs(np.linalg.det(g)) <= self.tol or abs(np.linalg.det(lin)) <= self.tol:
                raise ValueError("piece matrices must be nonsingular")
            cleaned.append((g, lin))
            inverse.append((lin @ g, np.linalg.inv(lin)))
        self.pieces = cleaned
        self._inverse = inverse

    @staticmethod
    def _eval(pieces, y, tol):
        for g, lin in pieces:
            p = np.linalg.solve(g, y)
            if np.all(p >= -tol * max(1.0, float(np.max(np.abs(p))))):
                return lin @ y
        raise ValueError(f"point {y} is not covered by any piece")

    def __call__(self, y) -> np.ndarray:
        return self._eval(self.pieces, np.asarray(y, float), self.tol)

    def inverse(self, u) -> np.ndarray:
        return self._eval(self._inverse, np.asarray(u, float), self.tol)

    def continuity_gap(self) -> float:
        """Largest jump between pieces on their shared boundary rays."""
        gap = 0.0
        for g, _ in self.pieces:
            for col in g.T:
                u = col / np.linalg.norm(col)
                images = []
                for g2, lin2 in self.pieces:
                    p = np.linalg.solve(g2, u)
                    if np.all(p >= -1e-9):
                        images.append(lin2 @ u)
                for a, b in itertools.combinations(images, 2):
                    gap = max(gap, float(np.max(np.abs(a - b))))
        return gap


@dataclass(frozen=True)
class WitnessReport:
    residual: float
    beta: dict[IndexSet, IndexSet]
    cones_mapped: bool
    continuity_gap: float
    samples: int

    @property
    def bijective(self) -> bool:
        return len(set(self.beta.values())) == len(self.beta)


def _orthant_samples(alpha: IndexSet, k: int, rng) -> np.ndarray:
    mag = rng.uniform(0.05, 1.0, size=(k, alpha.n))
    signs = np.where(alpha.indicator(), -1.0, 1.0)
    return mag * signs


def _inside(g, ys, tol) -> np.ndarray:
    p = np.linalg.solve(g, np.asarray(ys).T)
    return np.all(p >= -tol, axis=0)


def _induced_beta(m, n, phi, alpha, ys, rng, per, tol) -> tuple[IndexSet, bool]:
    """The beta with phi^{-1}(pos C_M(alpha)) = pos C_N(beta), tested by sampling both ways.

    Falls back to the cone containing most samples when no exact match exists.
    """
    cm = complementary_matrix(m, alpha, 1)
    best, best_hits = None, -1
    for beta in IndexSet.all(2):
        cn = complementary_matrix(n, beta, 1)
        if abs(np.linalg.det(cn)) <= det_tol(n, tol):
            continue
        hits = int(np.sum(_inside(cn, ys, tol)))
        if hits == len(ys):
            back = [phi(cn @ p) for p in rng.uniform(0.05, 1.0, size=(per, 2))]
            if np.all(_inside(cm, back, tol)):
                return beta, True
        if hits > best_hits:
            best, best_hits = beta, hits
    if best is None:
        raise ValueError(f"no complementary cone of N receives the orthant {alpha}")
    return best, False


def verify_witness(m, n, phi: PiecewiseLinearMap, beta=None, samples: int = 1000, seed: int = 0,
                   tol: float = DEFAULT_TOL) -> WitnessReport:
    """Check f_M = phi o f_N o psi numerically, with psi built from phi.

    On the orthant alpha, psi(x) = C_{-N}(beta(alpha))^{-1} phi^{-1}(C_{-M}(alpha) x),
    where beta is the cone bijection induced by phi^{-1}.  When ``beta`` is not
    given it is inferred from samples.  The residual is
    max |f_M(x) - phi(f_N(psi(x)))|_inf / (1 + |f_M(x)|_inf).
    """
    m, n = _planar(m), _planar(n)
    rng = np.random.default_rng(seed)
    alphas = list(IndexSet.all(2))
    per = -(-samples // len(alphas))
    chosen = dict(beta) if beta is not None else {}
    mapped = True
    residual = 0.0
    for alpha in alphas:
        xs = _orthant_samples(alpha, per, rng)
        ys = [phi.inverse(pwl_apply(m, x)) for x in xs]
        if alpha not in chosen:
            chosen[alpha], exact = _induced_beta(m, n, phi, alpha, ys, rng, per, tol)
            mapped = mapped and exact
        c_inv = np.linalg.inv(complementary_matrix(n, chosen[alpha], -1))
        for x, y in zip(xs, ys):
            fm = pwl_apply(m, x)
            back = phi(pwl_apply(n, c_inv @ y))
            residual = max(residual, float(np.max(np.abs(fm - back))) / (1.0 + float(np.max(np.abs(fm)))))
    return WitnessReport(residual, chosen, mapped, phi.continuity_gap(), per * len(alphas))


def swap_columns(m) -> np.ndarray:
    return as_matrix(m)[:, ::-1].copy()


EXAMPLE_GAMMA = {(): (1, 2), (1,): (1,), (2,): (2,), (1, 2): ()}
COMPLEMENT_GAMMA = {(): (1, 2), (1,): (2,), (2,): (1,), (1, 2): ()}


def sector_witness(target, source, gamma: dict) -> PiecewiseLinearMap:
    """phi(y) = C_{target~}(gamma(a)) C_{source~}(a)^{-1} y on pos C_{source~}(a).

    ``~`` swaps the two columns.  With target N and source O this is the
    explicit map between N and O; ``gamma`` maps member tuples of
    alpha to member tuples of its image.
    """
    tb, sb = swap_columns(target), swap_columns(source)
    pieces = []
    for a_members, g_members in gamma.items():
        a = IndexSet.from_members(a_members, 2)
        g = IndexSet.from_members(g_members, 2)
        src = complementary_matrix(sb, a, 1)
        pieces.append((src, complementary_matrix(tb, g, 1) @ np.linalg.inv(src)))
    return PiecewiseLinearMap(pieces)


def identity_witness() -> PiecewiseLinearMap:
    return PiecewiseLinearMap([(orthant_matrix(a), np.eye(2)) for a in IndexSet.all(2)])


__all__ = [
    "COMPLEMENT_GAMMA",
    "Equivalence",
    "EquivalenceResult",
    "NormalForm",
    "EXAMPLE_GAMMA",
    "PiecewiseLinearMap",
    "REPRESENTATIVES",
    "Stability",
    "StabilityVerdict",
    "WitnessReport",
    "classify_planar",
    "equivalent",
    "equivalent_sufficient",
    "identity_witness",
    "normal_forms",
    "sector_witness",
    "stability_2x2",
    "verify_witness",
]
