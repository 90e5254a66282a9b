"""Planar complementary-cone arrangements and their cyclic signatures.

For a 2x2 matrix the four generators e1, e2, -M[:,0], -M[:,1] cut the
plane into angular sectors.  Counting how many nondegenerate complementary
cones cover each sector, together with the rays carrying degenerate cones,
gives a cyclic word that is invariant under homeomorphisms of the plane up
to rotation and reflection.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, DimensionError, as_matrix, as_vector, complementary_cones

ANGLE_TOL = 1e-9
TWO_PI = 2.0 * math.pi
GENERATOR_LABELS = ("e1", "e2", "-m1", "-m2")


class BoundaryRay(ValueError):
    """Raised when q lies on a nondegenerate ray; carries the adjacent sector counts."""

    def __init__(self, ray_index: int, sectors: tuple[int, int]):
        super().__init__(f"q lies on ray {ray_index} between sectors with counts {sectors}")
        self.ray_index = ray_index
        self.sectors = sectors


@dataclass(frozen=True)
class RayArrangement:
    angles: tuple[float, ...]
    rays: np.ndarray
    sources: tuple[tuple[str, ...], ...]

    def ray_of(self, label: str) -> int:
        for i, src in enumerate(self.sources):
            if label in src:
                return i
        raise KeyError(label)

    def __len__(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class ConeSignature:
    sectors: tuple[int, ...]
    degenerate_rays: tuple[bool, ...]

    def word(self) -> tuple:
        out = []
        for deg, count in zip(self.degenerate_rays, self.sectors):
            out.append(("r", bool(deg)))
            out.append(("s", int(count)))
        return tuple(out)

    def canonical(self) -> tuple:
        """Lexicographically least rotation of the word or its reflection, starting at a ray."""
        word = self.word()
        k = len(word)
        # Reversing the interleaved word puts a sector first; shift by one to restart at a ray.
        rev = tuple(reversed(word))
        rev = rev[-1:] + rev[:-1]
        candidates = []
        for w in (word, rev):
            for r in range(0, k, 2):
                candidates.append(w[r:] + w[:r])
        return min(candidates)

    def digest(self) -> str:
        return hashlib.sha1(repr(self.canonical()).encode()).hexdigest()[:10]

    def to_dict(self) -> dict:
        return {"sectors": list(self.sectors), "degenerate_rays": list(self.degenerate_rays)}


def _angle(v) -> float:
    a = math.atan2(v[1], v[0])
    return a + TWO_PI if a < 0 else a


def _check_planar(m) -> np.ndarray:
    m = as_matrix(m)
    if m.shape != (2, 2):
        raise DimensionError(f"planar analysis needs a 2x2 matrix, got {m.shape}")
    return m


def arrangement(m) -> RayArrangement:
    m = _check_planar(m)
    gens = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), -m[:, 0], -m[:, 1]]
    for label, g in zip(GENERATOR_LABELS, gens):
        if np.linalg.norm(g) == 0.0:
            raise ValueError(f"generator {label} is zero; its direction is undefined")
    items = sorted((_angle(g), label) for g, label in zip(gens, GENERATOR_LABELS))
    angles: list[float] = []
    sources: list[list[str]] = []
    for ang, label in items:
        if angles and ang - angles[-1] <= ANGLE_TOL:
            sources[-1].append(label)
        else:
            angles.append(ang)
            sources.append([label])
    # wrap-around merge: a ray just below 2*pi coincides with one at 0
    if len(angles) > 1 and angles[0] + TWO_PI - angles[-1] <= ANGLE_TOL:
        sources[0] = sources[-1] + sources[0]
        angles.pop()
        sources.pop()
    rays = np.array([[math.cos(a), math.sin(a)] for a in angles])
    return RayArrangement(tuple(angles), rays, tuple(tuple(s) for s in sources))


def _sector_mid(arr: RayArrangement, i: int) -> np.ndarray:
    a = arr.angles[i]
    b = arr.angles[(i + 1) % len(arr)]
    if b <= a:
        b += TWO_PI
    mid = 0.5 * (a + b)
    return np.array([math.cos(mid), math.sin(mid)])


def _covering_count(cones, u, tol) -> int:
    count = 0
    for cone in cones:
        if cone.degenerate:
            continue
        p = np.linalg.solve(cone.generators, u)
        if np.all(p > tol):
            count += 1
    return count


def _degenerate_labels(cone) -> set[str]:
    return {f"-m{i}" if i in cone.alpha else f"e{i}" for i in (1, 2)}


def signature(m, tol: float = DEFAULT_TOL) -> ConeSignature:
    m = _check_planar(m)
    arr = arrangement(m)
    cones = complementary_cones(m, tol)
    sectors = tuple(_covering_count(cones, _sector_mid(arr, i), tol) for i in range(len(arr)))
    deg = [False] * len(arr)
    for cone in cones:
        if cone.degenerate:
            for label in _degenerate_labels(cone):
                deg[arr.ray_of(label)] = True
    return ConeSignature(sectors, tuple(deg))


def signatures_match(a: ConeSignature, b: ConeSignature) -> bool:
    return len(a.sectors) == len(b.sectors) and a.canonical() == b.canonical()


def locate(arr: RayArrangement, q) -> tuple[str, int]:
    """Return ("ray", i) if q lies on ray i, else ("sector", i)."""
    ang = _angle(q)
    k = len(arr)
    for i, a in enumerate(arr.angles):
        d = abs(ang - a)
        if min(d, TWO_PI - d) <= ANGLE_TOL:
            return "ray", i
    for i in range(k):
        a = arr.angles[i]
        b = arr.angles[(i + 1) % k]
        if b <= a:
            b += TWO_PI
        t = ang if ang >= a else ang + TWO_PI
        if a < t < b:
            return "sector", i
    raise AssertionError("angle not located")  # pragma: no cover


def count_solutions_by_region(m, q, tol: float = DEFAULT_TOL) -> int | str:
    """Number of LCP solutions for generic q, read off the cone arrangement.

    Returns ``"continuum"`` when q sits on a ray carrying a degenerate cone and
    raises :class:`BoundaryRay` when q sits on any other ray.
    """
    m = _check_planar(m)
    q = as_vector(q, 2)
    if np.linalg.norm(q) <= tol * max(1.0, float(np.max(np.abs(m)))):
        raise ValueError("q = 0 lies on every ray")
    arr = arrangement(m)
    sig = signature(m, tol)
    kind, i = locate(arr, q)
    if kind == "sector":
        return sig.sectors[i]
    if sig.degenerate_rays[i]:
        return "continuum"
    raise BoundaryRay(i, (sig.sectors[i - 1], sig.sectors[i]))


def is_generic(m, q, margin: float = 1e-6) -> bool:
    """True when q is at least ``margin`` radians away from every ray."""
    arr = arrangement(m)
    ang = _angle(q)
    for a in arr.angles:
        d = abs(ang - a)
        if min(d, TWO_PI - d) <= margin:
            return False
    return True


__all__ = [
    "BoundaryRay",
    "ConeSignature",
    "RayArrangement",
    "arrangement",
    "count_solutions_by_region",
    "is_generic",
    "signature",
    "signatures_match",
]
