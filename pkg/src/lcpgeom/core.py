"""Matrices, index sets and the piecewise-linear map of an LCP.

An LCP(M, q) asks for z, w >= 0 with w = M z + q and z.w = 0.  Writing
x = w - z turns it into the piecewise-linear equation f_M(x) = q, where on
the orthant indexed by alpha (the coordinates with x_i <= 0) the map acts
as the complementary matrix C_{-M}(alpha).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
ENUMERATION_CAP = 16


class DimensionError(ValueError):
    pass


def as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_vector(v, n: int | None = None) -> np.ndarray:
    a = np.atleast_1d(np.array(v, dtype=float))
    if a.ndim != 1:
        raise DimensionError(f"vector must be one-dimensional, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise DimensionError(f"vector has length {a.shape[0]}, expected {n}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def scaled_tol(m=None, q=None, base: float = DEFAULT_TOL) -> float:
    """Absolute zero-test tolerance ``base * max(1, |M|_inf, |q|_inf)``."""
    scale = 1.0
    if m is not None:
        scale = max(scale, float(np.max(np.abs(m), initial=0.0)))
    if q is not None:
        scale = max(scale, float(np.max(np.abs(q), initial=0.0)))
    return base * scale


def det_tol(m, base: float = DEFAULT_TOL) -> float:
    """Tolerance for determinants of complementary matrices of ``m``.

    Entries of every C_M(alpha) are bounded by max(1, |M|_inf), so the
    determinant scales with its n-th power.
    """
    m = np.asarray(m, dtype=float)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    return base * scale ** m.shape[0]


@dataclass(frozen=True, order=True)
class IndexSet:
    """A subset alpha of {1, ..., n}, stored as a bit mask.

    Bit ``i`` (0-based) is set when index ``i + 1`` belongs to the set.  The
    ordering by mask value is the canonical enumeration order.
    """

    mask: int
    n: int = field(compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("index set dimension must be positive")
        if self.mask < 0 or self.mask >> self.n:
            raise DimensionError(f"mask {self.mask} does not fit in {self.n} bits")

    @classmethod
    def from_members(cls, members: Sequence[int], n: int) -> "IndexSet":
        mask = 0
        for i in members:
            if not 1 <= i <= n:
                raise DimensionError(f"index {i} outside 1..{n}")
            mask |= 1 << (i - 1)
        return cls(mask, n)

    @classmethod
    def parse(cls, text: str, n: int) -> "IndexSet":
        body = text.strip().strip("{}").strip()
        if not body:
            return cls(0, n)
        return cls.from_members([int(t) for t in body.split(",")], n)

    @classmethod
    def all(cls, n: int) -> Iterator["IndexSet"]:
        if n > ENUMERATION_CAP:
            raise DimensionError(f"n = {n} exceeds the enumeration cap {ENUMERATION_CAP}")
        for mask in range(1 << n):
            yield cls(mask, n)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    def __contains__(self, i: int) -> bool:
        return 1 <= i <= self.n and bool(self.mask >> (i - 1) & 1)

    def indicator(self) -> np.ndarray:
        return np.array([self.mask >> i & 1 for i in range(self.n)], dtype=bool)

    def complement(self) -> "IndexSet":
        return IndexSet(((1 << self.n) - 1) ^ self.mask, self.n)

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.members) + "}"


@dataclass(frozen=True, eq=False)
class LcpProblem:
    m: np.ndarray
    q: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, LcpProblem):
            return NotImplemented
        return np.array_equal(self.m, other.m) and np.array_equal(self.q, other.q)

    __hash__ = None

    def __post_init__(self):
        m = as_matrix(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "q", as_vector(self.q, m.shape[0]))

    @property
    def n(self) -> int:
        return self.m.shape[0]

    def tol(self, base: float = DEFAULT_TOL) -> float:
        return scaled_tol(self.m, self.q, base)

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m.tolist(), "q": self.q.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "LcpProblem":
        if "m" not in data:
            raise KeyError("m")
        if "q" not in data:
            raise KeyError("q")
        prob = cls(data["m"], data["q"])
        if "n" in data and int(data["n"]) != prob.n:
            raise DimensionError(f"field n = {data['n']} disagrees with matrix size {prob.n}")
        return prob


def load_matrix(path) -> np.ndarray:
    """Read a matrix from JSON: either a bare list of rows or {"m": rows, ...}."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        if "m" not in data:
            raise KeyError("m")
        m = as_matrix(data["m"])
        if "n" in data and int(data["n"]) != m.shape[0]:
            raise DimensionError(f"field n = {data['n']} disagrees with matrix size {m.shape[0]}")
        return m
    return as_matrix(data)


@dataclass(frozen=True)
class ComplementaryCone:
    alpha: IndexSet
    generators: np.ndarray
    det: float
    degenerate: bool


def complementary_matrix(m, alpha: IndexSet, sign: int = 1) -> np.ndarray:
    """Column j is ``-sign * M[:, j]`` for j in alpha, else the unit vector e_j.

    ``sign=+1`` gives C_M(alpha), ``sign=-1`` gives C_{-M}(alpha).
    """
    m = as_matrix(m)
    n = m.shape[0]
    if alpha.n != n:
        raise DimensionError(f"index set over {alpha.n} indices used with a {n}x{n} matrix")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    c = np.eye(n)
    cols = alpha.indicator()
    c[:, cols] = -sign * m[:, cols]
    return c


def orthant_matrix(alpha: IndexSet) -> np.ndarray:
    """C_I(alpha): the diagonal sign matrix whose cone is the orthant alpha."""
    return np.diag(np.where(alpha.indicator(), -1.0, 1.0))


def complementary_cone(m, alpha: IndexSet, base_tol: float = DEFAULT_TOL) -> ComplementaryCone:
    c = complementary_matrix(m, alpha, 1)
    d = float(np.linalg.det(c))
    return ComplementaryCone(alpha, c, d, abs(d) <= det_tol(m, base_tol))


def complementary_cones(m, base_tol: float = DEFAULT_TOL) -> list[ComplementaryCone]:
    m = as_matrix(m)
    return [complementary_cone(m, a, base_tol) for a in IndexSet.all(m.shape[0])]


def sign_alpha(x, strict: bool = False) -> IndexSet:
    """Orthant index of ``x``: coordinates with x_i <= 0 (or < 0 if strict)."""
    x = as_vector(x)
    neg = x < 0 if strict else x <= 0
    return IndexSet(int(sum(1 << i for i in np.flatnonzero(neg))), x.shape[0])


def pwl_apply(m, x) -> np.ndarray:
    """Evaluate f_M(x) = C_{-M}(alpha) x with alpha = {i : x_i <= 0}."""
    m = as_matrix(m)
    x = as_vector(x, m.shape[0])
    return complementary_matrix(m, sign_alpha(x), -1) @ x


def x_to_zw(x) -> tuple[np.ndarray, np.ndarray]:
    x = as_vector(x)
    z = np.maximum(0.0, -x)
    w = np.maximum(0.0, x)
    return z + 0.0, w + 0.0


def zw_to_x(z, w, tol: float = DEFAULT_TOL) -> np.ndarray:
    z = as_vector(z)
    w = as_vector(w, z.shape[0])
    scale = max(1.0, float(np.max(np.abs(z))), float(np.max(np.abs(w))))
    if np.min(z) < -tol * scale or np.min(w) < -tol * scale:
        raise ValueError("z and w must be nonnegative")
    gap = abs(float(z @ w))
    if gap > tol * scale * scale:
        raise ValueError(f"complementarity violated: z.w = {gap:g}")
    return w - z


def in_cone(generators, y, tol: float = DEFAULT_TOL) -> bool:
    """Membership of ``y`` in pos(generators) for a nonsingular generator matrix."""
    try:
        p = np.linalg.solve(generators, y)
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(p >= -tol))


def all_index_sets(n: int) -> list[IndexSet]:
    return list(IndexSet.all(n))


def powerset_masks(members: Sequence[int]) -> Iterator[int]:
    """Bit masks of every subset of the given 0-based positions."""
    for r in range(len(members) + 1):
        for combo in itertools.combinations(members, r):
            yield sum(1 << i for i in combo)
