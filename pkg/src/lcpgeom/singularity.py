"""Clarke generalized Jacobian of f_M and regularity of solution points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, IndexSet, as_matrix, as_vector, complementary_matrix, det_tol, powerset_masks, scaled_tol
from .solver import Regularity, SolveResult


@dataclass(frozen=True)
class JacobianFamily:
    """Vertices of the generalized Jacobian at ``point``.

    The Jacobian itself is the convex hull of ``vertices``.
    """

    point: np.ndarray
    active: tuple[IndexSet, ...]
    vertices: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def determinants(self) -> np.ndarray:
        return np.array([np.linalg.det(v) for v in self.vertices])


def generalized_jacobian(m, x, tol: float = DEFAULT_TOL) -> JacobianFamily:
    m = as_matrix(m)
    x = as_vector(x, m.shape[0])
    n = m.shape[0]
    atol = scaled_tol(m, x, tol)
    zero = [i for i in range(n) if abs(x[i]) <= atol]
    neg = sum(1 << i for i in range(n) if x[i] < -atol)
    active = sorted(IndexSet(neg | extra, n) for extra in powerset_masks(zero))
    vertices = tuple(complementary_matrix(m, a, -1) for a in active)
    return JacobianFamily(x, tuple(active), vertices)


def classify_regularity(m, x, tol: float = DEFAULT_TOL) -> Regularity:
    """Decide whether every matrix of the generalized Jacobian at x is nonsingular.

    The active orthants at x are all sign choices on the zero coordinates, so
    the hull is the set of matrices whose column j (x_j = 0) runs over the
    segment [e_j, M_j] while the other columns are fixed.  The determinant is
    affine in each such column, hence multilinear on that box, and takes its
    extreme values at the vertices.  Nonzero vertex determinants of one common
    sign therefore certify maximal rank; a zero or a sign change means some
    hull member is singular.
    """
    m = as_matrix(m)
    family = generalized_jacobian(m, x, tol)
    dets = family.determinants()
    if np.any(np.abs(dets) <= det_tol(m, tol)):
        return Regularity.SINGULAR
    if np.any(dets > 0) and np.any(dets < 0):
        return Regularity.SINGULAR
    return Regularity.REGULAR


def annotate(m, result: SolveResult, tol: float = DEFAULT_TOL) -> SolveResult:
    """Fill the regularity field of every isolated solution in place."""
    for s in result.isolated:
        s.regularity = classify_regularity(m, s.x, tol)
    return result
