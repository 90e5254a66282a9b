import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lcpgeom.singularity import annotate, classify_regularity, generalized_jacobian
from lcpgeom.solver import Regularity, solve

M = np.array([[1.0, 2.0], [2.0, 1.0]])


@pytest.mark.parametrize(
    "x, expected",
    [
        ((-4 / 3, 0), Regularity.SINGULAR),
        ((0, -4 / 3), Regularity.SINGULAR),
        ((0, -2), Regularity.SINGULAR),
        ((5, -1), Regularity.REGULAR),
        ((3, -1), Regularity.REGULAR),
        ((1, 1), Regularity.REGULAR),
        ((0, 0), Regularity.SINGULAR),
    ],
)
def test_classification_examples(x, expected):
    assert classify_regularity(M, x) is expected


def test_positive_half_axes_are_regular():
    # on {x1 = 0, x2 > 0} the family is [[1, 0], [2 - 2mu, 1]], determinant 1
    fam = generalized_jacobian(M, (0, 2))
    assert len(fam) == 2
    assert np.allclose(fam.determinants(), [1.0, 1.0])
    assert classify_regularity(M, (0, 2)) is Regularity.REGULAR


def test_jacobian_family_on_negative_half_axis():
    fam = generalized_jacobian(M, (0, -2))
    assert sorted(np.round(fam.determinants(), 12)) == [-3.0, 1.0]


def test_interior_point_single_valued():
    fam = generalized_jacobian(M, (-1, 2))
    assert len(fam) == 1


@given(arrays(float, (3, 3), elements=st.floats(-3, 3)), arrays(float, 3, elements=st.floats(-3, 3)),
       st.floats(0, 1), st.floats(0, 1))
def test_hull_members_match_verdict(m, x, t1, t2):
    x = x.copy()
    x[0] = 0.0
    x[1] = 0.0
    verdict = classify_regularity(m, x)
    # a random hull member: columns 1 and 2 move along [e_j, M_j]
    c = generalized_jacobian(m, x).vertices[0].copy()
    for j, t in ((0, t1), (1, t2)):
        c[:, j] = (1 - t) * np.eye(3)[:, j] + t * m[:, j]
    if verdict is Regularity.REGULAR:
        dets = generalized_jacobian(m, x).determinants()
        assert abs(np.linalg.det(c)) >= np.min(np.abs(dets)) - 1e-9


def test_annotate_case_b_points_regular():
    res = annotate(M, solve(M, [3.0, -1.0]))
    assert [s.regularity for s in res.isolated] == [Regularity.REGULAR]
    assert np.allclose(res.isolated[0].x, [5, -1])
