import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcpgeom.cones import (
    BoundaryRay,
    arrangement,
    count_solutions_by_region,
    is_generic,
    signature,
    signatures_match,
)
from lcpgeom.equivalence import REP_K, REP_L, REP_M, REP_N, REP_O
from lcpgeom.solver import solve

M = np.array([[1.0, 2.0], [2.0, 1.0]])


def _wrap(a):
    return a % (2 * math.pi)


@pytest.mark.parametrize(
    "m, angles",
    [
        (M, [0, math.pi / 2, math.atan2(-2, -1), math.atan2(-1, -2)]),
        ([[1, 1], [1, 1]], [0, math.pi / 2, 5 * math.pi / 4]),
        (np.eye(2), [0, math.pi / 2, math.pi, 3 * math.pi / 2]),
    ],
)
def test_arrangement_angles(m, angles):
    arr = arrangement(m)
    assert np.allclose(arr.angles, sorted(_wrap(a) for a in angles))
    assert sorted(sum(arr.sources, ())) == ["-m1", "-m2", "e1", "e2"]


def test_arrangement_rejects_zero_column():
    with pytest.raises(ValueError, match="-m1"):
        arrangement([[0, 1], [0, 1]])


def test_signature_examples():
    assert {0, 2, 4} <= set(signature(REP_M).sectors) <= {0, 2, 4}
    assert set(signature(REP_N).sectors) == {1, 3}
    assert set(signature(REP_K).sectors) == {1}
    assert set(signature(REP_L).sectors) <= {0, 2}


def test_signatures_match_examples():
    assert signatures_match(signature(REP_N), signature(REP_O))
    assert not signatures_match(signature(REP_M), signature(REP_N))
    assert signatures_match(signature(M), signature(M))


def test_signature_json_shape():
    d = signature(M).to_dict()
    assert set(d) == {"sectors", "degenerate_rays"}
    assert len(d["sectors"]) == len(d["degenerate_rays"]) == 4


def test_count_examples():
    assert count_solutions_by_region(M, [-2, -2]) == 3
    assert count_solutions_by_region([[1, 1], [1, 1]], [-2, -2]) == "continuum"
    rng = np.random.default_rng(0)
    for q in rng.normal(size=(50, 2)):
        assert count_solutions_by_region(REP_K, q) == 1


def test_boundary_ray_reports_neighbours():
    with pytest.raises(BoundaryRay) as info:
        count_solutions_by_region(M, [-1, -2])
    assert set(info.value.sectors) == {1, 3}
    with pytest.raises(ValueError):
        count_solutions_by_region(M, [0, 0])


@given(st.floats(0.01, 100))
def test_scale_invariance(c):
    for rep in (REP_M, REP_N, REP_K, REP_L, M):
        assert signature(c * rep) == signature(rep)


def test_reflection_and_rotation_invariance():
    # swapping coordinates reflects the arrangement
    p = np.array([[0.0, 1.0], [1.0, 0.0]])
    for rep in (REP_M, REP_N, REP_L):
        assert signatures_match(signature(rep), signature(p @ rep @ p))


def test_oracle_agreement_with_solver():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = rng.normal(size=(2, 2))
        for q in rng.normal(size=(50, 2)):
            if not is_generic(m, q):
                continue
            assert count_solutions_by_region(m, q) == len(solve(m, q).isolated)


def test_parity_of_stable_signatures():
    rng = np.random.default_rng(2)
    for _ in range(200):
        m = rng.normal(size=(2, 2))
        counts = {c % 2 for c in signature(m).sectors}
        assert len(counts) == 1
