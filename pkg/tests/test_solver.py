import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lcpgeom.core import DimensionError, IndexSet, LcpProblem, complementary_matrix, orthant_matrix
from lcpgeom.solver import (
    ContinuumSolution,
    SolutionPoint,
    feasible_interval,
    solve,
    solve_enumeration,
    verify_solution,
)

M = np.array([[1.0, 2.0], [2.0, 1.0]])


def xs(res):
    return sorted(tuple(np.round(s.x, 12)) for s in res.isolated)


def test_three_solutions():
    res = solve(M, [-2, -2])
    assert not res.continua
    assert np.allclose(xs(res), sorted([(-2, 2), (2, -2), (-2 / 3, -2 / 3)]))


def test_example2_continuum():
    res = solve([[1, 1], [1, 1]], [-2, -2])
    assert res.isolated == [] and len(res.continua) == 1
    c = res.continua[0]
    assert c.dim == 1
    assert np.allclose(c.param_box, [[-2, 0]])
    for mu in np.linspace(-2, 0, 7):
        assert np.allclose(c.point(mu), [mu, -2 - mu])
    assert res.count == float("inf")


@given(arrays(float, (3, 3), elements=st.floats(-5, 5)), arrays(float, 3, elements=st.floats(0.01, 5)))
def test_positive_q_gives_trivial_solution(m, q):
    res = solve(m, q)
    assert any(np.allclose(s.x, q) and np.allclose(s.z, 0) for s in res.isolated)


def test_verify_examples():
    prob = LcpProblem(M, [-2, -2])
    s = solve_enumeration(prob).isolated[0]
    rep = verify_solution(prob, s)
    assert rep.certified and max(rep.nonnegativity, rep.complementarity, rep.linear) == 0.0
    z = s.z.copy()
    z[np.argmin(z)] = -1e-3
    bad = SolutionPoint(s.x, z, s.w)
    assert np.isclose(verify_solution(prob, bad).nonnegativity, 1e-3)
    assert not verify_solution(prob, bad).certified
    shifted = SolutionPoint(s.x, s.z, s.w + np.array([0.0, 0.25]))
    assert np.isclose(verify_solution(prob, shifted).linear, 0.25)


def test_witnesses_are_consistent():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m, q = rng.normal(size=(3, 3)), rng.normal(size=3)
        prob = LcpProblem(m, q)
        for s in solve_enumeration(prob).isolated:
            for a in s.witnesses:
                p = np.linalg.solve(complementary_matrix(m, a, 1), q)
                assert np.all(p >= -prob.tol())
                assert np.allclose(orthant_matrix(a) @ p, s.x)


def test_merged_witnesses_on_a_face():
    # q on the ray e2 lies in two cones: x = (0, 3) is reached from alpha = {} and {1}
    res = solve(M, [0.0, 3.0])
    s = [s for s in res.isolated if np.allclose(s.x, [0, 3])][0]
    assert {str(a) for a in s.witnesses} == {"{}", "{1}"}


def test_determinism():
    rng = np.random.default_rng(4)
    m, q = rng.normal(size=(3, 3)), rng.normal(size=3)
    a, b = solve(m, q).to_dict(), solve(m, q).to_dict()
    assert a == b


def test_cap_is_enforced():
    with pytest.raises(DimensionError):
        solve_enumeration(LcpProblem(np.eye(3), np.ones(3)), cap=2)


def test_continuum_samples_certify():
    rng = np.random.default_rng(5)
    found = 0
    for _ in range(200):
        u = rng.normal(size=2)
        m = np.outer(u, rng.normal(size=2))  # rank one: degenerate cones
        q = -m @ np.abs(rng.normal(size=2))
        prob = LcpProblem(m, q)
        for c in solve_enumeration(prob).continua:
            if c.dim != 1 or not np.all(np.isfinite(c.param_box)):
                continue
            for x in c.sample(5):
                z, w = np.maximum(0, -x), np.maximum(0, x)
                assert np.max(np.abs(w - m @ z - q)) <= 1e-8 * max(1, np.abs(m).max(), np.abs(q).max())
            found += 1
    assert found > 0


def test_nullity_two_box():
    # C_M({1,2,3}) = ones: the solution set is the simplex z >= 0, sum z = 1
    res = solve(-np.ones((3, 3)), np.ones(3))
    cs = [c for c in res.continua if c.dim == 2]
    assert len(cs) == 1
    c = cs[0]
    assert isinstance(c, ContinuumSolution) and np.all(np.isfinite(c.param_box))
    mid = c.param_box.mean(axis=1)
    x = c.point(mid)
    assert np.isclose(-x.sum(), 1.0)


@pytest.mark.parametrize("c0, d, expected", [
    ([1.0, 2.0], [1.0, -1.0], (-1.0, 2.0)),
    ([-1.0], [0.0], None),
    ([1.0, -3.0], [-1.0, 1.0], (3.0, 1.0)),
])
def test_feasible_interval(c0, d, expected):
    out = feasible_interval(np.array(c0), np.array(d), 0.0)
    if expected is None or expected[0] > expected[1]:
        assert out is None
    else:
        assert np.allclose(out, expected)
