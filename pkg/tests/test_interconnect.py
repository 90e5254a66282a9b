import math

import numpy as np
import pytest

from lcpgeom.cones import count_solutions_by_region, signature
from lcpgeom.core import DimensionError
from lcpgeom.equivalence import REP_O
from lcpgeom.interconnect import (
    DEFAULT_S,
    InterconnectionSpec,
    PleatScenario,
    build_pleat_problem,
    interconnect,
    on_center_mu,
    rotation,
    scalar_ramp_solution,
    split_z,
    trace_pleat,
)
from lcpgeom.solver import solve


@pytest.mark.parametrize("lam, z", [(1.0, 0.0), (0.0, 1.0), (0.5, 0.0)])
def test_scalar_ramp(lam, z):
    assert scalar_ramp_solution(lam) == z


def test_block_layout():
    s = DEFAULT_S
    spec = InterconnectionSpec([[1]], 2 * REP_O, np.zeros((1, 2)), [[math.cos(s)], [math.sin(s)]])
    m = interconnect(spec).m
    assert np.allclose(m, [[1, 0, 0], [math.cos(s), 1, 2], [math.sin(s), 2, 1]])


def test_decoupled_is_product():
    spec = InterconnectionSpec([[1, 2], [2, 1]], [[-1]], theta_a=[-2, -2], theta_b=[1])
    res = solve(*[getattr(interconnect(spec).at(0), k) for k in ("m", "q")])
    # LCP(-1, 1) has the two solutions z = 0 and z = 1
    assert len(res.isolated) == 3 * 2


def test_dimension_errors():
    with pytest.raises(DimensionError):
        InterconnectionSpec([[1]], np.eye(2), h_a=np.zeros((2, 2)))
    with pytest.raises(DimensionError, match="theta_b"):
        InterconnectionSpec([[1]], np.eye(2), theta_b=[1, 2, 3])
    with pytest.raises(KeyError):
        InterconnectionSpec.from_dict({"m_a": [[1]]})


def test_spec_json(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text('{"m_a": [[1]], "m_b": [[1,2],[2,1]], "h_b": [[1],[0]], '
                 '"theta_a": {"const": [1], "slope": [-2]}, "theta_b": {"const": [-1, -1], "slope": [0, 1]}}')
    lcp = interconnect(InterconnectionSpec.load(p))
    assert np.allclose(lcp.q0, [1, -1, -1]) and np.allclose(lcp.q1, [-2, 0, 1])


def test_pleat_problem_matches_definition():
    sc = PleatScenario(mu=[0.3, -0.2])
    lcp, path = build_pleat_problem(sc)
    c, s = math.cos(sc.s), math.sin(sc.s)
    for lam in np.linspace(0, 1, 7):
        q = lcp.at(lam).q
        assert np.allclose(q, [1 - 2 * lam, 0.3 - lam * s, -0.2 + lam * c])
        assert np.allclose(path(lam), q)
        for sol in solve(lcp.m, q).isolated:
            za, zb = sol.z[:1], sol.z[1:]
            assert np.isclose(za[0], sc.z_a(lam))
            sub = solve(2 * REP_O, sc.q_b(lam))
            assert any(np.allclose(t.z, zb) for t in sub.isolated)


def test_on_center_mu_hits_apex():
    sc = PleatScenario(mu=on_center_mu())
    assert np.allclose(sc.q_b(0.5), 0)


def test_far_mu_single_branch():
    mu = np.array([20.0, 20.0])
    sc = PleatScenario(mu=mu)
    d = trace_pleat(sc)
    # the ramp kink still splits the 3x3 branch, but only as a face crossing of z_a
    assert {b.alpha.mask >> 1 for b in d.branches} == {0}
    assert [(e.lam, e.kind) for e in d.events] == [(0.5, "face-crossing")]
    for lam in np.linspace(0, 1, 11):
        assert count_solutions_by_region(2 * REP_O, sc.q_b(lam)) == 1


def test_signature_of_scaled_o():
    assert signature(2 * REP_O) == signature(REP_O)


def test_split_z():
    spec = InterconnectionSpec([[1]], np.eye(2))
    za, zb = split_z(spec, [1, 2, 3])
    assert za.tolist() == [1] and zb.tolist() == [2, 3]


def test_rotation():
    assert np.allclose(rotation(math.pi / 2) @ [1, 0], [0, 1])


def test_scenario_validation():
    with pytest.raises(ValueError):
        PleatScenario(lambda_range=(1, 0))
    with pytest.raises(ValueError):
        PleatScenario(samples=1)
