import numpy as np
import pytest

from lcpgeom.equivalence import (
    COMPLEMENT_GAMMA,
    EXAMPLE_GAMMA,
    REP_K,
    REP_L,
    REP_M,
    REP_N,
    REP_O,
    Equivalence,
    Stability,
    classify_planar,
    equivalent,
    equivalent_sufficient,
    identity_witness,
    normal_forms,
    sector_witness,
    stability_2x2,
    verify_witness,
)


@pytest.mark.parametrize(
    "m, status",
    [
        ([[1, 2], [2, 1]], Stability.STABLE),
        ([[1, 1], [1, 1]], Stability.UNSTABLE),
        ([[1, 0], [1, 1]], Stability.BOUNDARY),
    ],
)
def test_stability(m, status):
    assert stability_2x2(m).status is status


@pytest.mark.parametrize(
    "m, label",
    [(REP_K, "P"), (REP_L, "L-class"), (REP_M, "M-class"), (REP_N, "N-class"), (2 * REP_O, "N-class")],
)
def test_classify_representatives(m, label):
    assert classify_planar(m) == label


def test_unstable_matrix_gets_other_label():
    assert classify_planar([[1, 1], [1, 1]]).startswith("other(")


def test_sign_test_is_sufficient_only():
    assert equivalent_sufficient(REP_K, 2 * REP_K)
    assert not equivalent_sufficient(REP_N, REP_O)  # different signs, yet equivalent
    res = equivalent(REP_K, 2 * REP_K)
    assert res.status is Equivalence.EQUIVALENT and res.method == "sign-test"


def test_unknown_on_boundary_match():
    res = equivalent([[1, 0], [1, 1]], [[1, 0], [1, 1]])
    assert res.status is Equivalence.UNKNOWN


def test_verdict_json():
    d = equivalent(REP_N, REP_O).to_dict()
    assert d["status"] == "equivalent" and d["method"] == "signature"
    assert set(d["signature_a"]) == {"sectors", "degenerate_rays"}


def test_normal_form_counts():
    forms = normal_forms()
    assert [sum(f.label == k for f in forms) for k in "MNO"] == [16, 16, 20]
    assert all(stability_2x2(f.matrix).status is Stability.BOUNDARY for f in forms if f.label == "O"
               and f.delta[2] * f.delta[3] == 0 and f.delta[2] + f.delta[3] != 0)


@pytest.mark.parametrize("gamma, continuous", [(EXAMPLE_GAMMA, False), (COMPLEMENT_GAMMA, True)])
def test_witness_maps(gamma, continuous):
    rep = verify_witness(REP_N, REP_O, sector_witness(REP_N, REP_O, gamma), samples=400)
    assert rep.residual <= 1e-9
    assert rep.cones_mapped and rep.bijective
    assert (rep.continuity_gap <= 1e-9) is continuous


def test_wrong_witness_is_rejected():
    rep = verify_witness(REP_N, REP_O, identity_witness(), samples=400)
    assert rep.residual > 1e-3


def test_identity_witness_on_same_matrix():
    rep = verify_witness(REP_M, REP_M, identity_witness(), samples=400)
    assert rep.residual <= 1e-12
    assert all(a == b for a, b in rep.beta.items())
