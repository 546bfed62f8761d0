import numpy as np
import pytest

from errors import ValidationError
from estimation.gsp_equilibrium import constraint_matrix, deduce_values, eq1_vcg_like, project_bids, vcg_like_bids
from game.model import AuctionSpec, BidLog

CTRS = (0.38, 0.29, 0.20, 0.11, 0.02)
VALUES = (45.0, 39.0, 33.0, 27.0, 21.0)
SPEC = AuctionSpec("GSP", CTRS, 5)


def test_forward_recursion():
    b = vcg_like_bids(VALUES, CTRS)
    assert b[0] == 45.0
    assert b[4] == pytest.approx(0.09 * 21 / 0.11)
    assert b[3] == pytest.approx(21.6)
    assert np.all(np.diff(b) < 0)


def test_deduction_inverts_the_recursion():
    b = vcg_like_bids(VALUES, CTRS)
    assert deduce_values(b, SPEC) == pytest.approx(VALUES)
    assert np.min(constraint_matrix(SPEC, 5) @ b) >= -1e-9


def test_top_value_is_at_least_the_second():
    b = vcg_like_bids((30.0, 30.0, 10.0), (0.5, 0.3))
    v = deduce_values(np.array([20.0, b[1], b[2]]), AuctionSpec("GSP", (0.5, 0.3), 3))
    assert v[0] == pytest.approx(30.0)


def test_values_must_be_descending():
    with pytest.raises(ValidationError):
        vcg_like_bids((1.0, 2.0), (0.5, 0.3))


def test_recovers_values_from_equilibrium_log():
    b = vcg_like_bids(VALUES, CTRS)
    # columns in a different order from the ranking
    order = [3, 0, 4, 1, 2]
    log_ = BidLog([b[order]] * 30, tuple(f"p{k}" for k in order))
    res = eq1_vcg_like(log_, SPEC)
    assert res.consistent == 30 and res.perturbed == 0 and res.skipped == 0
    assert res.consistent_share == 1.0
    for k, v in enumerate(VALUES):
        assert res.estimates[f"p{k}"] == pytest.approx(v, abs=1e-9)


def test_inconsistent_round_is_projected():
    b = vcg_like_bids(VALUES, CTRS)
    b[4] = 20.0                 # deduced value of the last bidder now exceeds the fourth
    log_ = BidLog([b], tuple(f"p{k}" for k in range(5)))
    res = eq1_vcg_like(log_, SPEC)
    assert res.perturbed == 1 and res.consistent == 0
    deduced = [res.per_round[f"p{k}"][0] for k in range(5)]
    assert all(a >= c - 1e-5 for a, c in zip(deduced, deduced[1:]))


@pytest.mark.parametrize("eps", [1e-3, 1e-2, 1e-1])
def test_projection_moves_a_slightly_broken_round_by_at_most_eps(eps):
    # tied values leave the last two deduced values exactly equal
    b = vcg_like_bids((45.0, 39.0, 33.0, 27.0, 27.0), CTRS)
    broken = b.copy()
    broken[4] += eps
    A = constraint_matrix(SPEC, 5)
    assert np.min(A @ broken) < 0
    z = project_bids(broken, A)
    assert z is not None
    assert np.min(A @ z) >= -1e-6
    assert 0 < np.linalg.norm(z - broken) <= eps + 1e-6


def test_estimates_are_clipped():
    b = vcg_like_bids(VALUES, CTRS)
    log_ = BidLog([b], tuple(f"p{k}" for k in range(5)))
    res = eq1_vcg_like(log_, SPEC, value_range=(25.0, 40.0))
    assert res.estimates["p0"] == 40.0
    assert res.estimates["p4"] == 25.0
    assert res.estimates["p2"] == pytest.approx(33.0)


def test_single_bidder_value_is_its_bid():
    res = eq1_vcg_like(BidLog([[7.0], [9.0]], ("solo",)), AuctionSpec("GSP", (1.0,), 1))
    assert res.estimates["solo"] == pytest.approx(8.0)


def test_needs_gsp():
    log_ = BidLog([[1.0, 2.0]], ("a", "b"))
    with pytest.raises(ValidationError):
        eq1_vcg_like(log_, AuctionSpec("VCG", (0.5,), 2))
    with pytest.raises(ValidationError):
        eq1_vcg_like(log_, AuctionSpec("GSP", (0.5,), 3))
