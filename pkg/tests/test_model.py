import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import ValidationError
from game.model import (AuctionSpec, BidLog, Freq2x2, GameSpec2x2, Mechanism, PlayerFreq, Role,
                        Session2x2, Slot, TieRule, ValueGrid, make_uniform_grid, validate_freq)
from tests.fixtures import GAME1, GAME1_FREQ


def test_integer_grid_0_22():
    grid = make_uniform_grid(0, 22, 1)
    assert len(grid) == 23
    assert grid.points[0] == 0 and grid.points[-1] == 22
    assert np.allclose(grid.prior, 1 / 23)
    assert grid.step == pytest.approx(1.0)


def test_two_point_grid():
    grid = make_uniform_grid(0, 100, 100)
    assert list(grid.points) == [0, 100]
    assert list(grid.prior) == [0.5, 0.5]


def test_auction_grid():
    grid = make_uniform_grid(1, 60, 1)
    assert len(grid) == 60
    assert grid.lower == 1 and grid.upper == 60


def test_grid_keeps_endpoint_within_tolerance():
    grid = make_uniform_grid(0, 0.3, 0.1)
    assert len(grid) == 4
    assert grid.upper == pytest.approx(0.3)


@pytest.mark.parametrize("lower,upper,step", [
    (0, 22, 0),
    (0, 22, -1),
    (0, 22, float("nan")),
    (5, 5, 1),
    (0, float("inf"), 1),
])
def test_bad_grids(lower, upper, step):
    with pytest.raises(ValidationError):
        make_uniform_grid(lower, upper, step)


@given(
    lower=st.floats(-100, 100),
    width=st.floats(0.5, 200),
    step=st.floats(0.01, 5),
)
@settings(max_examples=200, deadline=None)
def test_grid_size_and_gaps(lower, width, step):
    upper = lower + width
    grid = make_uniform_grid(lower, upper, step)
    n = len(grid)
    assert math.floor(width / step) + 1 <= n <= math.ceil(width / step) + 1
    if n > 1:
        assert np.allclose(np.diff(grid.points), step, rtol=0, atol=1e-12 * max(1.0, abs(upper)) + 1e-12)


def test_from_weights_normalizes():
    grid = ValueGrid.from_weights([0, 100], [3, 1])
    assert list(grid.prior) == [0.75, 0.25]


def test_grid_rejects_unsorted_points():
    with pytest.raises(ValidationError):
        ValueGrid.uniform([2.0, 1.0])


def test_validate_freq_examples():
    assert validate_freq(GAME1_FREQ) is GAME1_FREQ
    validate_freq(Freq2x2(1, 0, 0, 0))
    with pytest.raises(ValidationError) as err:
        validate_freq(Freq2x2(0.5, 0.5, 0.5, -0.5))
    assert "f_DR" in str(err.value)


def test_validate_freq_sum():
    with pytest.raises(ValidationError):
        validate_freq(Freq2x2(0.5, 0.5, 0.5, 0.0))


def test_freq_marginals_and_transpose():
    f = GAME1_FREQ
    assert f.left == pytest.approx(0.68)
    assert f.up == pytest.approx(0.11)
    t = f.transpose()
    assert t.as_tuple() == (0.07, 0.61, 0.04, 0.28)
    assert t.left == pytest.approx(f.up)


def test_slot_mirror_is_involution():
    for slot in Slot:
        assert slot.mirror().mirror() is slot
        assert slot.mirror().role is not slot.role


def test_game_transpose_moves_values_to_mirrored_slots():
    t = GAME1.transpose()
    for slot in Slot:
        assert t.value(slot.mirror()) == GAME1.value(slot)


def test_hide_and_hidden_slots():
    g = GAME1.hide(Slot.ROW_UL, Slot.COL_DR)
    assert g.hidden_slots() == [Slot.ROW_UL, Slot.COL_DR]
    assert not g.is_complete()
    assert GAME1.is_complete()


def test_constant_sum_checked():
    with pytest.raises(ValidationError):
        GameSpec2x2((10, 0, 9, 10), (8, 18, 9, 7), constant_sum=18)


def test_auction_spec_validation():
    AuctionSpec("GSP", (0.38, 0.29, 0.20, 0.11, 0.02), 5)
    with pytest.raises(ValidationError):
        AuctionSpec("GSP", (0.2, 0.3), 3)
    with pytest.raises(ValidationError):
        AuctionSpec("GSP", (0.5, 0.0), 3)
    with pytest.raises(ValidationError):
        AuctionSpec(Mechanism.FIRST_PRICE, (0.5,), 2)
    # more slots than players is allowed
    assert AuctionSpec("VCG", (0.5, 0.3, 0.1), 2).n_slots == 3


def test_tie_rule_priority():
    assert list(TieRule.LOWER_INDEX.priority(3)) == [0, 1, 2]
    assert list(TieRule.HIGHER_INDEX.priority(3)) == [0, -1, -2]


def test_bidlog_validation_and_halves():
    log_ = BidLog([[1, 2], [3, 4], [5, 6], [7, 8]], ("a", "b"))
    assert log_.rounds == 4 and log_.n_players == 2
    assert list(log_.column("b")) == [2, 4, 6, 8]
    assert log_.second_half().bids.tolist() == [[5, 6], [7, 8]]
    assert log_.permuted([3, 2, 1, 0]).bids[0].tolist() == [7, 8]
    with pytest.raises(ValidationError):
        BidLog([[1, -2]], ("a", "b"))
    with pytest.raises(ValidationError):
        BidLog([[1, 2]], ("a", "a"))
    with pytest.raises(ValidationError):
        log_.index_of("zz")


def test_session_needs_four_per_role():
    records = [PlayerFreq("r1", Role.ROW, GAME1_FREQ)] * 4 + [PlayerFreq("c1", Role.COL, GAME1_FREQ)] * 3
    with pytest.raises(ValidationError):
        Session2x2("game1", "s1", tuple(records))
