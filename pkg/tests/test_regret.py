import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import EstimatorError, TaskError, ValidationError
from estimation.auctions import run_round
from estimation.regret import (RegretCurve, regret_2x2_row, regret_curve_2x2,
                               regret_curve_auction, regret_curve_first_price,
                               regret_curve_position_auction, row_utilities, settle_regrets, sum_curves)
from game.model import AuctionSpec, BidLog, Freq2x2, GameSpec2x2, Mechanism, Slot, make_uniform_grid
from tests.fixtures import GAME1, GAME1_FREQ, GAME1_ROW_HIDDEN

CTRS = (0.38, 0.29, 0.20, 0.11, 0.02)


# ---------- 2x2 ----------

def test_worked_example_utilities():
    up, down, emp = row_utilities((13.0, 0.0, 9.0, 10.0), GAME1_FREQ)
    assert up == pytest.approx(8.84, abs=1e-9)
    assert down == pytest.approx(9.32, abs=1e-9)
    assert emp == pytest.approx(9.20, abs=1e-9)
    assert regret_2x2_row((None, 0, 9, 10), GAME1_FREQ, 13) == pytest.approx(0.12, abs=1e-9)


def test_worked_example_at_five():
    assert regret_2x2_row((None, 0, 9, 10), GAME1_FREQ, 5) == pytest.approx(0.68, abs=1e-9)


def test_pure_play_already_best():
    assert regret_2x2_row((7, 1, 3, 2), Freq2x2(1, 0, 0, 0)) == 0.0


def test_row_curve_minimum_at_13():
    grid = make_uniform_grid(0, 22, 1)
    curve = regret_curve_2x2(GAME1_ROW_HIDDEN, Slot.ROW_UL, GAME1_FREQ, grid)
    k = int(np.argmin(curve.regrets))
    assert grid.points[k] == 13
    assert curve.regrets[k] == pytest.approx(0.12, abs=1e-9)
    assert curve.player_id == "row_ul"


def test_row_curve_fine_minimum_at_inversion_point():
    grid = make_uniform_grid(0, 22, 1e-3)
    curve = regret_curve_2x2(GAME1_ROW_HIDDEN, Slot.ROW_UL, GAME1_FREQ, grid)
    best = grid.points[int(np.argmin(curve.regrets))]
    assert abs(best - (10 / 0.68 - 1)) <= 1e-3


def test_zero_game_uniform_play():
    spec = GameSpec2x2((None, 0, 0, 0), (0, 0, 0, 0))
    grid = make_uniform_grid(0, 10, 1)
    curve = regret_curve_2x2(spec, Slot.ROW_UL, Freq2x2(0.25, 0.25, 0.25, 0.25), grid)
    assert np.allclose(curve.regrets, grid.points / 4)


def test_owner_with_two_hidden_slots():
    spec = GAME1.hide(Slot.ROW_UL, Slot.ROW_DR)
    with pytest.raises(TaskError):
        regret_curve_2x2(spec, Slot.ROW_UL, GAME1_FREQ, make_uniform_grid(0, 22, 1))


def test_other_player_hidden_slot_is_fine():
    spec = GAME1.hide(Slot.ROW_UL, Slot.COL_UL)
    curve = regret_curve_2x2(spec, Slot.COL_UL, GAME1_FREQ, make_uniform_grid(0, 22, 1))
    assert len(curve) == 23


def test_column_curve_equals_transposed_row_curve():
    grid = make_uniform_grid(0, 22, 1)
    for slot in (Slot.COL_UL, Slot.COL_UR, Slot.COL_DL, Slot.COL_DR):
        direct = regret_curve_2x2(GAME1.hide(slot), slot, GAME1_FREQ, grid)
        mirrored = regret_curve_2x2(GAME1.transpose().hide(slot.mirror()), slot.mirror(),
                                    GAME1_FREQ.transpose(), grid)
        assert np.allclose(direct.regrets, mirrored.regrets, atol=1e-12)


freqs = st.lists(st.floats(0.01, 1), min_size=4, max_size=4).map(
    lambda xs: Freq2x2(*(np.array(xs) / np.sum(xs))))
payoffs = st.lists(st.floats(-20, 20), min_size=4, max_size=4)


@given(freq=freqs, pay=payoffs, cell=st.integers(0, 3))
@settings(max_examples=150, deadline=None)
def test_2x2_curve_is_convex(freq, pay, cell):
    pay[cell] = None
    spec = GameSpec2x2(tuple(pay), (0, 0, 0, 0))
    grid = make_uniform_grid(-30, 30, 0.5)
    curve = regret_curve_2x2(spec, Slot.of("row", cell), freq, grid)
    assert np.all(np.diff(curve.regrets, 2) >= -1e-9)


@given(freq=freqs, pay=payoffs, cell=st.integers(0, 3), c=st.floats(0.1, 10))
@settings(max_examples=100, deadline=None)
def test_2x2_scaling_covariance(freq, pay, cell, c):
    pay[cell] = None
    spec = GameSpec2x2(tuple(pay), (0, 0, 0, 0))
    scaled = GameSpec2x2(tuple(None if v is None else c * v for v in pay), (0, 0, 0, 0))
    grid = make_uniform_grid(-30, 30, 1)
    base = regret_curve_2x2(spec, Slot.of("row", cell), freq, grid)
    big = regret_curve_2x2(scaled, Slot.of("row", cell), freq, make_uniform_grid(-30 * c, 30 * c, c))
    n = min(len(base), len(big))
    assert np.allclose(big.regrets[:n], c * base.regrets[:n], atol=1e-7 * c)


# ---------- auctions ----------

def test_first_price_tie_goes_to_player():
    spec = AuctionSpec(Mechanism.FIRST_PRICE, (1.0,), 2)
    log_ = BidLog([[5, 3]], ("1", "2"))
    grid = make_uniform_grid(10, 11, 1)
    curve = regret_curve_first_price(log_, spec, "1", grid, bid_candidates=range(0, 11))
    assert curve.regrets[0] == pytest.approx(2.0)


def test_first_price_zero_value_never_winning():
    spec = AuctionSpec(Mechanism.FIRST_PRICE, (1.0,), 2)
    log_ = BidLog([[1, 5], [2, 6]], ("1", "2"))
    grid = make_uniform_grid(0, 1, 1)
    curve = regret_curve_first_price(log_, spec, "1", grid)
    assert curve.regrets[0] == 0.0


def test_first_price_constant_best_bid():
    spec = AuctionSpec(Mechanism.FIRST_PRICE, (1.0,), 2)
    log_ = BidLog([[4, 3], [4, 2], [4, 4]], ("1", "2"))
    grid = make_uniform_grid(10, 12, 1)
    curve = regret_curve_first_price(log_, spec, "1", grid, bid_candidates=range(0, 13))
    assert np.allclose(curve.regrets, 0.0)


def test_gsp_single_slot_is_second_price():
    spec = AuctionSpec(Mechanism.GSP, (1.0,), 2)
    log_ = BidLog([[5, 3]], ("1", "2"))
    curve = regret_curve_position_auction(log_, spec, "1", make_uniform_grid(10, 11, 1))
    assert curve.regrets[0] == pytest.approx(0.0, abs=1e-12)


def test_vcg_truthful_has_zero_regret_at_value():
    values = (21.0, 27.0, 33.0, 39.0, 45.0)
    spec = AuctionSpec(Mechanism.VCG, CTRS, 5)
    log_ = BidLog(np.tile(values, (20, 1)), tuple("12345"))
    grid = make_uniform_grid(1, 60, 1)
    for pid, v in zip("12345", values):
        curve = regret_curve_position_auction(log_, spec, pid, grid)
        assert curve.regrets[int(v) - 1] == pytest.approx(0.0, abs=1e-9)


def test_wrong_mechanism_rejected():
    log_ = BidLog([[5, 3]], ("1", "2"))
    with pytest.raises(ValidationError):
        regret_curve_first_price(log_, AuctionSpec("GSP", (1.0,), 2), "1", make_uniform_grid(0, 5, 1))
    with pytest.raises(ValidationError):
        regret_curve_position_auction(log_, AuctionSpec("FIRST_PRICE", (1.0,), 2), "1",
                                      make_uniform_grid(0, 5, 1))


def test_missing_player():
    log_ = BidLog([[5, 3]], ("1", "2"))
    with pytest.raises(ValidationError):
        regret_curve_auction(log_, AuctionSpec("GSP", (1.0,), 2), "9", make_uniform_grid(0, 5, 1))


def _oracle(log_, spec, player, thetas, candidates):
    """Exhaustive search over (candidate bid x round) with run_round."""
    i = log_.index_of(player)
    T = log_.rounds
    out = []
    for theta in thetas:
        realized = 0.0
        for t in range(T):
            res = run_round(log_.bids[t], spec)
            realized += res.ctr_awarded[i] * theta - res.payments[i]
        best = -np.inf
        for b in candidates:
            total = 0.0
            for t in range(T):
                bids = np.array(log_.bids[t])
                bids[i] = b
                res = run_round(bids, spec)
                total += res.ctr_awarded[i] * theta - res.payments[i]
            best = max(best, total)
        out.append((best - realized) / T)
    return np.array(out)


SPECS = {
    2: [AuctionSpec("GSP", (0.6, 0.2), 2), AuctionSpec("VCG", (0.6, 0.2), 2),
        AuctionSpec("FIRST_PRICE", (1.0,), 2), AuctionSpec("GSP", (1.0,), 2)],
    3: [AuctionSpec("GSP", (0.5, 0.3), 3), AuctionSpec("VCG", (0.5, 0.3), 3),
        AuctionSpec("FIRST_PRICE", (1.0,), 3), AuctionSpec("VCG", (0.5, 0.3, 0.1), 3)],
}


@st.composite
def auction_instances(draw):
    n = draw(st.integers(2, 3))
    spec = draw(st.sampled_from(SPECS[n]))
    T = draw(st.integers(1, 10))
    bids = draw(st.lists(st.lists(st.integers(0, 30), min_size=n, max_size=n), min_size=T, max_size=T))
    return spec, BidLog(np.array(bids, dtype=float), tuple(str(k) for k in range(1, n + 1)))


@given(inst=auction_instances())
@settings(max_examples=100, deadline=None)
def test_auction_regret_matches_exhaustive_oracle(inst):
    spec, log_ = inst
    candidates = np.arange(0, 61, dtype=float)
    grid = make_uniform_grid(0, 40, 5)
    curve = regret_curve_auction(log_, spec, "1", grid, bid_candidates=candidates)
    expected = _oracle(log_, spec, "1", grid.points, candidates)
    assert np.allclose(curve.regrets, expected, rtol=0, atol=1e-9)


@given(inst=auction_instances(), seed=st.integers(0, 2 ** 16))
@settings(max_examples=60, deadline=None)
def test_auction_regret_ignores_round_order(inst, seed):
    spec, log_ = inst
    order = np.random.default_rng(seed).permutation(log_.rounds)
    grid = make_uniform_grid(0, 40, 5)
    a = regret_curve_auction(log_, spec, "2", grid)
    b = regret_curve_auction(log_.permuted(order), spec, "2", grid)
    assert np.allclose(a.regrets, b.regrets, atol=1e-9)


@given(inst=auction_instances())
@settings(max_examples=60, deadline=None)
def test_first_price_curve_is_convex(inst):
    _, log_ = inst
    spec = AuctionSpec("FIRST_PRICE", (1.0,), log_.n_players)
    grid = make_uniform_grid(0, 40, 1)
    curve = regret_curve_first_price(log_, spec, "1", grid, bid_candidates=np.arange(0, 61))
    assert np.all(np.diff(curve.regrets, 2) >= -1e-9)


# ---------- curve helpers ----------

def test_settle_regrets_snaps_noise_only():
    out = settle_regrets(np.array([0.5, -1e-12, 3e-12, -0.2]))
    assert list(out) == [0.5, 0.0, 0.0, -0.2]
    assert settle_regrets(np.array([4e-8]), scale=60.0)[0] == 0.0
    assert settle_regrets(np.array([4e-8]), scale=1.0)[0] == 4e-8
    with pytest.raises(EstimatorError):
        settle_regrets(np.array([-0.2]), strict=True)


def test_correlated_play_has_negative_regret():
    # Up exactly when the column plays Left: realized play beats both fixed rows
    freq = Freq2x2(0.5, 0.0, 0.0, 0.5)
    assert regret_2x2_row((1, 0, 0, 1), freq) == pytest.approx(-0.5)
    spec = GameSpec2x2((None, 0, 0, 1), (0, 0, 0, 0))
    grid = make_uniform_grid(0, 2, 1)
    curve = regret_curve_2x2(spec, Slot.ROW_UL, freq, grid)
    assert curve.regrets.tolist() == pytest.approx([0.0, -0.5, -0.5])
    with pytest.raises(EstimatorError):
        regret_curve_2x2(spec, Slot.ROW_UL, freq, grid, strict=True)


def test_worked_example_column_regret_goes_below_zero():
    spec = GAME1.hide(Slot.COL_UL)
    curve = regret_curve_2x2(spec, Slot.COL_UL, GAME1_FREQ, make_uniform_grid(0, 22, 1))
    assert curve.regrets.min() < -0.01


def test_truthful_vcg_regret_is_exactly_zero_at_value():
    values = (21.0, 27.0, 33.0, 39.0, 45.0)
    spec = AuctionSpec(Mechanism.VCG, CTRS, 5)
    log_ = BidLog(np.tile(values, (1500, 1)), tuple("12345"))
    grid = make_uniform_grid(1, 60, 1)
    for pid, v in zip("12345", values):
        curve = regret_curve_position_auction(log_, spec, pid, grid)
        assert curve.regrets[int(v) - 1] == 0.0
        assert np.all(curve.regrets >= 0.0)


def test_curve_length_checked():
    with pytest.raises(ValidationError):
        RegretCurve(make_uniform_grid(0, 2, 1), np.zeros(2))


def test_sum_curves():
    grid = make_uniform_grid(0, 2, 1)
    a = RegretCurve(grid, [1, 0, 2], "a", [1, 1, 1])
    b = RegretCurve(grid, [0, 1, 1], "b", [2, 2, 2])
    s = sum_curves([a, b])
    assert list(s.regrets) == [1, 1, 3]
    assert list(s.best_fixed) == [3, 3, 3]
    assert s.player_id == "a+b"
    with pytest.raises(ValidationError):
        sum_curves([a, RegretCurve(make_uniform_grid(1, 3, 1), [0, 0, 0])])
