#!/usr/bin/env python3
"""
Position-auction mechanics and the auction-specific equilibrium estimators.

Allocation is by decreasing bid (ties by the auction's tie rule). Payments are
expected values per auction, i.e. already weighted by the slot's CTR:

  GSP   slot s pays ctr_s * (next-highest bid)
  VCG   slot s pays sum_{k>s} (ctr_{k-1} - ctr_k) * (bid in slot k),
        extended with the first excluded bid (0 if none)
  FIRST_PRICE   the single winner pays its own bid
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import ValidationError
from game.model import AuctionSpec, BidLog, Mechanism, ValueGrid

log = logging.getLogger(__name__)

_CANDIDATE_CHUNK = 256


@dataclass(frozen=True)
class RoundOutcome:
    allocation: Tuple[Optional[int], ...]   # slot index per player, None = no slot
    payments: Tuple[float, ...]
    ctr_awarded: Tuple[float, ...]


def _ctr_vector(spec: AuctionSpec, length: int) -> np.ndarray:
    """ctr by position, zero-padded to `length` positions."""
    out = np.zeros(length)
    m = min(spec.n_slots, length)
    out[:m] = spec.ctrs[:m]
    return out


def run_round(bids: Sequence[float], spec: AuctionSpec) -> RoundOutcome:
    """Allocate slots and charge payments for a single auction."""
    b = np.asarray(bids, dtype=float)
    n = b.size
    if n != spec.n_players:
        raise ValidationError(f"got {n} bids for {spec.n_players} players", field="bids")
    prio = spec.tie_rule.priority(n)
    order = sorted(range(n), key=lambda i: (-b[i], prio[i]))
    ctr = _ctr_vector(spec, max(n, spec.n_slots) + 1)
    allocation: list = [None] * n
    payments = [0.0] * n
    awarded = [0.0] * n
    for s, player in enumerate(order[: spec.n_slots]):
        allocation[player] = s
        awarded[player] = float(ctr[s])
        if spec.mechanism is Mechanism.FIRST_PRICE:
            payments[player] = float(b[player])
        elif spec.mechanism is Mechanism.GSP:
            below = b[order[s + 1]] if s + 1 < n else 0.0
            payments[player] = float(ctr[s] * below)
        else:
            total = 0.0
            for k in range(s + 1, spec.n_slots + 1):
                bid_k = b[order[k]] if k < n else 0.0
                total += (ctr[k - 1] - ctr[k]) * bid_k
            payments[player] = float(total)
    return RoundOutcome(tuple(allocation), tuple(payments), tuple(awarded))


# ---------------- vectorized replay ----------------

def position_table(opponent_bids: np.ndarray, spec: AuctionSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    For each round and each position s a bidder could take among the given
    opponents, return (ctr[s], payment[t, s]). First-price payments depend on
    the bidder's own bid and are returned as zeros here.
    """
    opp = np.atleast_2d(np.asarray(opponent_bids, dtype=float))
    T, k = opp.shape
    positions = k + 1
    width = max(spec.n_slots, positions) + 1
    srt = np.zeros((T, width))
    srt[:, :k] = -np.sort(-opp, axis=1)
    ctr = _ctr_vector(spec, width + 1)

    if spec.mechanism is Mechanism.GSP:
        pay = ctr[:positions] * srt[:, :positions]
    elif spec.mechanism is Mechanism.VCG:
        # contribution of the bidder pushed from position j to j+1
        contrib = (ctr[:width] - ctr[1:width + 1]) * srt
        tail = np.cumsum(contrib[:, ::-1], axis=1)[:, ::-1]
        pay = tail[:, :positions]
    else:
        pay = np.zeros((T, positions))
    return ctr[:positions], pay


def _positions(own: np.ndarray, opp: np.ndarray, wins_tie: np.ndarray) -> np.ndarray:
    """Number of opponents ranked above the bidder, per round and own bid."""
    above = np.zeros(own.shape, dtype=np.int64)
    for j in range(opp.shape[1]):
        o = opp[:, j:j + 1]
        if wins_tie[j]:
            above += o >= own
        else:
            above += o > own
    return above


def tie_flags(spec: AuctionSpec, n: int, i: int) -> np.ndarray:
    """Per opponent of player i (in index order): does it win a tie against i?"""
    others = [j for j in range(n) if j != i]
    if spec.mechanism is Mechanism.FIRST_PRICE:
        # the bidder under study wins every tie at the top bid
        return np.zeros(len(others), dtype=bool)
    prio = spec.tie_rule.priority(n)
    return np.array([prio[j] < prio[i] for j in others], dtype=bool)


def replay_against(opp: np.ndarray, wins_tie: np.ndarray, spec: AuctionSpec,
                   own_bids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(ctr, payment) of each own bid (T x C) against the opponents' bids (T x k)."""
    ctr_pos, pay_pos = position_table(opp, spec)
    pos = _positions(own_bids, opp, wins_tie)
    ctr = ctr_pos[pos]
    if spec.mechanism is Mechanism.FIRST_PRICE:
        pay = ctr * own_bids
    else:
        rows = np.arange(own_bids.shape[0])[:, None]
        pay = pay_pos[rows, pos]
    return ctr, pay


def _opponent_tie_flags(log_: BidLog, spec: AuctionSpec, player: str) -> Tuple[np.ndarray, np.ndarray]:
    i = log_.index_of(player)
    others = [j for j in range(log_.n_players) if j != i]
    return log_.bids[:, others], tie_flags(spec, log_.n_players, i)


def replay(log_: BidLog, spec: AuctionSpec, player: str, own_bids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Replay every round with `player`'s bid replaced by each column of
    `own_bids` (shape T x C). Returns (ctr, payment), both T x C.
    First-price ties at the top bid go to `player`; position auctions use
    the auction's tie rule.
    """
    if log_.n_players != spec.n_players:
        raise ValidationError(f"log has {log_.n_players} players, spec {spec.n_players}", field="n_players")
    opp, wins_tie = _opponent_tie_flags(log_, spec, player)
    return replay_against(opp, wins_tie, spec, own_bids)


def fixed_bid_totals(log_: BidLog, spec: AuctionSpec, player: str,
                     candidates: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Q(b) and TE(b): total CTR and total expenditure of always bidding b."""
    cand = np.asarray(candidates, dtype=float)
    T = log_.rounds
    Q = np.empty(cand.size)
    TE = np.empty(cand.size)
    for start in range(0, cand.size, _CANDIDATE_CHUNK):
        block = cand[start:start + _CANDIDATE_CHUNK]
        ctr, pay = replay(log_, spec, player, np.broadcast_to(block, (T, block.size)))
        Q[start:start + block.size] = ctr.sum(axis=0)
        TE[start:start + block.size] = pay.sum(axis=0)
    return Q, TE


def realized_totals(log_: BidLog, spec: AuctionSpec, player: str) -> Tuple[float, float]:
    """Total CTR and expenditure of the player's observed bids."""
    own = log_.column(player)[:, None]
    ctr, pay = replay(log_, spec, player, own)
    return float(ctr.sum()), float(pay.sum())


def default_bid_candidates(log_: BidLog, player: str, grid: ValueGrid) -> np.ndarray:
    """Grid, zero, own bids, and every opponent bid with and without one tick."""
    tick = grid.step or 1.0
    opp = np.unique(log_.opponents(player))
    parts = [grid.points, [0.0], np.unique(log_.column(player)), opp, opp + tick]
    return np.unique(np.concatenate([np.asarray(p, dtype=float) for p in parts]))


# ---------------- equilibrium-based estimators ----------------

def eq_vcg_average_bid(log_: BidLog, player: str) -> float:
    """Truthful-equilibrium estimate for VCG: the player's mean bid."""
    return float(np.mean(log_.column(player)))


def eq2_best_response(log_: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                      candidates: Optional[Sequence[float]] = None) -> float:
    """
    Best response to the empirical bid distribution: the mean bid is taken
    as the player's single best response, and the value whose best response
    lies closest to it is returned.
    """
    if spec.mechanism is not Mechanism.GSP:
        raise ValidationError("best-response estimator expects a GSP spec", field="mechanism")
    cand = default_bid_candidates(log_, player, grid) if candidates is None else np.unique(candidates)
    Q, TE = fixed_bid_totals(log_, spec, player, cand)
    mean_bid = eq_vcg_average_bid(log_, player)
    utility = np.outer(grid.points, Q) - TE[None, :]
    best = cand[np.argmax(utility, axis=1)]
    gap = np.abs(best - mean_bid)
    return float(grid.points[int(np.argmin(gap))])
