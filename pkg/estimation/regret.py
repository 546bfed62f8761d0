#!/usr/bin/env python3
"""
Regret as a function of a hypothesized hidden value.

Regret at a candidate value is the per-round gap between the best fixed
action in hindsight and the realized play, both scored with the candidate
plugged into the player's utility. Every curve also keeps the best fixed
utility itself so relative regret can be formed downstream.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

import config
from errors import EstimatorError, TaskError, ValidationError
from estimation.auctions import default_bid_candidates, fixed_bid_totals, realized_totals
from game.model import AuctionSpec, BidLog, Freq2x2, GameSpec2x2, Mechanism, Role, Slot, ValueGrid

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RegretCurve:
    grid: ValueGrid
    regrets: np.ndarray
    player_id: str = ""
    best_fixed: Optional[np.ndarray] = None

    def __post_init__(self):
        reg = np.array(self.regrets, dtype=float)
        if reg.shape != self.grid.points.shape:
            raise ValidationError(f"{reg.size} regrets for {len(self.grid)} grid points", field="regrets")
        if not np.all(np.isfinite(reg)):
            raise ValidationError("regret must be finite", field="regrets")
        reg.setflags(write=False)
        object.__setattr__(self, "regrets", reg)
        if self.best_fixed is not None:
            best = np.array(self.best_fixed, dtype=float)
            if best.shape != reg.shape:
                raise ValidationError("length differs from regrets", field="best_fixed")
            best.setflags(write=False)
            object.__setattr__(self, "best_fixed", best)

    def __len__(self) -> int:
        return int(self.regrets.size)

    def scaled(self, factor: float) -> "RegretCurve":
        best = None if self.best_fixed is None else self.best_fixed * factor
        return RegretCurve(self.grid, self.regrets * factor, self.player_id, best)


def settle_regrets(regrets: np.ndarray, scale=1.0, strict: bool = False, context: str = "") -> np.ndarray:
    """
    Snap float noise to exactly 0 and keep real negative regret.

    Noise is anything within REGRET_CLAMP_TOL * max(1, |scale|) of zero, where
    `scale` is the size of the utilities the regret was formed from. Play that
    beats every fixed action (a correlated 2x2 table, a bidder who adapts)
    has negative regret; strict mode refuses it.
    """
    reg = np.asarray(regrets, dtype=float)
    tol = config.REGRET_CLAMP_TOL * np.maximum(1.0, np.abs(scale))
    reg = np.where(np.abs(reg) <= tol, 0.0, reg)
    worst = float(np.min(reg)) if reg.size else 0.0
    if worst < 0:
        msg = f"negative regret {worst:.3g} {context}".rstrip()
        if strict:
            raise EstimatorError(msg)
        log.debug("%s; kept", msg)
    return reg


# ---------------- 2x2 games ----------------

def row_utilities(payoffs: Sequence, freq: Freq2x2) -> Tuple:
    """
    (util_Up, util_Down, util_Emp) of the row player: each fixed row scored
    against the column player's empirical marginal, and the realized mean.
    Payoff entries may be numpy arrays (one entry per candidate).
    """
    a_ul, a_ur, a_dl, a_dr = payoffs
    p_left, p_right = freq.left, freq.right
    up = p_left * a_ul + p_right * a_ur
    down = p_left * a_dl + p_right * a_dr
    emp = freq.ul * a_ul + freq.ur * a_ur + freq.dl * a_dl + freq.dr * a_dr
    return up, down, emp


def _substitute(payoffs: Sequence[Optional[float]], cell: int, values) -> list:
    out = list(payoffs)
    out[cell] = values
    return out


def regret_2x2_row(row_payoffs: Sequence[Optional[float]], freq: Freq2x2,
                   candidate: Optional[float] = None) -> float:
    """Row-player regret with `candidate` substituted for the hidden payoff."""
    hidden = [i for i, v in enumerate(row_payoffs) if v is None]
    if len(hidden) > 1:
        raise TaskError("more than one hidden row payoff")
    payoffs = list(row_payoffs)
    if hidden:
        if candidate is None:
            raise ValidationError("hidden payoff needs a candidate", field="candidate")
        payoffs = _substitute(payoffs, hidden[0], float(candidate))
    up, down, emp = row_utilities(payoffs, freq)
    best = max(up, down)
    return float(settle_regrets(np.array([best - emp]), best)[0])


def regret_values_2x2(row_payoffs: Sequence[Optional[float]], cell: int, freq: Freq2x2,
                      values: np.ndarray, strict: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """Row-player (regret, best fixed utility) for every value put into `cell`."""
    vals = np.asarray(values, dtype=float)
    payoffs = _substitute(row_payoffs, cell, vals)
    others = [v for i, v in enumerate(payoffs) if i != cell]
    if any(v is None for v in others):
        raise TaskError("another payoff of the same player is hidden")
    up, down, emp = row_utilities(payoffs, freq)
    best = np.maximum(up, down)
    return settle_regrets(best - emp, best, strict, f"(cell {cell})"), best


def regret_curve_2x2(spec: GameSpec2x2, hidden_slot: Slot, freq: Freq2x2, grid: ValueGrid,
                     player_id: str = "", strict: bool = False) -> RegretCurve:
    """
    Regret of the hidden slot's owner over the grid. Column-player slots are
    handled by transposing the game and the table.
    """
    slot = Slot(hidden_slot)
    owner = [s for s in spec.hidden_slots() if s.role is slot.role and s is not slot]
    if owner:
        raise TaskError(f"{slot.value}: owner also hides {', '.join(s.value for s in owner)}")
    if slot.role is Role.COL:
        spec, freq, slot = spec.transpose(), freq.transpose(), slot.mirror()
    regrets, best = regret_values_2x2(spec.row, slot.cell, freq, grid.points, strict)
    return RegretCurve(grid, regrets, player_id or slot.value, best)


# ---------------- auctions ----------------

def _auction_curve(log_: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                   candidates: Optional[Sequence[float]], strict: bool) -> RegretCurve:
    if candidates is None:
        cand = default_bid_candidates(log_, player, grid)
    else:
        cand = np.unique(np.asarray(candidates, dtype=float))
        if cand.size == 0:
            raise ValidationError("need at least one candidate bid", field="bid_candidates")
    Q, TE = fixed_bid_totals(log_, spec, player, cand)
    q_emp, te_emp = realized_totals(log_, spec, player)
    theta = grid.points
    best = np.max(np.outer(theta, Q) - TE[None, :], axis=1)
    realized = theta * q_emp - te_emp
    T = log_.rounds
    # both totals are per-round sums in different orders; the snap makes
    # regret at a best-responding value exactly 0
    regrets = settle_regrets((best - realized) / T, best / T, strict, f"(player {player})")
    return RegretCurve(grid, regrets, str(player), best / T)


def regret_curve_first_price(log_: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                             bid_candidates: Optional[Sequence[float]] = None,
                             strict: bool = False) -> RegretCurve:
    if spec.mechanism is not Mechanism.FIRST_PRICE:
        raise ValidationError("expected a FIRST_PRICE spec", field="mechanism")
    return _auction_curve(log_, spec, player, grid, bid_candidates, strict)


def regret_curve_position_auction(log_: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                                  bid_candidates: Optional[Sequence[float]] = None,
                                  strict: bool = False) -> RegretCurve:
    if spec.mechanism not in (Mechanism.GSP, Mechanism.VCG):
        raise ValidationError("expected a GSP or VCG spec", field="mechanism")
    return _auction_curve(log_, spec, player, grid, bid_candidates, strict)


def regret_curve_auction(log_: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                         bid_candidates: Optional[Sequence[float]] = None,
                         strict: bool = False) -> RegretCurve:
    """Dispatch on the mechanism."""
    if spec.mechanism is Mechanism.FIRST_PRICE:
        return regret_curve_first_price(log_, spec, player, grid, bid_candidates, strict)
    return regret_curve_position_auction(log_, spec, player, grid, bid_candidates, strict)


def sum_curves(curves: Sequence[RegretCurve]) -> RegretCurve:
    """Pointwise sum of curves sharing one grid."""
    if not curves:
        raise ValidationError("nothing to sum", field="curves")
    grid = curves[0].grid
    for c in curves[1:]:
        if not c.grid.same_points(grid):
            raise ValidationError("curves live on different grids", field="curves")
    regrets = np.sum([c.regrets for c in curves], axis=0)
    best = None
    if all(c.best_fixed is not None for c in curves):
        best = np.sum([c.best_fixed for c in curves], axis=0)
    return RegretCurve(grid, regrets, "+".join(c.player_id for c in curves), best)
