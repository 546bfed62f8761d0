#!/usr/bin/env python3
"""
2x2 bimatrix pipeline: hide one payoff at a time, score every candidate
value by the owner's regret, and compare with the Nash-inversion estimate.

Levels
  GAME                  all session tables of a game averaged first
  SESSION               the eight players' tables averaged per session
  FINE_GRAINED          the four same-role players' curves summed, lambda * 3/k
  PLAYER                each player estimates its own four payoffs
  CONSTANT_SUM_SESSION  four cells on [0, C]; row entry x, column entry C - x
"""

from __future__ import annotations
import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import TaskError, ValidationError
from estimation.estimators import Method, parse_methods
from estimation.regret import RegretCurve, regret_curve_2x2, regret_values_2x2
from estimation.tasks import Estimate, EstimationTask, TaskItem
from game.model import (Freq2x2, GameSpec2x2, Role, Session2x2, Slot, ValueGrid,
                        make_uniform_grid)
from workers import fan_out

log = logging.getLogger(__name__)


class AggregationLevel(str, Enum):
    GAME = "game"
    SESSION = "session"
    FINE_GRAINED = "fine_grained"
    PLAYER = "player"
    CONSTANT_SUM_SESSION = "constant_sum"

    @classmethod
    def parse(cls, text: str) -> "AggregationLevel":
        try:
            return cls(str(text).strip().lower().replace("-", "_"))
        except ValueError:
            raise ValidationError(f"unknown level {text!r}", field="level") from None


def aggregate_session(session: Session2x2) -> Freq2x2:
    return Freq2x2.mean(session.tables())


def nash_inversion_2x2(spec: GameSpec2x2, hidden_slot: Slot, freq: Freq2x2,
                       value_range: Tuple[float, float]) -> float:
    """
    Solve the owner's indifference between its two actions for the hidden
    payoff, with the opponent mixing at its empirical marginal.
    """
    slot = Slot(hidden_slot)
    lo, hi = value_range
    others = [s for s in spec.hidden_slots() if s.role is slot.role and s is not slot]
    if others:
        raise TaskError(f"{slot.value}: owner also hides {', '.join(s.value for s in others)}")
    if slot.role is Role.COL:
        spec, freq, slot = spec.transpose(), freq.transpose(), slot.mirror()
    p = freq.left
    # indifference: p*(a_UL - a_DL) + (1-p)*(a_UR - a_DR) = 0
    weights = (p, 1.0 - p, -p, -(1.0 - p))
    coef = weights[slot.cell]
    if abs(coef) < config.DEGENERATE_COEF_TOL:
        log.warning("%s drops out of the indifference condition; using range midpoint",
                    Slot(hidden_slot).value)
        return 0.5 * (lo + hi)
    rest = sum(w * a for i, (w, a) in enumerate(zip(weights, spec.row)) if i != slot.cell)
    return float(np.clip(-rest / coef, lo, hi))


def mixed_equilibrium_2x2(spec: GameSpec2x2) -> Freq2x2:
    """Profile frequencies of the completely mixed equilibrium of a full game."""
    if not spec.is_complete():
        raise TaskError("mixed equilibrium needs every payoff")
    a_ul, a_ur, a_dl, a_dr = spec.row
    b_ul, b_ur, b_dl, b_dr = spec.col
    den_p = (a_ul - a_dl) + (a_dr - a_ur)
    den_q = (b_ul - b_ur) + (b_dr - b_dl)
    if abs(den_p) < config.DEGENERATE_COEF_TOL or abs(den_q) < config.DEGENERATE_COEF_TOL:
        raise TaskError("game has no completely mixed equilibrium")
    p = (a_dr - a_ur) / den_p       # column plays Left
    q = (b_dr - b_dl) / den_q       # row plays Up
    if not (0 < p < 1 and 0 < q < 1):
        raise TaskError(f"game has no completely mixed equilibrium (p={p:.4g}, q={q:.4g})")
    return Freq2x2(q * p, q * (1 - p), (1 - q) * p, (1 - q) * (1 - p))


def _target_slots(spec: GameSpec2x2) -> List[Slot]:
    """Every slot of a complete game, else only the hidden ones."""
    hidden = spec.hidden_slots()
    return list(Slot) if not hidden else hidden


def _slot_item(spec: GameSpec2x2, slot: Slot, tables: Sequence[Freq2x2], eq_table: Freq2x2,
               grid: ValueGrid, lambda_scale: float, strict: bool, **labels) -> TaskItem:
    masked = spec.hide(slot)
    curves = tuple(regret_curve_2x2(masked, slot, t, grid, strict=strict) for t in tables)
    eq = nash_inversion_2x2(masked, slot, eq_table, (grid.lower, grid.upper))
    return TaskItem(
        curves=curves,
        true_value=spec.value(slot),
        lambda_scale=lambda_scale,
        baselines={"eq": eq},
        game_id=spec.game_id,
        slot=slot.value,
        **labels,
    )


def constant_sum_grid(spec: GameSpec2x2, step: float) -> ValueGrid:
    if spec.constant_sum is None:
        raise TaskError(f"game {spec.game_id!r} is not constant-sum")
    return make_uniform_grid(0.0, spec.constant_sum, step)


def _constant_sum_items(spec: GameSpec2x2, freq: Freq2x2, grid: ValueGrid, strict: bool,
                        session_id: str) -> List[TaskItem]:
    C = spec.constant_sum
    if C is None:
        raise TaskError(f"game {spec.game_id!r} is not constant-sum")
    hidden = spec.hidden_slots()
    cells = sorted({s.cell for s in hidden}) if hidden else range(4)
    grid = constant_sum_grid(spec, grid.step or config.MATRIX_GRID_STEP)
    items = []
    for cell in cells:
        row_slot = Slot.of(Role.ROW, cell)
        col_slot = Slot.of(Role.COL, cell)
        masked = spec.hide(row_slot, col_slot)
        tmasked = masked.transpose()
        mirrored = col_slot.mirror()

        r_reg, r_best = regret_values_2x2(masked.row, cell, freq, grid.points, strict)
        c_reg, c_best = regret_values_2x2(tmasked.row, mirrored.cell, freq.transpose(),
                                          C - grid.points, strict)
        curves = (
            RegretCurve(grid, r_reg, row_slot.value, r_best),
            RegretCurve(grid, c_reg, col_slot.value, c_best),
        )
        eq_row = nash_inversion_2x2(masked, row_slot, freq, (0.0, C))
        eq_col = nash_inversion_2x2(masked, col_slot, freq, (0.0, C))
        truth = spec.row[cell]
        if truth is None and spec.col[cell] is not None:
            truth = C - spec.col[cell]
        items.append(TaskItem(
            curves=curves,
            true_value=truth,
            baselines={"eq": 0.5 * (eq_row + (C - eq_col))},
            game_id=spec.game_id,
            session_id=session_id,
            level=AggregationLevel.CONSTANT_SUM_SESSION.value,
            slot=row_slot.value,
        ))
    return items


def session_items(session: Session2x2, spec: GameSpec2x2, level: AggregationLevel,
                  grid: ValueGrid, strict: bool = False) -> List[TaskItem]:
    level = AggregationLevel(level)
    if level is AggregationLevel.GAME:
        raise TaskError("game level spans sessions; use game_items")
    table = aggregate_session(session)

    if level is AggregationLevel.CONSTANT_SUM_SESSION:
        return _constant_sum_items(spec, table, grid, strict, session.session_id)

    items: List[TaskItem] = []
    if level is AggregationLevel.SESSION:
        for slot in _target_slots(spec):
            items.append(_slot_item(spec, slot, [table], table, grid, 1.0, strict,
                                    session_id=session.session_id, level=level.value))
    elif level is AggregationLevel.FINE_GRAINED:
        for slot in _target_slots(spec):
            tables = [r.freq for r in session.by_role(slot.role)]
            k = len(tables)
            if k != 4:
                log.warning("fine-grained scaling applied to %d curves", k)
            items.append(_slot_item(spec, slot, tables, table, grid,
                                    config.FINE_GRAINED_FACTOR / k, strict,
                                    session_id=session.session_id, level=level.value))
    else:
        for record in session.records:
            for slot in _target_slots(spec):
                if slot.role is not record.role:
                    continue
                items.append(_slot_item(spec, slot, [record.freq], record.freq, grid, 1.0, strict,
                                        session_id=f"{session.session_id}/{record.player_id}",
                                        level=level.value, player_id=record.player_id))
    return items


def game_items(sessions: Sequence[Session2x2], spec: GameSpec2x2, grid: ValueGrid,
               strict: bool = False) -> List[TaskItem]:
    """GAME level: one table averaged over every session of the game."""
    if not sessions:
        raise ValidationError("no sessions for game", field=spec.game_id or "game_id")
    table = Freq2x2.mean([aggregate_session(s) for s in sessions])
    return [_slot_item(spec, slot, [table], table, grid, 1.0, strict,
                       session_id="*", level=AggregationLevel.GAME.value)
            for slot in _target_slots(spec)]


def estimate_session(session: Session2x2, spec: GameSpec2x2, level: AggregationLevel,
                     method: Method, grid: ValueGrid, lam: float = config.MATRIX_LAMBDA,
                     strict: bool = False) -> List[Estimate]:
    """Estimates for each hidden slot (8, or 4 cells in constant-sum mode)."""
    method = parse_methods([method])[0]
    return [item.to_estimate(method, lam)
            for item in session_items(session, spec, level, grid, strict)]


def estimate_game(sessions: Sequence[Session2x2], spec: GameSpec2x2, method: Method,
                  grid: ValueGrid, lam: float = config.MATRIX_LAMBDA,
                  strict: bool = False) -> List[Estimate]:
    method = parse_methods([method])[0]
    return [item.to_estimate(method, lam) for item in game_items(sessions, spec, grid, strict)]


def matrix_task(sessions: Sequence[Session2x2], games: Dict[str, GameSpec2x2],
                level: AggregationLevel, grid: ValueGrid, strict: bool = False,
                workers: Optional[int] = None) -> EstimationTask:
    """Task over a whole dataset; sessions are matched to games by game_id."""
    level = AggregationLevel(level)
    for s in sessions:
        if s.game_id not in games:
            raise ValidationError(f"session {s.session_id} refers to unknown game {s.game_id!r}",
                                  field="game_id")
    if level is AggregationLevel.GAME:
        by_game: Dict[str, List[Session2x2]] = {}
        for s in sessions:
            by_game.setdefault(s.game_id, []).append(s)
        chunks = fan_out(lambda gid: game_items(by_game[gid], games[gid], grid, strict),
                         sorted(by_game), workers)
    else:
        chunks = fan_out(lambda s: session_items(s, games[s.game_id], level, grid, strict),
                         list(sessions), workers)
    return EstimationTask("2x2", tuple(i for chunk in chunks for i in chunk))
