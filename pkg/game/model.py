#!/usr/bin/env python3
"""
Core value types: candidate grids, 2x2 games and frequency tables,
bid logs and auction settings.

All types are frozen after construction; numpy arrays held inside are
marked read-only so they can be shared between worker threads.
"""

from __future__ import annotations
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import ValidationError

CELLS = ("ul", "ur", "dl", "dr")


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------- candidate grids ----------------

@dataclass(frozen=True, eq=False)
class ValueGrid:
    """Ascending candidate values with one prior weight per point."""
    points: np.ndarray
    prior: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        pri = _frozen(self.prior)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "prior", pri)
        if pts.ndim != 1 or pts.size < 1:
            raise ValidationError("need at least one point", field="points")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("non-finite point", field="points")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValidationError("must be strictly ascending", field="points")
        if pri.shape != pts.shape:
            raise ValidationError("length differs from points", field="prior")
        if np.any(pri < 0) or not np.all(np.isfinite(pri)):
            raise ValidationError("weights must be finite and >= 0", field="prior")
        if abs(float(pri.sum()) - 1.0) > config.SUM_TOL:
            raise ValidationError(f"weights sum to {pri.sum()!r}, expected 1", field="prior")

    @classmethod
    def uniform(cls, points: Sequence[float]) -> "ValueGrid":
        n = len(points)
        return cls(np.asarray(points, dtype=float), np.full(n, 1.0 / n if n else 0.0))

    @classmethod
    def from_weights(cls, points: Sequence[float], weights: Sequence[float]) -> "ValueGrid":
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise ValidationError("weights must have a positive sum", field="prior")
        return cls(np.asarray(points, dtype=float), w / total)

    def __len__(self) -> int:
        return int(self.points.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ValueGrid):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(self.prior, other.prior)

    __hash__ = None

    @property
    def lower(self) -> float:
        return float(self.points[0])

    @property
    def upper(self) -> float:
        return float(self.points[-1])

    @property
    def step(self) -> Optional[float]:
        """Common gap of a uniform grid, None otherwise."""
        if self.points.size < 2:
            return None
        gaps = np.diff(self.points)
        if np.allclose(gaps, gaps[0], rtol=0, atol=1e-9):
            return float(gaps[0])
        return None

    def same_points(self, other: "ValueGrid") -> bool:
        return np.array_equal(self.points, other.points)


def make_uniform_grid(lower: float, upper: float, step: float) -> ValueGrid:
    """Closed grid {lower, lower+step, ...} up to `upper`, uniform prior."""
    for name, val in (("lower", lower), ("upper", upper), ("step", step)):
        if not math.isfinite(val):
            raise ValidationError("must be finite", field=name)
    if step <= 0:
        raise ValidationError("must be > 0", field="step")
    if not lower < upper:
        raise ValidationError(f"lower {lower} must be < upper {upper}", field="lower")
    n = int(math.floor((upper - lower + config.GRID_END_TOL) / step)) + 1
    points = lower + step * np.arange(n, dtype=float)
    return ValueGrid.uniform(points)


# ---------------- 2x2 games ----------------

class Role(str, Enum):
    ROW = "row"
    COL = "col"

    def other(self) -> "Role":
        return Role.COL if self is Role.ROW else Role.ROW


class Slot(str, Enum):
    ROW_UL = "row_ul"
    ROW_UR = "row_ur"
    ROW_DL = "row_dl"
    ROW_DR = "row_dr"
    COL_UL = "col_ul"
    COL_UR = "col_ur"
    COL_DL = "col_dl"
    COL_DR = "col_dr"

    @property
    def role(self) -> Role:
        return Role(self.value.split("_")[0])

    @property
    def cell(self) -> int:
        return CELLS.index(self.value.split("_")[1])

    def mirror(self) -> "Slot":
        """Slot that holds the same payoff after transposing the game."""
        cell = CELLS[_TRANSPOSE[self.cell]]
        return Slot(f"{self.role.other().value}_{cell}")

    @classmethod
    def of(cls, role: Role, cell: int) -> "Slot":
        return cls(f"{Role(role).value}_{CELLS[cell]}")


# UL->UL, UR->DL, DL->UR, DR->DR when rows and columns swap
_TRANSPOSE = (0, 2, 1, 3)

Payoffs = Tuple[Optional[float], Optional[float], Optional[float], Optional[float]]


@dataclass(frozen=True)
class Freq2x2:
    """Empirical frequency of (Up,Left), (Up,Right), (Down,Left), (Down,Right)."""
    ul: float
    ur: float
    dl: float
    dr: float
    periods: int = config.MATRIX_PERIODS

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.ul, self.ur, self.dl, self.dr)

    @property
    def left(self) -> float:
        return self.ul + self.dl

    @property
    def right(self) -> float:
        return self.ur + self.dr

    @property
    def up(self) -> float:
        return self.ul + self.ur

    @property
    def down(self) -> float:
        return self.dl + self.dr

    def transpose(self) -> "Freq2x2":
        return Freq2x2(self.ul, self.dl, self.ur, self.dr, self.periods)

    @staticmethod
    def mean(tables: Sequence["Freq2x2"]) -> "Freq2x2":
        if not tables:
            raise ValidationError("cannot average zero tables", field="tables")
        arr = np.array([t.as_tuple() for t in tables], dtype=float)
        avg = arr.mean(axis=0)
        return Freq2x2(*map(float, avg), periods=max(t.periods for t in tables))


def validate_freq(freq: Freq2x2) -> Freq2x2:
    """Return `freq` unchanged if it is a probability table, raise otherwise."""
    for name, val in zip(CELLS, freq.as_tuple()):
        if not math.isfinite(val):
            raise ValidationError("non-finite frequency", field=f"f_{name.upper()}")
        if val < 0 or val > 1:
            raise ValidationError(f"frequency {val} outside [0,1]", field=f"f_{name.upper()}")
    total = math.fsum(freq.as_tuple())
    if abs(total - 1.0) > config.SUM_TOL:
        raise ValidationError(f"frequencies sum to {total}, expected 1", field="f_*")
    if int(freq.periods) < 1:
        raise ValidationError("must be a positive integer", field="periods")
    return freq


@dataclass(frozen=True)
class GameSpec2x2:
    """Bimatrix payoffs; a None slot is hidden and carries no value."""
    row: Payoffs
    col: Payoffs
    constant_sum: Optional[float] = None
    game_id: str = ""

    def __post_init__(self):
        for role, payoffs in (("row", self.row), ("col", self.col)):
            if len(payoffs) != 4:
                raise ValidationError("need four payoffs", field=role)
            for cell, val in zip(CELLS, payoffs):
                if val is not None and not math.isfinite(val):
                    raise ValidationError("non-finite payoff", field=f"{role}_{cell}")
        object.__setattr__(self, "row", tuple(None if v is None else float(v) for v in self.row))
        object.__setattr__(self, "col", tuple(None if v is None else float(v) for v in self.col))
        if self.constant_sum is not None:
            for cell, r, c in zip(CELLS, self.row, self.col):
                if r is not None and c is not None and abs(r + c - self.constant_sum) > config.SUM_TOL:
                    raise ValidationError(
                        f"row+col = {r + c}, expected {self.constant_sum}", field=f"cell_{cell}")

    def payoffs(self, role: Role) -> Payoffs:
        return self.row if Role(role) is Role.ROW else self.col

    def value(self, slot: Slot) -> Optional[float]:
        return self.payoffs(slot.role)[slot.cell]

    def hidden_slots(self) -> List[Slot]:
        return [s for s in Slot if self.value(s) is None]

    def hide(self, *slots: Slot) -> "GameSpec2x2":
        row, col = list(self.row), list(self.col)
        for s in slots:
            (row if s.role is Role.ROW else col)[s.cell] = None
        return GameSpec2x2(tuple(row), tuple(col), self.constant_sum, self.game_id)

    def transpose(self) -> "GameSpec2x2":
        """Swap the roles: the column player becomes the row player."""
        row = tuple(self.col[_TRANSPOSE[i]] for i in range(4))
        col = tuple(self.row[_TRANSPOSE[i]] for i in range(4))
        return GameSpec2x2(row, col, self.constant_sum, self.game_id)

    def is_complete(self) -> bool:
        return not self.hidden_slots()


# ---------------- auctions ----------------

@dataclass(frozen=True, eq=False)
class BidLog:
    """Per-round bids, one column per player."""
    bids: np.ndarray
    player_ids: Tuple[str, ...]

    def __post_init__(self):
        arr = np.array(self.bids, dtype=float)
        if arr.ndim != 2:
            raise ValidationError("expected a rounds x players table", field="bids")
        ids = tuple(str(p) for p in self.player_ids)
        if arr.shape[0] < 1:
            raise ValidationError("need at least one round", field="rounds")
        if arr.shape[1] != len(ids):
            raise ValidationError(f"{arr.shape[1]} bids per round for {len(ids)} players", field="bids")
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate player id", field="player_ids")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValidationError("bids must be finite and >= 0", field="bids")
        arr.setflags(write=False)
        object.__setattr__(self, "bids", arr)
        object.__setattr__(self, "player_ids", ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BidLog):
            return NotImplemented
        return self.player_ids == other.player_ids and np.array_equal(self.bids, other.bids)

    __hash__ = None

    @property
    def rounds(self) -> int:
        return int(self.bids.shape[0])

    @property
    def n_players(self) -> int:
        return int(self.bids.shape[1])

    def index_of(self, player: str) -> int:
        try:
            return self.player_ids.index(str(player))
        except ValueError:
            raise ValidationError(f"player {player!r} not in log", field="player_id") from None

    def column(self, player: str) -> np.ndarray:
        return self.bids[:, self.index_of(player)]

    def opponents(self, player: str) -> np.ndarray:
        return np.delete(self.bids, self.index_of(player), axis=1)

    def second_half(self) -> "BidLog":
        return BidLog(self.bids[self.rounds // 2:], self.player_ids)

    def permuted(self, order: Sequence[int]) -> "BidLog":
        return BidLog(self.bids[np.asarray(order)], self.player_ids)


class Mechanism(str, Enum):
    FIRST_PRICE = "FIRST_PRICE"
    GSP = "GSP"
    VCG = "VCG"


class TieRule(str, Enum):
    LOWER_INDEX = "lower_index"     # earlier player in the log wins ties
    HIGHER_INDEX = "higher_index"

    def priority(self, n: int) -> np.ndarray:
        """Rank key per player index; smaller key wins a tie."""
        idx = np.arange(n)
        return idx if self is TieRule.LOWER_INDEX else -idx


@dataclass(frozen=True)
class AuctionSpec:
    mechanism: Mechanism
    ctrs: Tuple[float, ...]
    n_players: int
    tie_rule: TieRule = TieRule.LOWER_INDEX

    def __post_init__(self):
        object.__setattr__(self, "mechanism", Mechanism(self.mechanism))
        object.__setattr__(self, "tie_rule", TieRule(self.tie_rule))
        ctrs = tuple(float(c) for c in self.ctrs)
        object.__setattr__(self, "ctrs", ctrs)
        if int(self.n_players) < 1:
            raise ValidationError("must be >= 1", field="n_players")
        if not ctrs:
            raise ValidationError("need at least one slot", field="ctrs")
        if any(not (0 < c <= 1) for c in ctrs):
            raise ValidationError("each ctr must be in (0,1]", field="ctrs")
        if any(a <= b for a, b in zip(ctrs, ctrs[1:])):
            raise ValidationError("must be strictly descending", field="ctrs")
        if self.mechanism is Mechanism.FIRST_PRICE and ctrs != (1.0,):
            raise ValidationError("first-price auctions have one slot with ctr 1", field="ctrs")

    @property
    def n_slots(self) -> int:
        return len(self.ctrs)

    def ctr_at(self, position: int) -> float:
        return self.ctrs[position] if position < len(self.ctrs) else 0.0


# ---------------- sessions ----------------

@dataclass(frozen=True)
class PlayerFreq:
    player_id: str
    role: Role
    freq: Freq2x2


@dataclass(frozen=True)
class Session2x2:
    """One subject group: four row players and four column players."""
    game_id: str
    session_id: str
    records: Tuple[PlayerFreq, ...] = field(default_factory=tuple)

    def __post_init__(self):
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        rows = sum(1 for r in recs if r.role is Role.ROW)
        cols = sum(1 for r in recs if r.role is Role.COL)
        if rows != 4 or cols != 4:
            raise ValidationError(
                f"expected 4 row and 4 column players, got {rows} and {cols}",
                field=f"session {self.session_id}")

    def by_role(self, role: Role) -> List[PlayerFreq]:
        return [r for r in self.records if r.role is Role(role)]

    def tables(self) -> List[Freq2x2]:
        return [r.freq for r in self.records]
