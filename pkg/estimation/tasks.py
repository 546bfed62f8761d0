#!/usr/bin/env python3
"""
Estimation tasks: regret curves computed once, estimates drawn many times.

A task is a list of items, each one hidden quantity with its regret curves,
its ground truth (if known) and the equilibrium-based estimates that do not
depend on lambda. Sweeps re-weight the cached curves only.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

import config
from errors import ValidationError
from estimation.auctions import eq2_best_response, eq_vcg_average_bid
from estimation.estimators import Method, estimate_from_curves, parse_methods
from estimation.gsp_equilibrium import eq1_vcg_like
from estimation.regret import RegretCurve, regret_curve_auction
from game.model import AuctionSpec, BidLog, ValueGrid
from workers import fan_out

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Estimate:
    method: str
    estimate: float
    true_value: Optional[float]
    game_id: str = ""
    session_id: str = ""
    level: str = ""
    slot: str = ""
    player_id: str = ""

    @property
    def error(self) -> Optional[float]:
        if self.true_value is None:
            return None
        return abs(self.estimate - self.true_value)

    def as_row(self) -> dict:
        return {
            "game_id": self.game_id,
            "session_id": self.session_id,
            "level": self.level,
            "method": self.method,
            "slot": self.slot,
            "player_id": self.player_id,
            "estimate": self.estimate,
            "true_value": self.true_value,
            "error": self.error,
        }


@dataclass(frozen=True)
class TaskItem:
    curves: Tuple[RegretCurve, ...]
    true_value: Optional[float] = None
    lambda_scale: float = 1.0
    baselines: Mapping[str, float] = field(default_factory=dict)
    game_id: str = ""
    session_id: str = ""
    level: str = ""
    slot: str = ""
    player_id: str = ""

    @property
    def grid(self) -> ValueGrid:
        return self.curves[0].grid

    def estimate(self, method: Method, lam: float) -> float:
        method = Method(method)
        if method.from_curves:
            return estimate_from_curves(method, self.curves, lam * self.lambda_scale)
        try:
            return float(self.baselines[method.value])
        except KeyError:
            raise ValidationError(
                f"{method.value} is not available for {self.session_id or self.game_id} "
                f"{self.slot or self.player_id}", field="method") from None

    def to_estimate(self, method: Method, lam: float) -> Estimate:
        return Estimate(
            method=Method(method).value,
            estimate=self.estimate(method, lam),
            true_value=self.true_value,
            game_id=self.game_id,
            session_id=self.session_id,
            level=self.level,
            slot=self.slot,
            player_id=self.player_id,
        )


@dataclass(frozen=True)
class EstimationTask:
    domain: str
    items: Tuple[TaskItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def __len__(self) -> int:
        return len(self.items)

    def estimates(self, methods, lam: float) -> List[Estimate]:
        out = []
        for method in parse_methods(methods):
            out.extend(item.to_estimate(method, lam) for item in self.items)
        return out

    def pairs(self, method: Method, lam: float) -> List[Tuple[float, float]]:
        """(estimate, true value) for every item with a known truth."""
        return [(item.estimate(method, lam), item.true_value)
                for item in self.items if item.true_value is not None]

    def curves(self) -> List[RegretCurve]:
        return [c for item in self.items for c in item.curves]

    @staticmethod
    def concat(domain: str, tasks: Iterable["EstimationTask"]) -> "EstimationTask":
        return EstimationTask(domain, tuple(i for t in tasks for i in t.items))


# ---------------- auctions ----------------

def auction_items(log_: BidLog, spec: AuctionSpec, grid: ValueGrid, session_id: str = "",
                  true_values: Optional[Mapping[str, float]] = None,
                  methods: Sequence = config.VCG_METHODS, strict: bool = False,
                  workers: Optional[int] = None) -> List[TaskItem]:
    """One item per player: its regret curve plus the requested equilibrium estimates."""
    wanted = parse_methods(methods)
    truths = dict(true_values or {})
    value_range = (grid.lower, grid.upper)

    eq1 = None
    if Method.EQ1 in wanted:
        eq1 = eq1_vcg_like(log_, spec, value_range).estimates

    def build(player: str) -> TaskItem:
        curve = regret_curve_auction(log_, spec, player, grid, strict=strict)
        baselines: Dict[str, float] = {}
        if Method.EQ in wanted:
            baselines["eq"] = float(np.clip(eq_vcg_average_bid(log_, player), *value_range))
        if eq1 is not None:
            baselines["eq1"] = eq1[player]
        if Method.EQ2 in wanted:
            baselines["eq2"] = eq2_best_response(log_, spec, player, grid)
        true = truths.get(player)
        return TaskItem(
            curves=(curve,),
            true_value=None if true is None else float(true),
            baselines=baselines,
            session_id=session_id,
            level="player",
            player_id=player,
        )

    return fan_out(build, log_.player_ids, workers)


def auction_task(logs: Mapping[str, BidLog], spec: AuctionSpec, grid: ValueGrid,
                 true_values: Optional[Mapping[Tuple[str, str], float]] = None,
                 methods: Sequence = config.VCG_METHODS, strict: bool = False,
                 workers: Optional[int] = None) -> EstimationTask:
    """Task over several sessions; `true_values` is keyed by (session_id, player_id)."""
    truths = dict(true_values or {})
    items: List[TaskItem] = []
    for session_id in sorted(logs):
        per_player = {p: v for (s, p), v in truths.items() if s == session_id}
        items.extend(auction_items(logs[session_id], spec, grid, session_id, per_player,
                                   methods, strict, workers))
    return EstimationTask("auction", tuple(items))

