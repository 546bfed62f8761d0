#!/usr/bin/env python3
"""
Scenario files: a JSON description of agents, a game and a seed.

    {
      "domain": "auction",                 # or "2x2"
      "spec": {"mechanism": "GSP", "ctrs": [...], "n_players": 5},
      "game": {"game_id": "g1", "row": {...}, "col": {...}},   # 2x2 only
      "rounds": 1500,
      "seed": 7,
      "session_id": "sim7",
      "agents": [{"kind": "exp_weights", "true_value": 21, "seed": 0}, ...]
    }
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import config
import storage
from errors import ValidationError
from game.model import AuctionSpec, GameSpec2x2
from sim.agents import AgentSpec
from sim.simulate import PlayLog, simulate

_AGENT_FIELDS = {"kind", "true_value", "learning_rate", "seed", "bid", "epsilon", "bid_grid", "player_id"}


@dataclass(frozen=True)
class Scenario:
    domain: str
    spec: Union[AuctionSpec, GameSpec2x2]
    agents: Tuple[AgentSpec, ...]
    rounds: int
    seed: int = 0
    session_id: str = ""

    def run(self) -> PlayLog:
        return simulate(self.agents, self.spec, self.rounds, self.seed, self.session_id)

    def true_values(self) -> Dict[Tuple[str, str], float]:
        """(session_id, player_id) -> value, as in the values CSV."""
        sid = self.session_id or f"sim{self.seed}"
        return {(sid, a.player_id or str(i + 1)): a.true_value for i, a in enumerate(self.agents)}


def agent_from_dict(raw: dict) -> AgentSpec:
    unknown = set(raw) - _AGENT_FIELDS
    if unknown:
        raise ValidationError(f"unknown field(s) {', '.join(sorted(unknown))}", field="agents")
    try:
        kwargs = dict(raw)
        if "bid_grid" in kwargs:
            kwargs["bid_grid"] = tuple(float(x) for x in kwargs["bid_grid"])
        return AgentSpec(**kwargs)
    except TypeError as e:
        raise ValidationError(str(e), field="agents") from None
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(str(e), field="agents") from None


def scenario_from_dict(raw: dict) -> Scenario:
    domain = str(raw.get("domain", "auction")).lower()
    if domain == "auction":
        spec = storage.auction_spec_from_dict(raw.get("spec") or {})
        default_rounds = config.AUCTION_ROUNDS
    elif domain == "2x2":
        game = raw.get("game") or {}
        spec = storage.game_from_dict(str(game.get("game_id", "")), game)
        default_rounds = config.MATRIX_PERIODS
    else:
        raise ValidationError(f"unknown domain {domain!r}", field="domain")
    agents = tuple(agent_from_dict(a) for a in raw.get("agents", []))
    if not agents:
        raise ValidationError("no agents", field="agents")
    seed = int(raw.get("seed", 0))
    return Scenario(domain, spec, agents, int(raw.get("rounds", default_rounds)), seed,
                    str(raw.get("session_id", "")))


def load_scenario(path: str) -> Scenario:
    raw = storage.read_json(path)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: expected a JSON object", field="path")
    return scenario_from_dict(raw)
