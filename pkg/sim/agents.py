#!/usr/bin/env python3
"""
Synthetic players with a known true value.

Every agent picks an action from its action set each round and, with full
information, sees afterwards what each of its actions would have earned.
"""

from __future__ import annotations
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.special import softmax

import config
from errors import ValidationError

DEFAULT_BID_GRID = (0.0, 60.0, 1.0)    # lower, upper, step


class AgentKind(str, Enum):
    EXP_WEIGHTS = "exp_weights"
    TRUTHFUL = "truthful"
    FIXED_BID = "fixed_bid"
    UNIFORM_RANDOM = "uniform_random"
    EPSILON_BEST_RESPONSE = "epsilon_best_response"


def default_learning_rate(n_actions: int, rounds: int) -> float:
    """sqrt(8 ln K / T), applied to unscaled utilities."""
    if n_actions < 2 or rounds < 1:
        return 1.0
    return math.sqrt(8.0 * math.log(n_actions) / rounds)


@dataclass(frozen=True)
class AgentSpec:
    kind: AgentKind
    true_value: float = 0.0
    learning_rate: Optional[float] = None   # None -> default_learning_rate
    seed: int = 0
    bid: Optional[float] = None             # FIXED_BID
    epsilon: float = 0.0                    # EPSILON_BEST_RESPONSE
    bid_grid: Sequence[float] = DEFAULT_BID_GRID
    player_id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AgentKind(self.kind))
        if not math.isfinite(self.true_value):
            raise ValidationError("must be finite", field="true_value")
        if self.kind is AgentKind.EXP_WEIGHTS and self.learning_rate is not None and not self.learning_rate > 0:
            raise ValidationError("must be > 0", field="learning_rate")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError("must be in [0,1]", field="epsilon")
        if self.kind is AgentKind.FIXED_BID and (self.bid is None or self.bid < 0):
            raise ValidationError("fixed-bid agent needs a bid >= 0", field="bid")
        if len(self.bid_grid) != 3:
            raise ValidationError("expected [lower, upper, step]", field="bid_grid")


class Agent:
    """Base class: subclasses override choose(); update() keeps cumulative utilities."""

    def __init__(self, spec: AgentSpec, actions: np.ndarray, rng: np.random.Generator):
        self.spec = spec
        self.actions = np.asarray(actions, dtype=float)
        self.rng = rng
        self.cumulative = np.zeros(self.actions.size)

    def choose(self) -> float:
        raise NotImplementedError

    def update(self, utilities: np.ndarray) -> None:
        self.cumulative += utilities


class ExpWeightsAgent(Agent):
    def __init__(self, spec, actions, rng, learning_rate: float):
        super().__init__(spec, actions, rng)
        self.eta = learning_rate

    def choose(self) -> float:
        p = softmax(self.eta * self.cumulative)
        return float(self.actions[self.rng.choice(self.actions.size, p=p)])


class BestResponseAgent(Agent):
    """Fictitious play against the empirical history, random with prob. epsilon."""

    def choose(self) -> float:
        if self.rng.random() < self.spec.epsilon:
            return float(self.actions[self.rng.integers(self.actions.size)])
        return float(self.actions[int(np.argmax(self.cumulative))])


class UniformAgent(Agent):
    def choose(self) -> float:
        return float(self.actions[self.rng.integers(self.actions.size)])


class ConstantAgent(Agent):
    def __init__(self, spec, actions, rng, action: float):
        super().__init__(spec, actions, rng)
        self.action = float(action)

    def choose(self) -> float:
        return self.action

    def update(self, utilities: np.ndarray) -> None:
        pass


def bid_actions(spec: AgentSpec) -> np.ndarray:
    lo, hi, step = (float(x) for x in spec.bid_grid)
    if not (step > 0 and hi >= lo >= 0):
        raise ValidationError("expected 0 <= lower <= upper and step > 0", field="bid_grid")
    n = int(math.floor((hi - lo + config.GRID_END_TOL) / step)) + 1
    return lo + step * np.arange(n)


def make_agent(spec: AgentSpec, actions: np.ndarray, rng: np.random.Generator, rounds: int) -> Agent:
    kind = spec.kind
    if kind is AgentKind.EXP_WEIGHTS:
        eta = spec.learning_rate or default_learning_rate(len(actions), rounds)
        return ExpWeightsAgent(spec, actions, rng, eta)
    if kind is AgentKind.EPSILON_BEST_RESPONSE:
        return BestResponseAgent(spec, actions, rng)
    if kind is AgentKind.UNIFORM_RANDOM:
        return UniformAgent(spec, actions, rng)
    if kind is AgentKind.TRUTHFUL:
        return ConstantAgent(spec, actions, rng, spec.true_value)
    return ConstantAgent(spec, actions, rng, spec.bid)
