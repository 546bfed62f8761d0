#!/usr/bin/env python3
"""
Run synthetic play. Every agent draws from its own PCG64 stream derived
from (run seed, agent seed, agent index), so logs are bit-reproducible.
"""

from __future__ import annotations
import logging
from typing import List, Sequence, Union

import numpy as np

from errors import ValidationError
from estimation.auctions import replay_against, tie_flags
from game.model import AuctionSpec, BidLog, Freq2x2, GameSpec2x2, PlayerFreq, Role, Session2x2
from sim.agents import Agent, AgentKind, AgentSpec, bid_actions, make_agent

log = logging.getLogger(__name__)

_MATCHING_STREAM = 0x6D61   # extra key for the 2x2 re-matching stream

PlayLog = Union[BidLog, Freq2x2, Session2x2]


def agent_rng(seed: int, agent: AgentSpec, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(agent.seed), index])))


def _player_ids(agents: Sequence[AgentSpec]) -> List[str]:
    return [a.player_id or str(i + 1) for i, a in enumerate(agents)]


def simulate(agents: Sequence[AgentSpec], spec: Union[AuctionSpec, GameSpec2x2], rounds: int,
             seed: int = 0, session_id: str = "") -> PlayLog:
    if int(rounds) < 1:
        raise ValidationError("must be >= 1", field="rounds")
    if isinstance(spec, AuctionSpec):
        return simulate_auction(agents, spec, int(rounds), seed)
    if isinstance(spec, GameSpec2x2):
        return simulate_2x2(agents, spec, int(rounds), seed, session_id)
    raise ValidationError(f"cannot simulate {type(spec).__name__}", field="spec")


# ---------------- auctions ----------------

def simulate_auction(agents: Sequence[AgentSpec], spec: AuctionSpec, rounds: int, seed: int = 0) -> BidLog:
    n = len(agents)
    if n != spec.n_players:
        raise ValidationError(f"{n} agents for {spec.n_players} players", field="agents")
    players: List[Agent] = [
        make_agent(a, bid_actions(a), agent_rng(seed, a, i), rounds) for i, a in enumerate(agents)]
    flags = [tie_flags(spec, n, i) for i in range(n)]
    learners = [i for i, a in enumerate(agents)
                if a.kind in (AgentKind.EXP_WEIGHTS, AgentKind.EPSILON_BEST_RESPONSE)]

    bids = np.empty((rounds, n))
    for t in range(rounds):
        bids[t] = [p.choose() for p in players]
        for i in learners:
            p = players[i]
            opp = np.delete(bids[t], i)[None, :]
            ctr, pay = replay_against(opp, flags[i], spec, p.actions[None, :])
            p.update(ctr[0] * agents[i].true_value - pay[0])
    log.debug("simulated %d auction rounds for %d agents", rounds, n)
    return BidLog(bids, tuple(_player_ids(agents)))


# ---------------- 2x2 games ----------------

def _payoff_matrices(spec: GameSpec2x2):
    if not spec.is_complete():
        raise ValidationError("simulation needs every payoff", field="game")
    A = np.array(spec.row, dtype=float).reshape(2, 2)   # [row action, col action]
    B = np.array(spec.col, dtype=float).reshape(2, 2)
    return A, B


def _matrix_agents(agents: Sequence[AgentSpec], rounds: int, seed: int) -> List[Agent]:
    actions = np.array([0.0, 1.0])
    out = []
    for i, a in enumerate(agents):
        if a.kind is AgentKind.TRUTHFUL:
            raise ValidationError("truthful agents only make sense in auctions", field="agents")
        if a.kind is AgentKind.FIXED_BID and a.bid not in (0, 1):
            raise ValidationError("fixed action must be 0 (Up/Left) or 1 (Down/Right)", field="bid")
        out.append(make_agent(a, actions, agent_rng(seed, a, i), rounds))
    return out


def simulate_2x2(agents: Sequence[AgentSpec], spec: GameSpec2x2, rounds: int, seed: int = 0,
                 session_id: str = "") -> Union[Freq2x2, Session2x2]:
    """
    Two agents (row, column) give one frequency table. Eight agents (four
    row, four column, re-matched at random every period) give a session.
    """
    A, B = _payoff_matrices(spec)
    n = len(agents)
    if n not in (2, 8):
        raise ValidationError(f"expected 2 or 8 agents, got {n}", field="agents")
    players = _matrix_agents(agents, rounds, seed)
    half = n // 2
    counts = np.zeros((n, 2, 2))
    match_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), _MATCHING_STREAM])))

    for _ in range(rounds):
        partner = half + (match_rng.permutation(half) if half > 1 else np.zeros(1, dtype=int))
        moves = [int(p.choose()) for p in players]
        for r in range(half):
            c = int(partner[r])
            a_row, a_col = moves[r], moves[c]
            counts[r, a_row, a_col] += 1
            counts[c, a_row, a_col] += 1
            players[r].update(A[:, a_col])
            players[c].update(B[a_row, :])

    tables = [Freq2x2(*(counts[i].ravel() / rounds), periods=rounds) for i in range(n)]
    if n == 2:
        return tables[0]
    ids = _player_ids(agents)
    records = tuple(
        PlayerFreq(ids[i], Role.ROW if i < half else Role.COL, tables[i]) for i in range(n))
    return Session2x2(spec.game_id, session_id or f"sim{seed}", records)
