#!/usr/bin/env python3
"""Command handlers: load inputs, build the estimation task, write outputs."""

from __future__ import annotations
import argparse
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import pandas as pd

import config
import storage
from errors import ValidationError
from estimation.estimators import Method, parse_methods
from estimation.matrix2x2 import AggregationLevel, matrix_task
from estimation.tasks import EstimationTask, auction_task
from game.model import AuctionSpec, BidLog, GameSpec2x2, Mechanism, Session2x2, make_uniform_grid
from report.metrics import grouped_reports, method_reports, method_table, type_means
from report.sweeps import sweep_lambda, sweep_range
from sim.scenario import load_scenario

log = logging.getLogger(__name__)


@dataclass
class Inputs:
    domain: str
    sessions: List[Session2x2] = field(default_factory=list)
    games: Dict[str, GameSpec2x2] = field(default_factory=dict)
    logs: Dict[str, BidLog] = field(default_factory=dict)
    auction_spec: Optional[AuctionSpec] = None
    values: Dict[Tuple[str, str], float] = field(default_factory=dict)
    conditions: Dict[Tuple[str, str], str] = field(default_factory=dict)


# ---------- inputs ----------

def load_inputs(args: argparse.Namespace) -> Inputs:
    if args.logs:
        return _auction_inputs(args)
    return _matrix_inputs(args)


def _matrix_inputs(args) -> Inputs:
    games = storage.read_games_json(args.games or config.GAME1_GAMES)
    sole = next(iter(games)) if len(games) == 1 else None
    sessions = storage.read_freq_csv(args.freqs or config.GAME1_FREQS, game_id=args.game, default_game=sole)
    if args.game is not None:
        games = {k: v for k, v in games.items() if k == args.game}
        if not games:
            raise ValidationError(f"unknown game {args.game!r}", field="game")
    return Inputs("2x2", sessions=sessions, games=games)


def _auction_inputs(args) -> Inputs:
    logs = storage.read_bidlogs(args.logs)
    sizes = {l.n_players for l in logs.values()}
    if len(sizes) != 1:
        raise ValidationError("logs disagree on the number of players", field="logs")
    if args.auction_spec:
        spec = storage.read_auction_spec_json(args.auction_spec)
    elif args.mechanism:
        ctrs = (1.0,) if args.mechanism == Mechanism.FIRST_PRICE.value else config.AUCTION_CTRS
        spec = AuctionSpec(args.mechanism, ctrs, sizes.pop())
    else:
        raise ValidationError("auction logs need --auction-spec or --mechanism", field="auction_spec")
    values = storage.read_values_csv(args.values) if args.values else {}
    conditions = storage.read_value_conditions(args.values) if args.values else {}
    return Inputs("auction", logs=logs, auction_spec=spec, values=values, conditions=conditions)


def run_config(args, inputs: Inputs) -> config.RunConfig:
    mechanism = inputs.auction_spec.mechanism.value if inputs.auction_spec else None
    methods = None
    if getattr(args, "method", None):
        methods = tuple(m.value for m in parse_methods(args.method))
    return config.run_config_for(
        inputs.domain,
        mechanism,
        methods=methods,
        level=getattr(args, "level", None),
        lam=getattr(args, "lam", None),
        value_range=getattr(args, "value_range", None),
        grid_step=getattr(args, "grid_step", None),
        hit_delta=getattr(args, "hit_delta", None),
        error_kind=getattr(args, "error", None),
        half=getattr(args, "half", None),
        seed=args.seed,
        workers=args.workers,
        game=getattr(args, "game", None),
        group_by=tuple(args.group_by) if getattr(args, "group_by", None) else None,
    )


def build_task(cfg: config.RunConfig, inputs: Inputs, upper: Optional[float] = None,
               strict: bool = False) -> EstimationTask:
    lo, hi = cfg.value_range
    grid = make_uniform_grid(lo, hi if upper is None else upper, cfg.grid_step)
    if inputs.domain == "2x2":
        if cfg.half != "full":
            raise ValidationError("only applies to auction logs", field="half")
        level = AggregationLevel.parse(cfg.level)
        return matrix_task(inputs.sessions, inputs.games, level, grid, strict, cfg.workers)
    logs = inputs.logs
    if cfg.half == "second":
        logs = {sid: l.second_half() for sid, l in logs.items()}
    return auction_task(logs, inputs.auction_spec, grid, inputs.values, cfg.methods, strict, cfg.workers)


def _with_extra_columns(frame: pd.DataFrame, inputs: Inputs) -> pd.DataFrame:
    """Columns usable for breakdowns but absent from the estimate CSV."""
    out = frame.copy()
    if inputs.domain == "2x2":
        out["constant_sum"] = out["game_id"].map(
            lambda g: "yes" if inputs.games[g].constant_sum is not None else "no")
    else:
        out["mechanism"] = inputs.auction_spec.mechanism.value
        if inputs.conditions:
            out["condition"] = [inputs.conditions.get((s, p), "")
                                for s, p in zip(out["session_id"], out["player_id"])]
    return out


# ---------- commands ----------

def cmd_estimate(args) -> int:
    inputs = load_inputs(args)
    cfg = run_config(args, inputs)
    task = build_task(cfg, inputs, strict=args.strict)
    estimates = task.estimates(cfg.methods, cfg.lam)
    relative = cfg.error_kind == "rel"

    store = storage.OutputStore(args.out)
    est_frame = storage.estimates_frame(estimates, inputs.domain)
    store.write_frame("estimates.csv", est_frame)
    if args.curves:
        store.write_frame("curves.csv", storage.curves_frame(task.items))

    full = pd.DataFrame([e.as_row() for e in estimates])
    if full["true_value"].notna().any():
        table = method_table(full, cfg.hit_delta, relative, cfg.methods)
        store.write_frame("report.csv", table.rename_axis("metric").reset_index())
        store.write_json("report.json", method_reports(full, cfg.hit_delta, relative))
        extended = _with_extra_columns(full, inputs)
        if cfg.group_by:
            breakdown = grouped_reports(extended, cfg.group_by, cfg.hit_delta, relative)
            store.write_frame("breakdown.csv", breakdown)
        if inputs.domain == "auction":
            by = ("condition", "true_value") if inputs.conditions else ("true_value",)
            store.write_frame("type_means.csv", type_means(extended, by))
            if args.curves:
                store.write_frame("type_curves.csv", storage.type_curves_frame(task.items))
    else:
        log.warning("no ground truth available; skipping reports")
    store.write_metadata("estimate", cfg.as_dict(), {"n_estimates": len(estimates)})
    print(f"{len(estimates)} estimates written to {args.out}")
    return 0


def _single_method(cfg: config.RunConfig) -> Method:
    methods = parse_methods(cfg.methods)
    if len(methods) == 1:
        return methods[0]
    return Method.QR if Method.QR in methods else methods[0]


def cmd_sweep_lambda(args) -> int:
    inputs = load_inputs(args)
    cfg = run_config(args, inputs)
    task = build_task(cfg, inputs, strict=args.strict)
    method = _single_method(cfg)
    sweep = sweep_lambda(task, args.lambdas, method, cfg.hit_delta, cfg.error_kind == "rel", cfg.workers)
    store = storage.OutputStore(args.out)
    store.write_frame("sweep_lambda.csv", sweep.curve)
    store.write_metadata("sweep-lambda", cfg.as_dict(),
                         {"method": method.value, "best_lambda": sweep.best_lambda, "best_rmse": sweep.best_rmse})
    print(f"best lambda {sweep.best_lambda:g} (rmse {sweep.best_rmse:.4g})")
    return 0


def cmd_sweep_range(args) -> int:
    inputs = load_inputs(args)
    if inputs.domain != "2x2":
        raise ValidationError("range sweeps run on 2x2 data", field="logs")
    cfg = run_config(args, inputs)
    top = max((v for g in inputs.games.values() for v in g.row + g.col if v is not None), default=None)
    if top is not None and min(args.upper_bounds) < top:
        log.warning("upper bound %g is below the largest payoff %g", min(args.upper_bounds), top)
    method = _single_method(cfg)
    table = sweep_range(lambda upper: build_task(cfg, inputs, upper, args.strict),
                        args.upper_bounds, args.lambdas, method, cfg.hit_delta,
                        cfg.error_kind == "rel", cfg.workers)
    store = storage.OutputStore(args.out)
    store.write_frame("sweep_range.csv", table)
    store.write_metadata("sweep-range", cfg.as_dict(), {"method": method.value})
    print(f"{len(table)} upper bounds written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if scenario.domain == "2x2" and not scenario.spec.game_id:
        scenario = replace(scenario, spec=replace(scenario.spec, game_id="g1"))
    play = scenario.run()
    store = storage.OutputStore(args.out)
    sid = scenario.session_id or f"sim{scenario.seed}"
    settings = {"scenario": args.scenario, "domain": scenario.domain, "rounds": scenario.rounds,
                "seed": scenario.seed, "session_id": sid}
    if isinstance(play, BidLog):
        store.write_frame(f"{sid}.csv", storage.bidlog_frame(play), exact=True)
        values = pd.DataFrame(
            [{"session_id": s, "player_id": p, "true_value": v} for (s, p), v in scenario.true_values().items()],
            columns=storage.VALUES_COLUMNS)
        store.write_frame("values.csv", values, exact=True)
        store.write_json("auction_spec.json", storage.auction_spec_to_dict(scenario.spec))
    else:
        gid = scenario.spec.game_id
        store.write_frame("freqs.csv", storage.freq_frame(play, gid, sid), exact=True)
        store.write_json("games.json", {gid: storage.game_to_dict(scenario.spec)})
    store.write_metadata("simulate", settings)
    print(f"simulated {scenario.rounds} rounds into {args.out}")
    return 0


def cmd_validate(args) -> int:
    lines = []
    if getattr(args, "scenario", None):
        sc = load_scenario(args.scenario)
        lines.append(f"scenario: {sc.domain}, {len(sc.agents)} agents, {sc.rounds} rounds")
    if args.logs or args.freqs or args.games or not getattr(args, "scenario", None):
        inputs = load_inputs(args)
        if inputs.domain == "2x2":
            lines.append(f"2x2: {len(inputs.games)} games, {len(inputs.sessions)} sessions")
            for gid, g in inputs.games.items():
                hidden = ", ".join(s.value for s in g.hidden_slots()) or "none hidden"
                cs = f", constant sum {g.constant_sum:g}" if g.constant_sum is not None else ""
                lines.append(f"  {gid}: {hidden}{cs}")
        else:
            lines.append(f"auction: {inputs.auction_spec.mechanism.value}, {len(inputs.logs)} sessions, "
                         f"{len(inputs.values)} true values")
            for sid, l in inputs.logs.items():
                lines.append(f"  {sid}: {l.rounds} rounds x {l.n_players} players")
    print("\n".join(lines))
    return 0
