#!/usr/bin/env python3
"""
Pinned defaults for both estimation domains plus environment overrides.

The 2x2 numbers follow the matrix-game study (range [0,22], integer grid,
lambda=3, +-3 hit-rate); the auction numbers follow the ad-auction study
(range [1,60], integer grid, lambda=1, +-6 hit-rate).
"""

from __future__ import annotations
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from errors import ValidationError

# ---- numeric tolerances ----
SUM_TOL = 1e-9              # frequency / prior sums
GRID_END_TOL = 1e-9         # final grid point kept if within this of `upper`
REGRET_CLAMP_TOL = 1e-9     # |regret| below tol * utility scale is float noise
RELATIVE_EPS = 1e-9         # denominator guard for relative regret
EQ1_SOLVER_TOL = 1e-8
EQ1_MAX_SKIPPED_SHARE = 0.5
DEGENERATE_COEF_TOL = 1e-12

# ---- 2x2 games ----
MATRIX_RANGE: Tuple[float, float] = (0.0, 22.0)
MATRIX_GRID_STEP = 1.0
MATRIX_LAMBDA = 3.0
MATRIX_HIT_DELTA = 3.0
MATRIX_METHODS: Tuple[str, ...] = ("qr", "mr", "eq")
MATRIX_PERIODS = 200
FINE_GRAINED_FACTOR = 3.0   # lambda * 3/k for k summed same-role curves

# ---- ad auctions ----
AUCTION_RANGE: Tuple[float, float] = (1.0, 60.0)
AUCTION_GRID_STEP = 1.0
AUCTION_LAMBDA = 1.0
AUCTION_HIT_DELTA = 6.0
AUCTION_CTRS: Tuple[float, ...] = (0.38, 0.29, 0.20, 0.11, 0.02)
AUCTION_VALUES: Tuple[float, ...] = (21.0, 27.0, 33.0, 39.0, 45.0)
AUCTION_ROUNDS = 1500
VCG_METHODS: Tuple[str, ...] = ("qr", "mr", "eq")
GSP_METHODS: Tuple[str, ...] = ("qr", "mr", "eq1", "eq2")

# ---- sweeps ----
DEFAULT_LAMBDAS: Tuple[float, ...] = (
    0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 3.3, 4.0, 5.0, 7.0, 10.0,
)
DEFAULT_UPPER_BOUNDS: Tuple[float, ...] = (22.0, 30.0, 40.0, 60.0, 100.0)

# ---- shipped fixtures ----
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
GAME1_GAMES = os.path.join(DATA_DIR, "game1.json")
GAME1_FREQS = os.path.join(DATA_DIR, "game1_session.csv")

# ---- environment ----
WORKERS = int(os.environ.get("REGRET_WORKERS", "1"))
LOG_LEVEL = os.environ.get("REGRET_LOG_LEVEL", "WARNING")

# documented choices echoed into every metadata sidecar
DOCUMENTED_CHOICES = {
    "argmin_ties": "smallest grid value",
    "auction_tie_rule_default": "lower_index",
    "bid_candidates": "grid U {0} U own bids U opponent bids U opponent bids + tick",
    "negative_regret": "kept signed; |r| <= 1e-9 * max(1, |utility|) snapped to 0; strict raises",
    "hit_rate": "boundary inclusive",
    "eq1_perturbation_norm": "squared error, per round",
    "eq1_aggregation": "mean of per-round deduced values",
    "eq1_top_slot_value": "max(top bid, second deduced value)",
    "eq2_objective": "|best response - mean bid|, ties toward smaller value",
    "degenerate_inversion": "range midpoint + warning",
    "fine_grained_lambda": "lambda * 3/k for k summed curves",
    "relative_error_units": "percent of true value",
}


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one CLI run (flags merged over domain defaults)."""
    domain: str
    methods: Tuple[str, ...]
    level: str = "session"
    lam: float = MATRIX_LAMBDA
    value_range: Tuple[float, float] = MATRIX_RANGE
    grid_step: float = MATRIX_GRID_STEP
    hit_delta: float = MATRIX_HIT_DELTA
    error_kind: str = "abs"
    half: str = "full"
    seed: int = 0
    workers: int = WORKERS
    game: Optional[str] = None
    group_by: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (self.lam >= 0 and self.lam != float("inf")):
            raise ValidationError("must be finite and >= 0", field="lambda")
        lo, hi = self.value_range
        if not lo < hi:
            raise ValidationError("expected LO < HI", field="range")
        if not self.grid_step > 0:
            raise ValidationError("must be > 0", field="grid_step")
        if self.error_kind not in ("abs", "rel"):
            raise ValidationError("expected abs or rel", field="error")
        if self.half not in ("full", "second"):
            raise ValidationError("expected full or second", field="half")

    def as_dict(self) -> dict:
        return {
            "domain": self.domain,
            "methods": list(self.methods),
            "level": self.level,
            "lambda": self.lam,
            "range": list(self.value_range),
            "grid_step": self.grid_step,
            "hit_delta": self.hit_delta,
            "error": self.error_kind,
            "half": self.half,
            "seed": self.seed,
            "workers": self.workers,
            "game": self.game,
            "group_by": list(self.group_by),
        }


def run_config_for(domain: str, mechanism: Optional[str] = None, **overrides) -> RunConfig:
    """Domain defaults with every non-None override applied on top."""
    if domain == "2x2":
        base = RunConfig(
            domain=domain,
            methods=MATRIX_METHODS,
            lam=MATRIX_LAMBDA,
            value_range=MATRIX_RANGE,
            grid_step=MATRIX_GRID_STEP,
            hit_delta=MATRIX_HIT_DELTA,
        )
    elif domain == "auction":
        methods = GSP_METHODS if (mechanism or "").upper() == "GSP" else VCG_METHODS
        base = RunConfig(
            domain=domain,
            methods=methods,
            level="player",
            lam=AUCTION_LAMBDA,
            value_range=AUCTION_RANGE,
            grid_step=AUCTION_GRID_STEP,
            hit_delta=AUCTION_HIT_DELTA,
        )
    else:
        raise ValidationError(f"unknown domain {domain!r}", field="domain")
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(base, **changes) if changes else base
