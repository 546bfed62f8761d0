#!/usr/bin/env python3
"""
Value estimation from GSP bids through the VCG-like (lowest symmetric)
full-information equilibrium.

In that equilibrium the bidder in position s >= 2 bids
    b_s = ((x_{s-1} - x_s) * v_s + x_s * b_{s+1}) / x_{s-1}
with x the CTRs (zero below the last slot), so each round's bids can be
inverted for the values of everyone except the top bidder. Rounds whose bids
break the equilibrium inequalities are first moved to the closest consistent
bid vector (least squares).
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

import config
from errors import EstimatorError, ValidationError
from game.model import AuctionSpec, BidLog, Mechanism

log = logging.getLogger(__name__)

_FEASIBILITY_TOL = 1e-7


@dataclass(frozen=True)
class Eq1Result:
    estimates: Dict[str, float]
    rounds: int
    consistent: int
    perturbed: int
    skipped: int
    per_round: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def consistent_share(self) -> float:
        return self.consistent / self.rounds if self.rounds else 0.0


def _ctr_by_position(spec: AuctionSpec, n: int) -> np.ndarray:
    # x_1..x_n stored at 0..n-1, plus a trailing zero
    x = np.zeros(n + 1)
    m = min(spec.n_slots, n)
    x[:m] = spec.ctrs[:m]
    return x


def value_map(spec: AuctionSpec, n: int) -> np.ndarray:
    """
    Linear map from position-sorted bids to deduced values. Row 0 (top
    bidder) is left empty; its value is fixed separately.
    """
    x = _ctr_by_position(spec, n)
    C = np.zeros((n, n))
    for s in range(1, n):
        gap = x[s - 1] - x[s]
        if x[s - 1] <= 0 or gap <= 0:
            C[s, s] = 1.0           # below the first excluded bidder: value = bid
            continue
        C[s, s] = x[s - 1] / gap
        if s + 1 < n:
            C[s, s + 1] = -x[s] / gap
    return C


def constraint_matrix(spec: AuctionSpec, n: int) -> np.ndarray:
    """Rows a with a @ b >= 0 for every equilibrium inequality."""
    rows = []
    for s in range(n - 1):
        r = np.zeros(n)
        r[s], r[s + 1] = 1.0, -1.0
        rows.append(r)
    C = value_map(spec, n)
    for s in range(1, n - 1):
        rows.append(C[s] - C[s + 1])
    return np.array(rows) if rows else np.zeros((0, n))


def deduce_values(sorted_bids: np.ndarray, spec: AuctionSpec) -> np.ndarray:
    """Values by position for bids already in the VCG-like equilibrium."""
    b = np.asarray(sorted_bids, dtype=float)
    n = b.size
    v = value_map(spec, n) @ b
    v[0] = max(b[0], v[1]) if n > 1 else b[0]
    return v


def vcg_like_bids(values: Sequence[float], ctrs: Sequence[float]) -> np.ndarray:
    """
    Forward recursion: equilibrium bids for descending `values`.
    The top bidder bids its value; bidders past the first excluded one bid truthfully.
    """
    v = np.asarray(values, dtype=float)
    if np.any(np.diff(v) > 0):
        raise ValidationError("values must be in descending order", field="values")
    n = v.size
    spec = AuctionSpec(Mechanism.GSP, tuple(ctrs), n)
    x = _ctr_by_position(spec, n)
    b = np.array(v)
    for s in range(n - 1, 0, -1):
        if x[s - 1] <= 0:
            continue
        below = b[s + 1] if s + 1 < n else 0.0
        b[s] = ((x[s - 1] - x[s]) * v[s] + x[s] * below) / x[s - 1]
    return b


def project_bids(sorted_bids: np.ndarray, A: np.ndarray) -> Optional[np.ndarray]:
    """Closest (squared error) nonnegative bids with A @ b >= 0; None on solver failure."""
    b0 = np.asarray(sorted_bids, dtype=float)
    res = minimize(
        lambda z: float(np.sum((z - b0) ** 2)),
        b0,
        jac=lambda z: 2.0 * (z - b0),
        method="SLSQP",
        bounds=[(0.0, None)] * b0.size,
        constraints=[{"type": "ineq", "fun": lambda z: A @ z, "jac": lambda z: A}],
        tol=config.EQ1_SOLVER_TOL,
    )
    if not res.success:
        return None
    z = np.maximum(res.x, 0.0)
    if A.size and np.min(A @ z) < -_FEASIBILITY_TOL * max(1.0, float(np.max(np.abs(b0)))):
        return None
    return z


def eq1_vcg_like(log_: BidLog, spec: AuctionSpec,
                 value_range: Optional[Tuple[float, float]] = None) -> Eq1Result:
    """Mean per-round deduced value per player, clipped to `value_range`."""
    if spec.mechanism is not Mechanism.GSP:
        raise ValidationError("equilibrium inversion expects a GSP spec", field="mechanism")
    n = log_.n_players
    if n != spec.n_players:
        raise ValidationError(f"log has {n} players, spec {spec.n_players}", field="n_players")
    A = constraint_matrix(spec, n)
    prio = spec.tie_rule.priority(n)
    deduced = np.full((log_.rounds, n), np.nan)
    consistent = perturbed = skipped = 0

    for t, bids in enumerate(log_.bids):
        order = np.lexsort((prio, -bids))
        b = bids[order]
        scale = max(1.0, float(np.max(np.abs(b))))
        if A.size == 0 or np.min(A @ b) >= -_FEASIBILITY_TOL * scale:
            consistent += 1
        else:
            b = project_bids(b, A)
            if b is None:
                skipped += 1
                continue
            perturbed += 1
        deduced[t, order] = deduce_values(b, spec)

    if skipped > config.EQ1_MAX_SKIPPED_SHARE * log_.rounds:
        raise EstimatorError(f"equilibrium projection failed on {skipped} of {log_.rounds} rounds")
    if skipped:
        log.warning("equilibrium projection skipped %d of %d rounds", skipped, log_.rounds)
    log.info("equilibrium check: %d consistent, %d perturbed, %d skipped",
             consistent, perturbed, skipped)

    estimates = {}
    per_round = {}
    kept = ~np.isnan(deduced[:, 0])
    for i, pid in enumerate(log_.player_ids):
        vals = deduced[kept, i]
        per_round[pid] = vals
        est = float(np.mean(vals))
        if value_range is not None:
            est = float(np.clip(est, value_range[0], value_range[1]))
        estimates[pid] = est
    return Eq1Result(estimates, log_.rounds, consistent, perturbed, skipped, per_round)
