#!/usr/bin/env python3
"""
Point estimates from regret curves.

  QR       prior-weighted mean with weights exp(-lambda * summed regret)
  MR       grid value with the least regret (ties -> smallest value)
  MR_REL   least regret relative to the best fixed utility
  PRIOR    prior mean (what QR gives at lambda = 0)
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import softmax

import config
from errors import ValidationError
from estimation.regret import RegretCurve, sum_curves
from game.model import ValueGrid

log = logging.getLogger(__name__)

Curves = Union[RegretCurve, Sequence[RegretCurve]]


class Method(str, Enum):
    QR = "qr"
    MR = "mr"
    MR_REL = "mr_rel"
    EQ = "eq"
    EQ1 = "eq1"
    EQ2 = "eq2"
    PRIOR = "prior"

    @property
    def uses_lambda(self) -> bool:
        return self is Method.QR

    @property
    def from_curves(self) -> bool:
        return self in (Method.QR, Method.MR, Method.MR_REL, Method.PRIOR)


def parse_methods(text: Union[str, Sequence[str]]) -> Tuple[Method, ...]:
    items = text.split(",") if isinstance(text, str) else list(text)
    out = []
    for item in items:
        if isinstance(item, Method):
            if item not in out:
                out.append(item)
            continue
        name = str(item).strip().lower()
        if not name:
            continue
        try:
            method = Method(name)
        except ValueError:
            raise ValidationError(f"unknown method {name!r}", field="method") from None
        if method not in out:
            out.append(method)
    if not out:
        raise ValidationError("no method given", field="method")
    return tuple(out)


@dataclass(frozen=True)
class EstimatorConfig:
    lam: float = config.MATRIX_LAMBDA

    def __post_init__(self):
        lam = float(self.lam)
        if not (np.isfinite(lam) and lam >= 0):
            raise ValidationError("must be finite and >= 0", field="lambda")
        object.__setattr__(self, "lam", lam)


def _as_list(curves: Curves) -> list:
    if isinstance(curves, RegretCurve):
        return [curves]
    out = list(curves)
    if not out:
        raise ValidationError("need at least one curve", field="curves")
    return out


def _total_regret(curves: Curves) -> Tuple[ValueGrid, np.ndarray]:
    items = _as_list(curves)
    return items[0].grid, sum_curves(items).regrets


def prior_mean(grid: ValueGrid) -> float:
    return float(np.dot(grid.prior, grid.points))


def posterior_weights(curves: Curves, lam: float) -> np.ndarray:
    """Normalized exp(-lambda * regret) weights times the prior."""
    lam = EstimatorConfig(lam).lam
    grid, total = _total_regret(curves)
    if lam == 0.0:
        return np.array(grid.prior)
    shifted = total - total.min()
    with np.errstate(divide="ignore"):
        logits = np.log(grid.prior) - lam * shifted
    return softmax(logits)


def quantal_regret(curves: Curves, lam: float) -> float:
    lam = EstimatorConfig(lam).lam
    grid = _as_list(curves)[0].grid
    if lam == 0.0:
        return prior_mean(grid)
    weights = posterior_weights(curves, lam)
    if not np.all(np.isfinite(weights)) or weights.sum() <= 0:
        log.warning("quantal-regret weights underflowed; falling back to min-regret")
        return min_regret(sum_curves(_as_list(curves)))
    estimate = float(np.dot(weights, grid.points))
    return float(np.clip(estimate, grid.lower, grid.upper))


def min_regret(curve: Curves) -> float:
    grid, total = _total_regret(curve)
    return float(grid.points[int(np.argmin(total))])


def min_relative_regret(curve: Curves, optimal_fixed_utilities: Optional[Sequence[float]] = None) -> float:
    """Argmin of regret / max(best fixed utility, eps)."""
    items = _as_list(curve)
    merged = sum_curves(items)
    if optimal_fixed_utilities is None:
        if merged.best_fixed is None:
            raise ValidationError("curve carries no best fixed utilities", field="optimal_fixed_utilities")
        optimal = merged.best_fixed
    else:
        optimal = np.asarray(optimal_fixed_utilities, dtype=float)
        if optimal.shape != merged.regrets.shape:
            raise ValidationError("length differs from the grid", field="optimal_fixed_utilities")
    relative = merged.regrets / np.maximum(optimal, config.RELATIVE_EPS)
    return float(merged.grid.points[int(np.argmin(relative))])


def estimate_from_curves(method: Method, curves: Curves, lam: float = config.MATRIX_LAMBDA) -> float:
    """Dispatch for the curve-based methods."""
    method = Method(method)
    if method is Method.QR:
        return quantal_regret(curves, lam)
    if method is Method.MR:
        return min_regret(curves)
    if method is Method.MR_REL:
        return min_relative_regret(curves)
    if method is Method.PRIOR:
        return prior_mean(_as_list(curves)[0].grid)
    raise ValidationError(f"{method.value} is not a curve-based method", field="method")
