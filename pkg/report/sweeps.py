#!/usr/bin/env python3
"""
Robustness sweeps. Regret curves do not depend on lambda, so a lambda sweep
re-weights the curves cached in the task; a range sweep rebuilds the task
once per upper bound.
"""

from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

import config
from errors import ValidationError
from estimation.estimators import Method
from estimation.tasks import EstimationTask
from report.metrics import compute_report
from workers import fan_out

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LambdaSweep:
    curve: pd.DataFrame          # columns lambda, rmse
    best_lambda: float
    best_rmse: float


def _check_lambdas(lambdas: Sequence[float]) -> list:
    lams = [float(x) for x in lambdas]
    if not lams:
        raise ValidationError("empty lambda list", field="lambda")
    for lam in lams:
        if not (math.isfinite(lam) and lam >= 0):
            raise ValidationError(f"{lam} is not a finite value >= 0", field="lambda")
    return lams


def sweep_lambda(task: EstimationTask, lambdas: Sequence[float], method: Method = Method.QR,
                 hit_delta: float = config.MATRIX_HIT_DELTA, relative: bool = False,
                 workers: Optional[int] = None) -> LambdaSweep:
    lams = _check_lambdas(lambdas)
    if not any(item.true_value is not None for item in task.items):
        raise ValidationError("task has no ground truth to score", field="true_value")

    def rmse_at(lam: float) -> float:
        return compute_report(task.pairs(method, lam), hit_delta, relative).rmse

    rmses = fan_out(rmse_at, lams, workers)
    best = int(np.argmin(rmses))
    log.info("lambda sweep: best %.4g (rmse %.4g) over %d points", lams[best], rmses[best], len(lams))
    curve = pd.DataFrame({"lambda": lams, "rmse": rmses})
    return LambdaSweep(curve, lams[best], float(rmses[best]))


def sweep_range(task_factory: Callable[[float], EstimationTask], upper_bounds: Sequence[float],
                lambdas: Sequence[float], method: Method = Method.QR,
                hit_delta: float = config.MATRIX_HIT_DELTA, relative: bool = False,
                workers: Optional[int] = None) -> pd.DataFrame:
    """Per upper bound: the lambda with the least rmse and that rmse."""
    uppers = [float(u) for u in upper_bounds]
    if not uppers:
        raise ValidationError("empty list of upper bounds", field="upper_bounds")
    lams = _check_lambdas(lambdas)
    rows = []
    for upper in uppers:
        sweep = sweep_lambda(task_factory(upper), lams, method, hit_delta, relative, workers)
        rows.append({"upper_bound": upper, "optimal_lambda": sweep.best_lambda, "rmse": sweep.best_rmse})
    return pd.DataFrame(rows, columns=["upper_bound", "optimal_lambda", "rmse"])
