#!/usr/bin/env python3
"""
Error metrics over (estimate, true value) pairs.

Absolute errors are in value units. Relative errors are fractions of the
true value per entry; the summary statistics of a relative report are
given in percent and the hit delta is then in percentage points.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from errors import ValidationError

log = logging.getLogger(__name__)

_HIT_TOL = 1e-9
ROW_LABELS = ("RMSE", "Average Error", "Hit Rate")


@dataclass(frozen=True)
class ReportEntry:
    id: str
    estimate: float
    true_value: float
    abs_error: float
    rel_error: Optional[float]


@dataclass(frozen=True)
class ErrorReport:
    entries: Tuple[ReportEntry, ...]
    rmse: float
    avg_error: float
    hit_rate: float
    hit_delta: float
    relative: bool = False

    @property
    def n(self) -> int:
        return len(self.entries)

    def as_dict(self) -> dict:
        return {"n": self.n, "rmse": self.rmse, "avg_error": self.avg_error,
                "hit_rate": self.hit_rate, "hit_delta": self.hit_delta,
                "error": "rel" if self.relative else "abs"}


Pair = Union[Tuple[float, float], Tuple[str, float, float]]


def compute_report(pairs: Iterable[Pair], hit_delta: float, relative: bool = False) -> ErrorReport:
    entries = []
    for k, p in enumerate(pairs):
        if len(p) == 3:
            pid, est, true = p
        else:
            (est, true), pid = p, str(k)
        est, true = float(est), float(true)
        if not (np.isfinite(est) and np.isfinite(true)):
            raise ValidationError(f"non-finite pair ({est}, {true})", field="pairs")
        err = abs(est - true)
        if relative and true == 0:
            raise ValidationError(f"relative error with true value 0 ({pid})", field="true_value")
        rel = err / abs(true) if true != 0 else None
        entries.append(ReportEntry(str(pid), est, true, err, rel))
    if not entries:
        raise ValidationError("nothing to report", field="pairs")
    if hit_delta < 0:
        raise ValidationError("must be >= 0", field="hit_delta")

    if relative:
        errors = 100.0 * np.array([e.rel_error for e in entries])
    else:
        errors = np.array([e.abs_error for e in entries])
    return ErrorReport(
        entries=tuple(entries),
        rmse=float(np.sqrt(np.mean(errors ** 2))),
        avg_error=float(np.mean(errors)),
        hit_rate=float(np.mean(errors <= hit_delta + _HIT_TOL)),
        hit_delta=float(hit_delta),
        relative=relative,
    )


def estimates_table(estimates) -> pd.DataFrame:
    """Accept a frame or a list of Estimate records."""
    if isinstance(estimates, pd.DataFrame):
        return estimates
    return pd.DataFrame([e.as_row() for e in estimates])


def _report_for(frame: pd.DataFrame, hit_delta: float, relative: bool) -> ErrorReport:
    known = frame.dropna(subset=["true_value"])
    return compute_report(zip(known["estimate"], known["true_value"]), hit_delta, relative)


def grouped_reports(estimates, by: Sequence[str], hit_delta: float, relative: bool = False) -> pd.DataFrame:
    """One report row per (group..., method) with a known truth."""
    df = estimates_table(estimates).dropna(subset=["true_value"])
    keys = [c for c in by if c != "method"] + ["method"]
    missing = [c for c in keys if c not in df.columns]
    if missing:
        raise ValidationError(f"unknown column(s) {', '.join(missing)}", field="group_by")
    rows = []
    for key, grp in df.groupby(keys, sort=True):
        rep = _report_for(grp, hit_delta, relative)
        rows.append(dict(zip(keys, key if isinstance(key, tuple) else (key,)),
                         n=rep.n, rmse=rep.rmse, avg_error=rep.avg_error, hit_rate=rep.hit_rate))
    return pd.DataFrame(rows, columns=keys + ["n", "rmse", "avg_error", "hit_rate"])


def method_table(estimates, hit_delta: float, relative: bool = False,
                 methods: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Rows {RMSE, Average Error, Hit Rate}, one column per method."""
    df = estimates_table(estimates).dropna(subset=["true_value"])
    order: List[str] = list(methods) if methods else list(pd.unique(df["method"]))
    cols = {}
    for m in order:
        grp = df[df["method"] == m]
        if grp.empty:
            continue
        rep = _report_for(grp, hit_delta, relative)
        cols[m.upper()] = [rep.rmse, rep.avg_error, rep.hit_rate]
    return pd.DataFrame(cols, index=list(ROW_LABELS))


def method_reports(estimates, hit_delta: float, relative: bool = False) -> dict:
    """JSON rendering: {method: report dict}."""
    df = estimates_table(estimates).dropna(subset=["true_value"])
    return {m: _report_for(grp, hit_delta, relative).as_dict()
            for m, grp in df.groupby("method", sort=False)}


def type_means(estimates, by: Sequence[str] = ("true_value",)) -> pd.DataFrame:
    """Mean estimate per (type..., method); a player's type is its true value."""
    df = estimates_table(estimates).dropna(subset=["true_value"])
    keys = list(by) + ["method"]
    missing = [c for c in keys if c not in df.columns]
    if missing:
        raise ValidationError(f"unknown column(s) {', '.join(missing)}", field="by")
    out = df.groupby(keys, sort=True)["estimate"].agg(["mean", "size"]).reset_index()
    return out.rename(columns={"mean": "mean_estimate", "size": "n"})[keys + ["n", "mean_estimate"]]
