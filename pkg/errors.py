"""
Exception hierarchy shared by every package.

ValidationError  - an input violates a type invariant (names the field).
TaskError        - the estimation task is ill-posed for the chosen mode.
EstimatorError   - an estimator could not produce an estimate.
"""

from __future__ import annotations
from typing import Optional


class RegretEstimationError(Exception):
    """Base class; the CLI turns any of these into exit code 1."""


class ValidationError(RegretEstimationError, ValueError):
    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class TaskError(RegretEstimationError):
    pass


class EstimatorError(RegretEstimationError):
    pass
