# Makes "report" a package and re-exports primary functions for convenience.
from .metrics import ErrorReport, compute_report, grouped_reports, method_reports, method_table, type_means
from .sweeps import LambdaSweep, sweep_lambda, sweep_range

__all__ = [
    "ErrorReport", "compute_report", "grouped_reports", "method_reports", "method_table", "type_means",
    "LambdaSweep", "sweep_lambda", "sweep_range",
]
