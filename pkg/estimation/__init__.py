# Makes "estimation" a package and re-exports the main entry points for convenience.
# Import order follows the module dependencies.
from .auctions import RoundOutcome, eq2_best_response, eq_vcg_average_bid, fixed_bid_totals, run_round
from .regret import (
    RegretCurve,
    regret_2x2_row,
    regret_curve_2x2,
    regret_curve_auction,
    regret_curve_first_price,
    regret_curve_position_auction,
    sum_curves,
)
from .estimators import (
    EstimatorConfig,
    Method,
    min_regret,
    min_relative_regret,
    parse_methods,
    posterior_weights,
    prior_mean,
    quantal_regret,
)
from .gsp_equilibrium import Eq1Result, eq1_vcg_like, vcg_like_bids
from .tasks import Estimate, EstimationTask, TaskItem, auction_task
from .matrix2x2 import (
    AggregationLevel,
    aggregate_session,
    estimate_game,
    estimate_session,
    matrix_task,
    mixed_equilibrium_2x2,
    nash_inversion_2x2,
)

__all__ = [
    "RoundOutcome", "run_round", "fixed_bid_totals", "eq_vcg_average_bid", "eq2_best_response",
    "RegretCurve", "regret_2x2_row", "regret_curve_2x2", "regret_curve_auction",
    "regret_curve_first_price", "regret_curve_position_auction", "sum_curves",
    "EstimatorConfig", "Method", "min_regret", "min_relative_regret", "parse_methods",
    "posterior_weights", "prior_mean", "quantal_regret",
    "Eq1Result", "eq1_vcg_like", "vcg_like_bids",
    "Estimate", "EstimationTask", "TaskItem", "auction_task",
    "AggregationLevel", "aggregate_session", "estimate_game", "estimate_session",
    "matrix_task", "mixed_equilibrium_2x2", "nash_inversion_2x2",
]
