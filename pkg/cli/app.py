#!/usr/bin/env python3
"""
Command-line front end.

    regret estimate      [--freqs F --games G | --logs L... (--auction-spec S | --mechanism M)]
    regret sweep-lambda  (same inputs) --lambdas 0,0.5,1,...
    regret sweep-range   (2x2 inputs)  --upper-bounds 22,30,40 --lambdas ...
    regret simulate      --scenario S
    regret validate      (any inputs)

Exit codes: 0 success, 1 validation/estimation failure or malformed file,
2 usage error.
"""

from __future__ import annotations
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

import config
from errors import RegretEstimationError

log = logging.getLogger(__name__)


def _float_list(text: str) -> List[float]:
    items = [t for t in text.replace(" ", "").split(",") if t]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
    try:
        return [float(t) for t in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _range(text: str):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _str_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--out",
        default="out",
        help="Output directory (default: out)"
    )
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed recorded in the metadata and used by simulations (default: 0)"
    )
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help=f"Worker threads (default: REGRET_WORKERS or {config.WORKERS})"
    )
    p.add_argument(
        "-v", "--verbose",
        action="count",
        default=0,
        help="More logging on stderr (-v info, -vv debug)"
    )


def _add_inputs(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("inputs")
    g.add_argument("--freqs", help="Freq2x2 CSV (default: shipped worked example)")
    g.add_argument("--games", help="Games JSON keyed by game_id (default: shipped worked example)")
    g.add_argument("--game", help="Game id for a Freq2x2 CSV without a game_id column, or a filter")
    g.add_argument("--logs", nargs="+", help="BidLog CSVs, one session per file (switches to auctions)")
    g.add_argument("--auction-spec", help="AuctionSpec JSON")
    g.add_argument("--mechanism", type=str.upper, choices=["GSP", "VCG", "FIRST_PRICE"],
                   help="Build the auction spec from the default CTRs instead of a JSON file")
    g.add_argument("--values", help="True values CSV: session_id,player_id,true_value")


def _add_estimation(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("estimation")
    g.add_argument("--method", type=_str_list, help="Comma-separated methods: qr,mr,mr_rel,eq,eq1,eq2,prior")
    g.add_argument("--level", help="2x2 aggregation: game, session, fine_grained, player, constant_sum")
    g.add_argument("--lambda", dest="lam", type=float, help="Regret aversion (2x2: 3, auctions: 1)")
    g.add_argument("--range", dest="value_range", type=_range, help="Value range LO:HI (2x2: 0:22, auctions: 1:60)")
    g.add_argument("--grid-step", type=float, help="Grid step (default: 1)")
    g.add_argument("--hit-delta", type=float, help="Hit-rate delta (2x2: 3, auctions: 6)")
    g.add_argument("--error", choices=["abs", "rel"], help="Error kind (default: abs)")
    g.add_argument("--half", choices=["full", "second"], help="Auction rounds to use (default: full)")
    g.add_argument("--strict", action="store_true", help="Fail on negative regret instead of clamping")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regret",
        description="Estimate hidden game parameters from observed play by quantal regret.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
USAGE EXAMPLES:

  Worked example (shipped fixture, 2x2 defaults):
    python main.py estimate --method qr,mr,eq

  GSP logs with known values:
    python main.py estimate --logs s1.csv s2.csv --mechanism GSP --values values.csv

  Lambda sweep:
    python main.py sweep-lambda --freqs freqs.csv --games games.json --lambdas 0,0.5,1,3,10
        """
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Run estimators and write estimates + reports")
    _add_inputs(p)
    _add_estimation(p)
    _add_common(p)
    p.add_argument("--curves", action="store_true", help="Also write the regret curves")
    p.add_argument("--group-by", type=_str_list, help="Breakdown report columns, e.g. game_id,constant_sum")

    p = sub.add_parser("sweep-lambda", help="rmse as a function of lambda")
    _add_inputs(p)
    _add_estimation(p)
    _add_common(p)
    p.add_argument("--lambdas", type=_float_list, default=list(config.DEFAULT_LAMBDAS),
                   help="Comma-separated lambda values")

    p = sub.add_parser("sweep-range", help="Best lambda and rmse per upper bound of the value range")
    _add_inputs(p)
    _add_estimation(p)
    _add_common(p)
    p.add_argument("--lambdas", type=_float_list, default=list(config.DEFAULT_LAMBDAS),
                   help="Comma-separated lambda values")
    p.add_argument("--upper-bounds", type=_float_list, default=list(config.DEFAULT_UPPER_BOUNDS),
                   help="Comma-separated upper bounds")

    p = sub.add_parser("simulate", help="Generate synthetic play from a scenario file")
    p.add_argument("--scenario", required=True, help="Scenario JSON")
    _add_common(p)

    p = sub.add_parser("validate", help="Parse the inputs and report what was found")
    _add_inputs(p)
    p.add_argument("--scenario", help="Scenario JSON")
    _add_common(p)
    return parser


def setup_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, str(config.LOG_LEVEL).upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    from cli import commands

    handlers: Dict[str, Callable[[argparse.Namespace], int]] = {
        "estimate": commands.cmd_estimate,
        "sweep-lambda": commands.cmd_sweep_lambda,
        "sweep-range": commands.cmd_sweep_range,
        "simulate": commands.cmd_simulate,
        "validate": commands.cmd_validate,
    }
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return handlers[args.command](args)
    except RegretEstimationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
