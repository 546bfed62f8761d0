# Makes "sim" a package and re-exports primary classes for convenience.
from .agents import AgentKind, AgentSpec, default_learning_rate
from .simulate import simulate, simulate_2x2, simulate_auction
from .scenario import Scenario, load_scenario, scenario_from_dict

__all__ = [
    "AgentKind", "AgentSpec", "default_learning_rate",
    "simulate", "simulate_2x2", "simulate_auction",
    "Scenario", "load_scenario", "scenario_from_dict",
]
