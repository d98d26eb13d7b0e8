"""Monte Carlo simulator for downlink C-RAN power management with static
deep Q-learning and activation/sleep baselines."""

__version__ = "0.1.0"

from .radio import OFF, RadioConfig  # noqa: E402
from .scenario import RateProfile, Scenario, build_scenario, build_topology  # noqa: E402
from .network import NetworkState  # noqa: E402
from .sdql import DeepQTable, Hyperparams, run_episode  # noqa: E402
from .baselines import BaselineConfig, activation_scheme, sleep_scheme  # noqa: E402
from .metrics import TrialReport, build_report  # noqa: E402

__all__ = [
    "OFF", "RadioConfig", "RateProfile", "Scenario", "build_scenario", "build_topology",
    "NetworkState", "DeepQTable", "Hyperparams", "run_episode", "BaselineConfig",
    "activation_scheme", "sleep_scheme", "TrialReport", "build_report",
]
