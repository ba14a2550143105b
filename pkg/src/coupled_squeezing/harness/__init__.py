"""Scenario runner, parameter sweeps and command-line interface."""

from .config import ScenarioConfig, load_config, parse_config_text
from .scenario import RegimeWarning, ScenarioResult, prepare, run_scenario

__all__ = [
    "RegimeWarning",
    "ScenarioConfig",
    "ScenarioResult",
    "load_config",
    "parse_config_text",
    "prepare",
    "run_scenario",
]
