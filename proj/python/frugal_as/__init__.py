"""Python bindings for the frugal algorithm-selection library."""

from ._core import (
    ConfigError,
    DataError,
    Error,
    ParseError,
    RandomForest,
    Scenario,
    ScenarioStats,
    entropy,
    least_confidence,
    load_scenario,
    make_splits,
    make_synthetic_scenario,
    margin,
    par10,
    read_step_logs,
    run_loop,
    run_passive_baseline,
    scenario_stats,
    summarize,
    write_scenario,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "ParseError",
    "RandomForest",
    "Scenario",
    "ScenarioStats",
    "entropy",
    "least_confidence",
    "load_scenario",
    "make_splits",
    "make_synthetic_scenario",
    "margin",
    "par10",
    "read_step_logs",
    "run_loop",
    "run_passive_baseline",
    "scenario_stats",
    "summarize",
    "write_scenario",
]
