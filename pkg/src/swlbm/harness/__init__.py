"""Case configuration, execution, metrics, output and the command line."""
from .config import CaseConfig, ConfigError, config_from_dict, load_config, parse_config
from .metrics import MetricUnavailable, l1_error
from .runner import OUTPUT_ENV, RunReport, run_case

__all__ = [
    "OUTPUT_ENV",
    "CaseConfig",
    "ConfigError",
    "MetricUnavailable",
    "RunReport",
    "config_from_dict",
    "l1_error",
    "load_config",
    "parse_config",
    "run_case",
]
