"""Experiment harness: configuration, verification suites, descent runs,
CSV persistence, and the command-line interface."""

from ..oracle import fd_natural_gradient
from .cli import cli_main, main
from .config import ExperimentConfig, build_config, load_config_file, validate_config
from .suite import (
    SuiteItem,
    SuiteReport,
    report_lines,
    run_invariance_suite,
    suite_csv,
    write_suite_csv,
)
from .trajectory import (
    TrajectoryRecord,
    run_trajectory,
    trajectory_csv,
    write_trajectory_csv,
)

__all__ = [
    "ExperimentConfig",
    "SuiteItem",
    "SuiteReport",
    "TrajectoryRecord",
    "build_config",
    "cli_main",
    "fd_natural_gradient",
    "load_config_file",
    "main",
    "report_lines",
    "run_invariance_suite",
    "run_trajectory",
    "suite_csv",
    "trajectory_csv",
    "validate_config",
    "write_suite_csv",
    "write_trajectory_csv",
]
