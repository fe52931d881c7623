"""Experiment harness: configuration, orchestration, ingestion and reporting."""

from .config import ExperimentConfig, ExperimentKind, load_config, parse_config, preset_names
from .experiment import ResultRow, run_experiment
from .io import load_csv
from .report import emit_report

__all__ = [
    "ExperimentConfig",
    "ExperimentKind",
    "ResultRow",
    "emit_report",
    "load_config",
    "load_csv",
    "parse_config",
    "preset_names",
    "run_experiment",
]
