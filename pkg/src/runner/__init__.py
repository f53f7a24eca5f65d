# src/runner/__init__.py

from .settings import (EXPERIMENT_NAMES, ExperimentConfig, canonical_text, load_config,
                       parse_config, validate_config)
from .pool import chunk_bounds, map_replicas
from .report import CheckList, RunReport, csv_bytes, report_frame, versions, write_report
from .experiments import EXPERIMENTS, run_experiment, within
from .replay import load_manifest, replay

__all__ = [
    "EXPERIMENT_NAMES",
    "ExperimentConfig",
    "canonical_text",
    "load_config",
    "parse_config",
    "validate_config",
    "chunk_bounds",
    "map_replicas",
    "CheckList",
    "RunReport",
    "csv_bytes",
    "report_frame",
    "versions",
    "write_report",
    "EXPERIMENTS",
    "run_experiment",
    "within",
    "load_manifest",
    "replay",
]
