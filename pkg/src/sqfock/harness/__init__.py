"""Experiment recipes, configuration handling, and CSV result bundles."""

from .bundle import ResultBundle, Table
from .config import EXPERIMENT_NAMES, ExperimentConfig, config_as_sections, load_config, load_preset
from .experiments import RECIPES, run_experiment

__all__ = [
    "EXPERIMENT_NAMES",
    "ExperimentConfig",
    "RECIPES",
    "ResultBundle",
    "Table",
    "config_as_sections",
    "load_config",
    "load_preset",
    "run_experiment",
]
