"""Experiment configuration, sweeps, verification and reports."""

from .config import ExperimentConfig, config_from_dict, load_config
from .sweep import RateFit, RateRecord, SweepResult, fit_rate, run_sweep
from .verify import verify_theorem1

__all__ = ["ExperimentConfig", "config_from_dict", "load_config", "RateFit",
           "RateRecord", "SweepResult", "fit_rate", "run_sweep",
           "verify_theorem1"]
