"""Batch experiments, verification suite and SVG rendering."""

from .config import ExperimentConfig, load_config, parse_config
from .render import render_trace_svg
from .runner import TrialRow, TrialStats, parse_csv, run_trial, run_trials
from .verify import Check, run_suite

__all__ = [
    "Check", "ExperimentConfig", "TrialRow", "TrialStats", "load_config", "parse_config",
    "parse_csv", "render_trace_svg", "run_suite", "run_trial", "run_trials",
]
