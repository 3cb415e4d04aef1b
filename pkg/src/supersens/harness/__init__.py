"""Experiment presets, configuration files, runners and the CLI."""

from .config import ConfigError, Control, Dimension, Discretization, ExperimentConfig, Output, Physics
from .output import emit_csv, emit_plot_script, emit_snapshot
from .presets import TABLE_IDS, UnknownPresetError, all_presets, preset, table
from .runner import RunRecord, all_converged, run, sweep

__all__ = [
    "ConfigError", "Control", "Dimension", "Discretization", "ExperimentConfig", "Output",
    "Physics", "emit_csv", "emit_plot_script", "emit_snapshot", "TABLE_IDS",
    "UnknownPresetError", "all_presets", "preset", "table", "RunRecord", "all_converged",
    "run", "sweep",
]
