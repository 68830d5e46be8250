"""Phased-array acoustic manipulation: field model, phase solver, closed loop."""

import json

from ._core import (
    DEGREE_STEP,
    ArrayGeometry,
    ConfigError,
    DegeneratePointError,
    DimensionError,
    Error,
    InvalidArgumentError,
    IoError,
    NonConvergenceError,
    UnachievableTargetError,
    alignment_bound,
    alignment_phases,
    field_pressure,
    field_scan,
    pressure_sq_and_gradient,
    quantize_phases,
    solve_focus,
    verify_local_max,
)
from . import _core

__all__ = [
    "DEGREE_STEP",
    "ArrayGeometry",
    "ConfigError",
    "DegeneratePointError",
    "DimensionError",
    "Error",
    "InvalidArgumentError",
    "IoError",
    "NonConvergenceError",
    "UnachievableTargetError",
    "alignment_bound",
    "alignment_phases",
    "default_config",
    "field_pressure",
    "field_scan",
    "pressure_sq_and_gradient",
    "quantize_phases",
    "run_loop",
    "simulate",
    "solve_focus",
    "verify_local_max",
]


def default_config(scenario="fb"):
    """Default loop config for scenario "fb" or "bs" as a dict."""
    return json.loads(_core.default_config_json(scenario))


def run_loop(config=None):
    """Run the closed loop; returns per-period arrays and a "summary" dict.

    `config` is a (possibly partial) config dict; missing keys take the
    scenario defaults.
    """
    return _core.run_loop_json(json.dumps(config or {}))


def simulate(config, csv_path, summary_path):
    """Run the closed loop and write the CSV log and JSON summary."""
    return _core.simulate_to_files(json.dumps(config or {}), str(csv_path), str(summary_path))
