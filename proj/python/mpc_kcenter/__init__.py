"""Simulated-MPC k-center clustering with LSH nearest-hub search."""

import json

from ._core import (
    KCenterError,
    brute_force_opt,
    center_count_threshold,
    cost,
    generate_planted,
    gonzalez,
    iter_log,
    log_star,
    normalize,
    search,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "KCenterError",
    "brute_force_opt",
    "center_count_threshold",
    "cost",
    "generate_planted",
    "gonzalez",
    "iter_log",
    "log_star",
    "normalize",
    "run_experiment",
    "search",
]


def run_experiment(config):
    """Run one experiment. `config` is a dict with the CLI option names as keys."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return json.loads(_run_experiment(config))
