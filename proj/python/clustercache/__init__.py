"""Python access to the clustercache core: planted profiles, AIC clustering,
SBS fraction allocation and hit-probability evaluation."""

import json

from . import _clustercache
from ._clustercache import (
    StageError,
    adaptive_cluster,
    analytic_hit,
    analytic_hit_baseline,
    optimize_fractions,
)

__all__ = [
    "StageError",
    "adaptive_cluster",
    "analytic_hit",
    "analytic_hit_baseline",
    "optimize_fractions",
    "resolved_config",
    "generate",
    "monte_carlo_hit",
    "run_pipeline",
]


def _dump(config):
    return "" if config is None else json.dumps(config)


def resolved_config(config=None):
    """Defaults with `config` (a dict shaped like the CLI's JSON) applied."""
    return json.loads(_clustercache.resolved_config(_dump(config)))


def generate(config=None):
    """Returns (profiles, planted_membership)."""
    return _clustercache.generate(_dump(config))


def monte_carlo_hit(profiles, sets, fractions, n_trials, seed, config=None):
    return _clustercache.monte_carlo_hit(profiles, sets, fractions, n_trials, seed, _dump(config))


def run_pipeline(config, out_dir):
    """Runs the full sweep and returns the paths of the CSV files written."""
    return [str(p) for p in _clustercache.run_pipeline(_dump(config), str(out_dir))]
