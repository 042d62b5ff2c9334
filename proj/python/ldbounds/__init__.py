"""Large-deviation bounds for location-shift families."""

import json

from ._core import (
    ConfigError,
    DensityFamily,
    DivergenceError,
    InsufficientEvents,
    NonConvergence,
    UnsupportedFamily,
    beta_fn,
    chernoff_test_rate,
    classify,
    closed_form_bounds,
    closed_form_isg,
    digamma,
    estimate,
    fisher_information,
    hoeffding_rate,
    ladder_bounds,
    lemma_suite,
    log_gamma,
    make_family,
    make_registered,
    mc_tail_rate,
    renyi_divergence,
    run_config,
    scaled_limit,
    solve_t0,
    t0_residual,
)


def run(command, config):
    """Run a CLI table from a config dict (or JSON text); returns a list of row dicts."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return run_config(command, config)


__all__ = [name for name in dir() if not name.startswith("_")]
