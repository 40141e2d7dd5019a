"""Decoherence rates and adiabatic work for a small system coupled to a random-matrix bath.

Experiment functions accept a config as a path, a JSON string or a dict and
return decoded JSON reports.
"""

import json
import os

from ._core import (  # noqa: F401
    ConfigError,
    NumericalError,
    __version__,
    command_border,
    command_decay,
    command_full_suite,
    command_scaling,
    command_trend,
    command_work,
    config_hash as _config_hash,
    derive_seed,
    eig_hermitian,
    evolve_rdms,
    fit_gaussian_decay,
    goe_bath,
    lapack_eigensolver_active,
    partial_trace_env,
    perturbative_border,
    predict_decoherence_rate,
    predict_fgr_rate,
    spin_chain_bath,
    tensor,
)
from . import _core


def _config_text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, (str, os.PathLike)) and os.path.exists(config):
        with open(config, encoding="utf-8") as fh:
            return fh.read()
    if isinstance(config, str):
        return config
    raise TypeError("config must be a path, a JSON string or a dict")


def load_config(config):
    """Validate a config and return it as a dict."""
    text = _config_text(config)
    _core.validate_config(text)
    return json.loads(text)


def config_hash(config):
    return _config_hash(_config_text(config))


def run_decay(config, seed=None, epsilon=None):
    return json.loads(_core.run_decay(_config_text(config), seed, epsilon))


def run_border(config, seed=None):
    return json.loads(_core.run_border(_config_text(config), seed))


def run_scaling(config, workers=1):
    return json.loads(_core.run_scaling(_config_text(config), workers))


def run_work(config, seed=None, workers=1):
    return json.loads(_core.run_work(_config_text(config), seed, workers))


def run_window_trend(config, workers=1):
    return json.loads(_core.run_window_trend(_config_text(config), workers))


def self_test():
    """Run the synthetic self-test; returns (name, passed, detail) tuples."""
    return _core.self_test()
