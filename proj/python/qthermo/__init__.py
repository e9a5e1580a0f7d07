"""Three-level transmon thermometry from thermal-state readout sequences."""

import json as _json

from ._qthermo import *  # noqa: F401,F403
from ._qthermo import _bias_study, _estimate, _run_pipeline, default_config_json


def _config_text(config):
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config():
    """Every configuration field with its default value."""
    return _json.loads(default_config_json())


def simulate(config=None):
    """Runs the full pipeline and returns the estimate, populations and calibration."""
    return _json.loads(_run_pipeline(_config_text(config)))


def estimate(traces, f_ge_ghz, f_gf_ghz, config=None):
    """Estimates the temperature from six labelled traces.

    traces maps a sequence label to (t_ns, I, Q) sequences.
    """
    rows = [(label, list(t), list(i), list(q)) for label, (t, i, q) in traces.items()]
    return _json.loads(_estimate(rows, f_ge_ghz, f_gf_ghz, _config_text(config)))


def bias_study(config=None):
    """Slope bias curve and the resulting temperature discrepancy."""
    return _json.loads(_bias_study(_config_text(config)))
