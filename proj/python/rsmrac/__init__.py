"""Robust safe MRAC: simulator, safety filters and SOCP solver."""

import json as _json

from ._rsmrac import (
    ModelError,
    __version__,
    cmd_compare,
    cmd_run,
    config_fingerprint,
    default_config,
    is_hurwitz,
    oracle_check,
    qp_single_constraint,
    socp_oracle,
    socp_solve,
    solve_lyapunov,
)
from ._rsmrac import run as _run


def run(config=None, filter=""):
    """Simulate one scenario. `config` may be a dict, a JSON string or None."""
    if config is None:
        text = ""
    elif isinstance(config, dict):
        text = _json.dumps(config)
    else:
        text = str(config)
    return _run(text, filter)


__all__ = [
    "ModelError",
    "cmd_compare",
    "cmd_run",
    "config_fingerprint",
    "default_config",
    "is_hurwitz",
    "oracle_check",
    "qp_single_constraint",
    "run",
    "socp_oracle",
    "socp_solve",
    "solve_lyapunov",
]
