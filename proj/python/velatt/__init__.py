"""Velocity-aided attitude observers on SO(3): simulation and verification."""

import json as _json

from ._velatt import (
    ConfigError,
    ContractViolation,
    NumericalFailure,
    ObserverGains,
    build_tag,
    equilibria,
    euler_from_rotation,
    exp_rotation,
    gamma_error_field,
    innovation,
    linearized_poles,
    lyapunov_L0,
    lyapunov_L1,
    lyapunov_S0,
    orthonormalize,
    parse_config,
    reference_config,
    rotation_angle,
    rotation_from_euler,
    skew,
    step_full,
    validate_gains,
)
from ._velatt import run_scenario as _run_scenario
from ._velatt import verify as _verify


def run_scenario(config):
    """Run a scenario given as a JSON string or a dict; returns numpy traces."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_scenario(config)


def verify(suite, samples=100, seed=7, dt=1e-3):
    """Run a property suite; returns the parsed report."""
    return _json.loads(_verify(suite, samples, seed, dt))


__all__ = [
    "ConfigError",
    "ContractViolation",
    "NumericalFailure",
    "ObserverGains",
    "build_tag",
    "equilibria",
    "euler_from_rotation",
    "exp_rotation",
    "gamma_error_field",
    "innovation",
    "linearized_poles",
    "lyapunov_L0",
    "lyapunov_L1",
    "lyapunov_S0",
    "orthonormalize",
    "parse_config",
    "reference_config",
    "rotation_angle",
    "rotation_from_euler",
    "run_scenario",
    "skew",
    "step_full",
    "validate_gains",
    "verify",
]
