"""Two-area AC/HVDC grid model with FDI vulnerability analysis and residual detectors.

Frequencies are exchanged in Hz, flows in p.u. Measurement matrices passed
to detectors (``Trajectory.y_tilde``) are in internal units (rad/s for
frequency channels), the same as the simulator produces.
"""

from ._core import (
    ConfigError,
    DegreeTooLowError,
    DetectorBank,
    InvalidArgument,
    Model,
    NumericalError,
    ResidualGenerator,
    Trajectory,
    check_detectable,
    disruptive_threshold,
    find_attack,
    load_config,
    simulate,
    step_load,
    stochastic_load,
    synth_bank,
)

__all__ = [
    "ConfigError",
    "DegreeTooLowError",
    "DetectorBank",
    "InvalidArgument",
    "Model",
    "NumericalError",
    "ResidualGenerator",
    "Trajectory",
    "check_detectable",
    "disruptive_threshold",
    "find_attack",
    "load_config",
    "simulate",
    "step_load",
    "stochastic_load",
    "synth_bank",
]
