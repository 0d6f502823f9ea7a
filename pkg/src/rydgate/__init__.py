"""Two-atom Rydberg-blockade gate simulation and analytic error budgets.

Modules
-------
params      constants, species/level/laser/environment data, config files
blockade    blockade shift B(R) models and collective Rabi enhancement
budget      closed-form intrinsic and technical error terms, dephasing times
dynamics    Lindblad simulation of the C_Z, CNOT and amplitude-swap protocols
montecarlo  shot-level Ramsey, Bell-state and parity-scan simulation
cli         the ``rydgate`` command line front end
"""

from importlib.metadata import PackageNotFoundError, version

from .errors import ConfigError, ConvergenceError, FitError, RydgateError, StepTooCoarseError
from .params import ExperimentConfig, load_config, loads_config, dump_config

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConvergenceError", "FitError", "RydgateError", "StepTooCoarseError",
    "ExperimentConfig", "load_config", "loads_config", "dump_config", "__version__",
]
