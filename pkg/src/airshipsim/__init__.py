"""airshipsim: 6-DOF airship simulation with a unified BS/SMC/BSMC
control family."""

from .kernels import BACKEND, NUMBA_ENABLED
from .model import (
    AirshipParams,
    BodyState,
    Fa1Coefficients,
    NonUnitQuaternion,
    Pose,
    Wrench,
    default_params,
)
from .control import ErrorState, GainSet, RankDeficientT, default_gains
from .sim import (
    ConfigError,
    NumericalBlowup,
    ScenarioConfig,
    TimeSeriesLog,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AirshipParams",
    "BACKEND",
    "BodyState",
    "ConfigError",
    "ErrorState",
    "Fa1Coefficients",
    "GainSet",
    "NonUnitQuaternion",
    "NUMBA_ENABLED",
    "NumericalBlowup",
    "Pose",
    "RankDeficientT",
    "ScenarioConfig",
    "TimeSeriesLog",
    "Wrench",
    "default_gains",
    "default_params",
    "run_scenario",
    "__version__",
]
