"""1D two-phase compressible flow: a pressureless-coupling Euler phase and a
viscous phase exchanging momentum through drag, plus the linear spectral
workbench for the associated 4x4 Fourier symbol."""

__version__ = "0.1.0"

from .state import (  # noqa: F401
    FlowState, Grid1D, ModelParams, PositivityError, SymmetrizedState,
    desymmetrize, pressure, sound_speed, symmetrize,
)
from .solver import SchemeConfig, cfl_dt, rhs, run, step  # noqa: F401
from .diagnostics import NormSeries, NormVector  # noqa: F401
from .config import (  # noqa: F401
    ConfigError, ExperimentConfig, parse_config, save_config, serialize,
)
from .initial import make_initial_data  # noqa: F401
from .experiments import run_experiment  # noqa: F401
