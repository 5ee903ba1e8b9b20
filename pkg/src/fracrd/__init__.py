"""Reaction / spectral-fractional-diffusion solver on rectangles with Dirichlet data."""

from .config import PRESETS, ConfigError, RunConfig, parse_config, resolve
from .diagnostics import (
    DiagnosticRecord,
    dissipation_check,
    energy,
    range_monitor,
    stationarity_residual,
    superlevel_area,
    weighted_v_check,
)
from .grid import (
    Field,
    Grid2D,
    Space,
    dst1_forward,
    dst1_inverse,
    eigenvalues,
    first_eigenfunction,
)
from .initial import build_initial_condition
from .models import BistableModel, GrayScottModel, invariant_bounds, potential
from .operator import FractionalDiffusion, lift_to_homogeneous, unlift
from .phi import phi_eval
from .runner import run, sweep
from .stepper import (
    PhiTable,
    Scheme,
    SolverDivergenceError,
    StepperConfig,
    etdrk4_step,
    integrate,
)

__version__ = "0.1.0"
