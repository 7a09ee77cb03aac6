"""Finite-difference simulator for a four-field haptotaxis virotherapy model.

The system couples tumor cells (u), extracellular matrix (v), infected cells
(w), and free virus (z) on a rectangle with zero-flux boundaries. The package
provides the discretized stepper (compiled core with a pure-numpy fallback),
functional diagnostics, property-check suites for the proven qualitative
behavior, and a CLI for runs, checks, sweeps, and convergence studies.
"""

from .backend import available as available_backends
from .backend import resolve as resolve_backend
from .backend import selected_name as selected_backend
from .diagnostics import (
    CheckLine,
    CheckReport,
    FunctionalRecord,
    compute_functionals,
    fit_decay_rate,
    record_series,
    run_suite,
)
from .errors import (
    ConfigError,
    FieldError,
    NumericalError,
    SimulationError,
    StabilityFloorWarning,
    StepRejected,
)
from .harness import (
    BumpSpec,
    InitialRecipe,
    OutputPlan,
    ScenarioConfig,
    build_initial_state,
    converge,
    ode_oracle,
    reference_scenario,
    sweep,
)
from .model import Grid, Parameters, State, equilibrium_residual, transform_a
from .timestepper import (
    RunResult,
    StepControls,
    Telemetry,
    run,
    run_fixed_dt,
    stable_dt,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BumpSpec",
    "CheckLine",
    "CheckReport",
    "ConfigError",
    "FieldError",
    "FunctionalRecord",
    "Grid",
    "InitialRecipe",
    "NumericalError",
    "OutputPlan",
    "Parameters",
    "RunResult",
    "ScenarioConfig",
    "SimulationError",
    "StabilityFloorWarning",
    "State",
    "StepControls",
    "StepRejected",
    "Telemetry",
    "available_backends",
    "build_initial_state",
    "compute_functionals",
    "converge",
    "equilibrium_residual",
    "fit_decay_rate",
    "ode_oracle",
    "reference_scenario",
    "record_series",
    "resolve_backend",
    "run",
    "run_fixed_dt",
    "run_suite",
    "selected_backend",
    "stable_dt",
    "step",
    "sweep",
    "transform_a",
    "__version__",
]
