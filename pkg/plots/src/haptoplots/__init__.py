"""Figures for solver run artifacts; reads files, never imports the solver."""

__version__ = "0.1.0"

from .artifacts import (
    ArtifactError,
    ConvergenceStudy,
    FunctionalTable,
    RunConfig,
    SnapshotMeta,
    list_snapshots,
    nearest_snapshot,
    read_convergence,
    read_functionals,
    read_run_config,
    read_snapshot,
)
from .figures import (
    ExponentialFit,
    fit_exponential,
    plot_convergence,
    plot_decay,
    plot_heatmap,
)

__all__ = [
    "ArtifactError",
    "ConvergenceStudy",
    "ExponentialFit",
    "FunctionalTable",
    "RunConfig",
    "SnapshotMeta",
    "fit_exponential",
    "list_snapshots",
    "nearest_snapshot",
    "plot_convergence",
    "plot_decay",
    "plot_heatmap",
    "read_convergence",
    "read_functionals",
    "read_run_config",
    "read_snapshot",
]
