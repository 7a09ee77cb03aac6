"""Core data types and pointwise operations for the four-field model.

The model couples tumor cells u, extracellular matrix v, infected cells w,
and virions z:

    u_t = div(grad u - u grad v) - u z + mu u (1 - u)
    v_t = -(u + w) v
    w_t = d_w lap w - w + u z
    z_t = d_z lap z - z - u z + beta w

on a rectangle with zero normal flux for u (combined flux) and for w, z.
Fields are stored as (ny, nx) row-major float64 arrays on cell centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FieldError

FIELD_NAMES = ("u", "v", "w", "z")


def _require(cond: bool, key: str, constraint: str, value) -> None:
    if not cond:
        raise ValueError(f"{key}: must be {constraint} (got {value!r})")


@dataclass(frozen=True)
class Parameters:
    """Model constants.

    mu    logistic proliferation rate of u (>= 0)
    beta  virion replication ratio (>= 0); beta < 1 is the decay regime
    d_w   diffusivity of infected cells (> 0)
    d_z   diffusivity of virions (> 0)
    """

    mu: float = 1.0
    beta: float = 0.5
    d_w: float = 1.0
    d_z: float = 1.0

    def __post_init__(self):
        _require(math.isfinite(self.mu) and self.mu >= 0.0, "mu", "finite and >= 0", self.mu)
        _require(math.isfinite(self.beta) and self.beta >= 0.0, "beta", "finite and >= 0", self.beta)
        _require(math.isfinite(self.d_w) and self.d_w > 0.0, "d_w", "finite and > 0", self.d_w)
        _require(math.isfinite(self.d_z) and self.d_z > 0.0, "d_z", "finite and > 0", self.d_z)


@dataclass(frozen=True)
class Grid:
    """Cell-centered rectangular grid on [0, lx] x [0, ly].

    Spacings and cell area are derived from (nx, ny, lx, ly), so the identity
    nx*ny*cell_area = lx*ly holds by construction.
    """

    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        _require(isinstance(self.nx, int) and self.nx >= 2, "nx", "an integer >= 2", self.nx)
        _require(isinstance(self.ny, int) and self.ny >= 2, "ny", "an integer >= 2", self.ny)
        _require(math.isfinite(self.lx) and self.lx > 0.0, "lx", "finite and > 0", self.lx)
        _require(math.isfinite(self.ly) and self.ly > 0.0, "ly", "finite and > 0", self.ly)

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.total_area / (self.nx * self.ny)

    @property
    def total_area(self) -> float:
        return self.lx * self.ly

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays (x of shape (nx,), y of shape (ny,))."""
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return x, y


def ensure_field(values, grid: Grid, name: str) -> np.ndarray:
    """Validate one field: shape (ny, nx), float64, every entry finite.

    Returns a C-contiguous float64 view/copy. Raises FieldError naming the
    field and the first offending cell.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.shape != grid.shape:
        raise FieldError(
            f"field {name}: expected shape {grid.shape} for this grid, got {arr.shape}"
        )
    if not np.isfinite(arr).all():
        j, i = np.argwhere(~np.isfinite(arr))[0]
        raise FieldError(
            f"field {name}: non-finite value {arr[j, i]!r} at cell (ix={i}, iy={j})"
        )
    return arr


@dataclass
class State:
    """Simulation state at time t: the four fields on one grid."""

    t: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    z: np.ndarray

    def fields(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.u, self.v, self.w, self.z

    def copy(self) -> "State":
        return State(self.t, self.u.copy(), self.v.copy(), self.w.copy(), self.z.copy())


def validate_state(state: State, grid: Grid) -> State:
    """Check shapes, finiteness, and sign constraints (u > 0; v, w, z >= 0).

    Returns the state with fields normalized to contiguous float64 arrays.
    """
    u = ensure_field(state.u, grid, "u")
    v = ensure_field(state.v, grid, "v")
    w = ensure_field(state.w, grid, "w")
    z = ensure_field(state.z, grid, "z")
    if u.min() <= 0.0:
        j, i = np.argwhere(u <= 0.0)[0]
        raise FieldError(f"field u: must be strictly positive, got {u[j, i]!r} at cell (ix={i}, iy={j})")
    for name, arr in (("v", v), ("w", w), ("z", z)):
        if arr.min() < 0.0:
            j, i = np.argwhere(arr < 0.0)[0]
            raise FieldError(
                f"field {name}: must be nonnegative, got {arr[j, i]!r} at cell (ix={i}, iy={j})"
            )
    return State(state.t, u, v, w, z)


def reaction_rhs(state: State, params: Parameters):
    """Zero-order (reaction) parts of the right-hand side, evaluated pointwise.

    Returns (du, dv, dw, dz) with
        du = mu u (1 - u) - u z
        dv = -(u + w) v
        dw = u z - w
        dz = beta w - z - u z
    Transport terms are deliberately excluded; they live in discretization.
    """
    u, v, w, z = state.fields()
    for name, arr in zip(FIELD_NAMES, state.fields()):
        if not np.isfinite(arr).all():
            j, i = np.argwhere(~np.isfinite(arr))[0]
            raise FieldError(
                f"field {name}: non-finite value {arr[j, i]!r} at cell (ix={i}, iy={j})"
            )
    uz = u * z
    du = params.mu * u * (1.0 - u) - uz
    dv = -(u + w) * v
    dw = uz - w
    dz = params.beta * w - z - uz
    return du, dv, dw, dz


def transform_a(state: State) -> np.ndarray:
    """The weighted density a = u * exp(-v).

    a satisfies a transformed equation without the cross-diffusion term; the
    diagnostics (Lyapunov functional, Dirichlet energy) are written in terms
    of a. Requires u > 0 everywhere.
    """
    u, v = state.u, state.v
    if u.min() <= 0.0:
        j, i = np.argwhere(u <= 0.0)[0]
        raise FieldError(
            f"field u: transform_a requires u > 0, got {u[j, i]!r} at cell (ix={i}, iy={j})"
        )
    return u * np.exp(-v)


def equilibrium_residual(state: State) -> float:
    """Distance from the infection-cleared steady state (1, 0, 0, 0).

    Measured as the max of the four sup-norms ||u-1||, ||v||, ||w||, ||z||.
    """
    ru = float(np.abs(state.u - 1.0).max())
    rv = float(np.abs(state.v).max())
    rw = float(np.abs(state.w).max())
    rz = float(np.abs(state.z).max())
    return max(ru, rv, rw, rz)
