"""Readers for the files a solver run directory contains.

This package never imports the solver; these parsers are the contract. A run
directory holds:

functionals.csv   one header row naming the columns, one row of repr floats
                  per record time; a trailing ``# run failed: <reason>``
                  comment marks a run that stopped early.
config.echo       the fully resolved scenario in INI form.
snapshots/        ``<field>_t<time>.txt`` files: a ``# nx ny hx hy t field``
                  header, then ny rows of nx floats.
convergence.csv   a ``# observed_order=...`` comment, a header row, then
                  one ``nx,ny,hx,err_l2_u`` row per coarse grid.
"""

from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass

import numpy as np


class ArtifactError(RuntimeError):
    """An artifact file is missing or does not parse."""


@dataclass(frozen=True)
class FunctionalTable:
    """Column-oriented view of functionals.csv."""

    columns: dict[str, np.ndarray]
    failure: str | None = None

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise ArtifactError(
                f"no column {name!r}; available: {sorted(self.columns)}"
            ) from None

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    @property
    def t(self) -> np.ndarray:
        return self["t"]


def read_functionals(path: str) -> FunctionalTable:
    try:
        with open(path) as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ArtifactError(f"{path}: empty file")
    names = lines[0].split(",")
    if "t" not in names:
        raise ArtifactError(f"{path}: header has no 't' column: {lines[0]!r}")
    rows = []
    failure = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line.startswith("#"):
            if "run failed:" in line:
                failure = line.split("run failed:", 1)[1].strip()
            continue
        parts = line.split(",")
        if len(parts) != len(names):
            raise ArtifactError(f"{path}:{lineno}: expected {len(names)} "
                                f"columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ArtifactError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ArtifactError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    columns = {name: data[:, j] for j, name in enumerate(names)}
    return FunctionalTable(columns=columns, failure=failure)


@dataclass(frozen=True)
class RunConfig:
    """The scenario values the figures need, pulled from config.echo."""

    mu: float
    beta: float
    lx: float
    ly: float
    t_end: float


def read_run_config(path: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as handle:
            cp.read_file(handle, source=str(path))
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ArtifactError(f"{path}: malformed config echo: {exc}") from exc
    try:
        return RunConfig(
            mu=cp.getfloat("params", "mu"),
            beta=cp.getfloat("params", "beta"),
            lx=cp.getfloat("grid", "lx"),
            ly=cp.getfloat("grid", "ly"),
            t_end=cp.getfloat("controls", "t_end"),
        )
    except (configparser.Error, ValueError) as exc:
        raise ArtifactError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class SnapshotMeta:
    nx: int
    ny: int
    hx: float
    hy: float
    t: float
    field: str


def read_snapshot(path: str) -> tuple[SnapshotMeta, np.ndarray]:
    try:
        with open(path) as handle:
            header = handle.readline().rstrip("\n")
            if not header.startswith("# "):
                raise ArtifactError(f"{path}: missing snapshot header")
            parts = header[2:].split()
            if len(parts) != 6:
                raise ArtifactError(f"{path}: malformed snapshot header "
                                    f"{header!r}")
            meta = SnapshotMeta(nx=int(parts[0]), ny=int(parts[1]),
                                hx=float(parts[2]), hy=float(parts[3]),
                                t=float(parts[4]), field=parts[5])
            values = np.loadtxt(handle, dtype=np.float64, ndmin=2)
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ArtifactError(f"{path}: {exc}") from exc
    if values.shape != (meta.ny, meta.nx):
        raise ArtifactError(f"{path}: expected {(meta.ny, meta.nx)} values, "
                            f"got {values.shape}")
    return meta, values


_SNAPSHOT_NAME = re.compile(r"^([A-Za-z]\w*)_t([0-9eE+.\-]+)\.txt$")


def list_snapshots(run_dir: str) -> list[tuple[str, float, str]]:
    """(field, time, path) for every snapshot file under run_dir/snapshots."""
    snap_dir = os.path.join(run_dir, "snapshots")
    if not os.path.isdir(snap_dir):
        return []
    out = []
    for name in sorted(os.listdir(snap_dir)):
        match = _SNAPSHOT_NAME.match(name)
        if match is None:
            continue
        out.append((match.group(1), float(match.group(2)),
                    os.path.join(snap_dir, name)))
    return out


def nearest_snapshot(run_dir: str, field: str, t: float | None = None) -> str:
    """Path of the field's snapshot closest to t (latest when t is None)."""
    candidates = [(when, path) for name, when, path in list_snapshots(run_dir)
                  if name == field]
    if not candidates:
        raise ArtifactError(f"{run_dir}: no snapshots for field {field!r}")
    if t is None:
        return max(candidates)[1]
    return min(candidates, key=lambda item: abs(item[0] - t))[1]


@dataclass(frozen=True)
class ConvergenceStudy:
    observed_order: float | None
    t_horizon: float
    dt: float
    note: str
    nx: np.ndarray
    hx: np.ndarray
    err_l2_u: np.ndarray


_CONV_HEADER = re.compile(
    r"^# observed_order=(\S+) t_horizon=(\S+) dt=(\S+) note=(.*)$")


def read_convergence(path: str) -> ConvergenceStudy:
    try:
        with open(path) as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from exc
    if len(lines) < 3:
        raise ArtifactError(f"{path}: expected a comment, a header, and rows")
    match = _CONV_HEADER.match(lines[0])
    if match is None:
        raise ArtifactError(f"{path}: malformed study header {lines[0]!r}")
    order = float(match.group(1))
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ArtifactError(f"{path}:{lineno}: expected 4 columns")
        rows.append((int(parts[0]), float(parts[2]), float(parts[3])))
    if not rows:
        raise ArtifactError(f"{path}: no data rows")
    return ConvergenceStudy(
        observed_order=None if math.isnan(order) else order,
        t_horizon=float(match.group(2)),
        dt=float(match.group(3)),
        note=match.group(4),
        nx=np.array([r[0] for r in rows]),
        hx=np.array([r[1] for r in rows]),
        err_l2_u=np.array([r[2] for r in rows]),
    )
