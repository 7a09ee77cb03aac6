"""Session fixtures that build real run directories through the solver CLI.

The solver is exercised only as an installed command; nothing here imports
it. One reference run (t_end = 60, snapshots at 0 and 60) and one small
convergence study are shared by every test that needs real artifacts.
"""

import subprocess

import pytest

REFERENCE_CFG = """\
[params]
mu = 1.0
beta = 0.5

[grid]
nx = 64
ny = 64

[controls]
t_end = 60.0

[outputs]
cadence = 0.1
snapshot_times = 0.0, 60.0
"""

STUDY_CFG = """\
[controls]
t_end = 1.0
"""


def _solver(args):
    proc = subprocess.run(["haptosim", *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"haptosim {' '.join(args)} failed "
                           f"({proc.returncode}):\n{proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def reference_run_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("reference")
    cfg = base / "scenario.cfg"
    cfg.write_text(REFERENCE_CFG)
    out = base / "run"
    _solver(["run", "--config", str(cfg), "--out", str(out)])
    return str(out)


@pytest.fixture(scope="session")
def study_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("study")
    cfg = base / "scenario.cfg"
    cfg.write_text(STUDY_CFG)
    out = base / "conv"
    _solver(["converge", "--config", str(cfg), "--grids", "16,32,64",
             "--t-horizon", "0.2", "--out", str(out)])
    return str(out)
