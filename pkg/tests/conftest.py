"""Shared fixtures. The expensive adaptive runs are session-scoped so the
acceptance criteria that read the same trajectory (stabilization, u floor,
Lyapunov budget, decay envelope) pay for it once.
"""

from dataclasses import replace

import pytest

from haptosim.harness import reference_scenario
from haptosim.timestepper import run


def _default_scenario(beta: float, t_end: float):
    cfg = reference_scenario()
    return replace(
        cfg,
        params=replace(cfg.params, beta=beta),
        controls=replace(cfg.controls, t_end=t_end),
        outputs=replace(cfg.outputs, snapshot_times=()),
    )


@pytest.fixture(scope="session")
def reference_config():
    return reference_scenario()


@pytest.fixture(scope="session")
def reference_run(reference_config):
    """The reference scenario, integrated to t_end=60 with snapshots."""
    return run(reference_config)


@pytest.fixture(scope="session")
def decay_runs(reference_config, reference_run):
    """(config, result) per beta for the decay-envelope criterion."""
    out = {0.5: (reference_config, reference_run)}
    for beta in (0.25, 0.9):
        cfg = _default_scenario(beta, 60.0)
        out[beta] = (cfg, run(cfg))
    return out


@pytest.fixture(scope="session")
def boundedness_runs():
    """(config, result) per beta on the long horizon for the trend criterion."""
    out = {}
    for beta in (0.5, 2.0, 5.0):
        cfg = _default_scenario(beta, 100.0)
        out[beta] = (cfg, run(cfg))
    return out
