import math
from dataclasses import replace

import numpy as np
import pytest

from haptosim.harness import (
    BumpSpec,
    InitialRecipe,
    OutputPlan,
    ScenarioConfig,
    build_initial_state,
    converge,
    equilibrium_preset,
    homogeneous_preset,
    mu_zero_exploratory,
    ode_oracle,
    reference_scenario,
    sweep,
)
from haptosim.model import Grid, Parameters


class TestRecipes:
    def test_equilibrium(self):
        g = Grid(nx=6, ny=4)
        s = build_initial_state(InitialRecipe(kind="equilibrium"), g)
        assert np.all(s.u == 1.0)
        assert np.all(s.v == 0.0) and np.all(s.w == 0.0) and np.all(s.z == 0.0)
        assert s.t == 0.0

    def test_homogeneous(self):
        g = Grid(nx=4, ny=4)
        r = InitialRecipe(kind="homogeneous", u0=0.5, v0=0.3, w0=0.2, z0=0.1)
        s = build_initial_state(r, g)
        assert np.all(s.u == 0.5) and np.all(s.v == 0.3)
        assert np.all(s.w == 0.2) and np.all(s.z == 0.1)

    def test_homogeneous_sign_validation(self):
        g = Grid(nx=4, ny=4)
        with pytest.raises(ValueError, match="u0"):
            build_initial_state(InitialRecipe(kind="homogeneous", u0=0.0), g)
        with pytest.raises(ValueError, match="w0"):
            build_initial_state(InitialRecipe(kind="homogeneous", w0=-0.1), g)

    def test_gaussian_bumps_peak_location(self):
        g = Grid(nx=64, ny=64)
        s = build_initial_state(InitialRecipe(kind="gaussian-bumps"), g)
        j, i = np.unravel_index(np.argmax(s.u), g.shape)
        x, y = g.cell_centers()
        assert abs(x[i] - 0.5) <= g.hx and abs(y[j] - 0.5) <= g.hy
        assert s.u.max() == pytest.approx(1.1, abs=1e-3)
        assert s.u.min() > 0.0 and s.w.min() >= 0.0

    def test_gaussian_bumps_positivity_validation(self):
        g = Grid(nx=16, ny=16)
        bad = InitialRecipe(kind="gaussian-bumps",
                            u_bump=BumpSpec(0.0, -1.0, 0.5, 0.5, 0.2))
        with pytest.raises(ValueError, match="u_bump"):
            build_initial_state(bad, g)

    def test_perturbed_homogeneous_seeded(self):
        g = Grid(nx=8, ny=8)
        r = InitialRecipe(kind="perturbed-homogeneous", u0=1.0, v0=0.2,
                          w0=0.0, z0=0.0, noise_amp=0.1)
        a = build_initial_state(r, g, seed=7)
        b = build_initial_state(r, g, seed=7)
        c = build_initial_state(r, g, seed=8)
        np.testing.assert_array_equal(a.u, b.u)
        assert not np.array_equal(a.u, c.u)
        # one-sided noise: base is a floor
        assert a.u.min() >= 1.0 and a.u.max() <= 1.1
        assert a.w.min() >= 0.0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="kind"):
            InitialRecipe(kind="plane-wave")

    def test_bump_spec_validation(self):
        with pytest.raises(ValueError, match="sigma"):
            BumpSpec(0.0, 1.0, 0.5, 0.5, 0.0)


class TestOutputPlan:
    def test_defaults(self):
        o = OutputPlan()
        assert o.cadence == 0.1 and o.snapshot_times == ()

    @pytest.mark.parametrize("kwargs,key", [
        (dict(cadence=0.0), "cadence"),
        (dict(p=0.5), "p"),
        (dict(delta_floor=0.0), "delta_floor"),
        (dict(snapshot_times=(-1.0,)), "snapshot_times"),
    ])
    def test_validation(self, kwargs, key):
        with pytest.raises(ValueError, match=key):
            OutputPlan(**kwargs)


class TestPresets:
    def test_reference_scenario_shape(self):
        cfg = reference_scenario()
        assert cfg.grid.shape == (64, 64)
        assert cfg.params.beta == 0.5 and cfg.params.mu == 1.0
        assert cfg.controls.t_end == 60.0
        assert cfg.outputs.snapshot_times == (0.0, 60.0)

    def test_other_presets_valid(self):
        assert equilibrium_preset(10.0).controls.t_end == 10.0
        cfg = homogeneous_preset()
        assert cfg.initial.kind == "homogeneous"
        assert mu_zero_exploratory().params.mu == 0.0


class TestOdeOracle:
    def test_validates_inputs(self):
        p = Parameters()
        with pytest.raises(ValueError, match="dt_ref"):
            ode_oracle((1.0, 0.0, 0.0, 0.0), p, 1.0, dt_ref=0.01)
        with pytest.raises(ValueError, match="u"):
            ode_oracle((0.0, 0.0, 0.0, 0.0), p, 1.0)
        with pytest.raises(ValueError, match="t_end"):
            ode_oracle((1.0, 0.0, 0.0, 0.0), p, 0.0)

    def test_equilibrium_is_fixed(self):
        tr = ode_oracle((1.0, 0.0, 0.0, 0.0), Parameters(), 1.0, dt_ref=1e-3)
        np.testing.assert_array_equal(tr.final, [1.0, 0.0, 0.0, 0.0])

    def test_sampling_grid(self):
        tr = ode_oracle((0.5, 0.3, 0.2, 0.1), Parameters(), 1.0,
                        dt_ref=1e-3, sample_dt=0.25)
        np.testing.assert_allclose(tr.t, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-12)
        assert tr.y.shape == (5, 4)

    def test_long_run_reaches_equilibrium(self):
        # by t=40 the decay regime has collapsed the trajectory onto (1,0,0,0)
        tr = ode_oracle((0.5, 0.3, 0.2, 0.1), Parameters(mu=1.0, beta=0.5),
                        40.0, dt_ref=1e-4, sample_dt=0.1)
        u, v, w, z = tr.final
        assert max(abs(u - 1.0), abs(v), abs(w), abs(z)) <= 1e-9

    def test_two_reference_steps_agree(self):
        # RK4 at dt and dt/2 must agree to ~dt^4: the reference is converged
        a = ode_oracle((0.5, 0.3, 0.2, 0.1), Parameters(), 10.0, dt_ref=1e-4)
        b = ode_oracle((0.5, 0.3, 0.2, 0.1), Parameters(), 10.0, dt_ref=5e-5)
        assert np.abs(a.y - b.y).max() <= 1e-12

    def test_late_decay_rate_matches_slowest_eigenvalue(self):
        # oracle for the oracle: the linearization at (1,0,0,0) has slowest
        # eigenvalue -(3 - sqrt(3))/2 for mu=1, beta=0.5; the fitted tail
        # rate of z must match it
        p = Parameters(mu=1.0, beta=0.5)
        tr = ode_oracle((0.5, 0.3, 0.2, 0.1), p, 35.0, dt_ref=1e-4, sample_dt=0.1)
        jac = np.array([
            [-1.0, 0.0, 0.0, -1.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 1.0],
            [0.0, 0.0, 0.5, -2.0],
        ])
        slow = float(np.linalg.eigvals(jac).real.max())
        assert slow == pytest.approx(-(3.0 - math.sqrt(3.0)) / 2.0, abs=1e-12)
        mask = (tr.t >= 20.0)
        rate = -np.polyfit(tr.t[mask], np.log(tr.y[mask, 3]), 1)[0]
        assert rate == pytest.approx(-slow, abs=0.02)


class TestSweep:
    def _tiny(self):
        cfg = homogeneous_preset(t_end=1.0, nx=8)
        return replace(cfg, outputs=replace(cfg.outputs, cadence=0.05))

    def test_rows_cover_values(self):
        rep = sweep(self._tiny(), "beta", [0.25, 2.0])
        assert rep.param == "beta"
        assert [r.value for r in rep.rows] == [0.25, 2.0]
        assert [r.beta_lt_1 for r in rep.rows] == [True, False]
        assert all(r.status == "ok" for r in rep.rows)
        assert all(r.final_t == 1.0 for r in rep.rows)

    def test_failed_value_does_not_stop_sweep(self):
        cfg = self._tiny()
        cfg = replace(cfg, controls=replace(cfg.controls, max_steps_per_segment=2))
        rep = sweep(cfg, "mu", [1.0, 2.0])
        assert [r.status for r in rep.rows] == ["failed", "failed"]
        assert all("step budget" in r.error for r in rep.rows)

    def test_invalid_parameter_value_recorded(self):
        rep = sweep(self._tiny(), "d_w", [1.0, -1.0])
        assert rep.rows[0].status == "ok"
        assert rep.rows[1].status == "failed"
        assert "d_w" in rep.rows[1].error

    def test_unknown_param_rejected(self):
        with pytest.raises(ValueError, match="param"):
            sweep(self._tiny(), "gamma", [1.0])


class TestConverge:
    def _cfg(self, nx=8):
        cfg = reference_scenario()
        return replace(cfg, grid=Grid(nx=nx, ny=nx))

    def test_requires_three_nested_grids(self):
        with pytest.raises(ValueError, match="at least 3"):
            converge(self._cfg(), [8, 16], t_horizon=0.01)
        with pytest.raises(ValueError, match="increasing"):
            converge(self._cfg(), [16, 8, 32], t_horizon=0.01)
        with pytest.raises(ValueError, match="nest"):
            converge(self._cfg(), [6, 16, 32], t_horizon=0.01)

    def test_smooth_scenario_converges(self):
        rep = converge(self._cfg(), [8, 16, 32], t_horizon=0.05)
        assert len(rep.rows) == 2
        assert rep.rows[0].err_l2_u > rep.rows[1].err_l2_u
        assert rep.observed_order is not None and rep.observed_order > 0.8
        assert rep.dt <= 0.05

    def test_flat_scenario_floors_out(self):
        cfg = replace(self._cfg(), initial=InitialRecipe(kind="equilibrium"))
        rep = converge(cfg, [8, 16, 32], t_horizon=0.02)
        assert rep.observed_order is None
        assert "floor" in rep.note

    def test_anisotropic_base_grid_scales_ny(self):
        cfg = replace(self._cfg(), grid=Grid(nx=8, ny=4, lx=1.0, ly=0.5))
        rep = converge(cfg, [8, 16, 32], t_horizon=0.02)
        assert [r.ny for r in rep.rows] == [4, 8]
