"""Cross-backend agreement. The compiled kernel mirrors the fallback's
floating-point expression trees, so trajectories must match bit for bit,
not merely to tolerance.
"""

import numpy as np
import pytest

from haptosim import backend
from haptosim import _fallback

_core = backend._core
needs_compiled = pytest.mark.skipif(_core is None,
                                    reason="compiled core not built")


def _random_state(seed, ny=14, nx=18):
    rng = np.random.default_rng(seed)
    u = 0.3 + rng.random((ny, nx))
    v = rng.random((ny, nx)) * 0.8
    w = rng.random((ny, nx)) * 0.3
    z = rng.random((ny, nx)) * 0.2
    return u, v, w, z


class TestResolve:
    def test_fallback_always_available(self):
        assert "fallback" in backend.available()
        kern = backend.resolve("fallback")
        assert kern.compiled is False

    def test_default_prefers_compiled_when_built(self):
        kern = backend.resolve(None)
        if _core is not None:
            assert kern.compiled is True
        else:
            assert kern.compiled is False

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="backend"):
            backend.resolve("vectorized")

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("HAPTOSIM_BACKEND", "fallback")
        assert backend.resolve(None).compiled is False
        assert backend.selected_name() == "fallback"


@needs_compiled
class TestBitwiseParity:
    def test_single_step_exact(self):
        hx, hy = 1.0 / 18, 1.3 / 14
        for seed in range(8):
            u, v, w, z = _random_state(seed)
            args = (1.0, 0.5, 1.0, 1.5, hx, hy, 2e-5)
            out_f = _fallback.step_uwz(u, v, w, z, *args)
            out_c = _core.step_uwz(u, v, w, z, *args)
            for name, a, b in zip("uwzv", out_f, out_c):
                np.testing.assert_array_equal(a, b, err_msg=f"field {name}, seed {seed}")

    def test_step_bounds_exact(self):
        for seed in range(8):
            u, v, _, z = _random_state(seed)
            bf = _fallback.step_bounds(u, v, z, 1.0, 0.05, 0.07)
            bc = _core.step_bounds(u, v, z, 1.0, 0.05, 0.07)
            assert bf == bc

    def test_adaptive_driver_trajectory_exact(self):
        u, v, w, z = _random_state(99, ny=16, nx=16)
        hx = hy = 1.0 / 16
        common = (0.0, 0.4, 1e-3, 1.0, 0.5, 1.0, 1.0, hx, hy,
                  1e-12, 0.9, 0.25, 0.9, 10_000_000, float(v.max()))
        uf, vf, wf, zf = u.copy(), v.copy(), w.copy(), z.copy()
        rf = _fallback.advance(uf, vf, wf, zf, *common)
        uc, vc, wc, zc = u.copy(), v.copy(), w.copy(), z.copy()
        rc = _core.advance(uc, vc, wc, zc, *common)
        assert rf[0] == rc[0] == 0
        assert rf[1] == rc[1]          # reached time
        assert rf[2] == rc[2]          # next dt
        assert rf[3] == rc[3]          # step count
        np.testing.assert_array_equal(uf, uc)
        np.testing.assert_array_equal(vf, vc)
        np.testing.assert_array_equal(wf, wc)
        np.testing.assert_array_equal(zf, zc)

    def test_run_records_identical_csv(self, tmp_path):
        from haptosim.harness import homogeneous_preset
        from haptosim.io_cli import write_functionals
        from haptosim.timestepper import run
        from dataclasses import replace

        cfg = homogeneous_preset()
        cfg = replace(cfg, grid=replace(cfg.grid, nx=8, ny=8),
                      controls=replace(cfg.controls, t_end=0.3),
                      outputs=replace(cfg.outputs, cadence=0.05))
        paths = {}
        for name in ("compiled", "fallback"):
            res = run(cfg, backend=name)
            p = tmp_path / f"{name}.csv"
            write_functionals(str(p), res.records)
            paths[name] = p.read_bytes()
        assert paths["compiled"] == paths["fallback"]


@needs_compiled
class TestTelemetryAgreement:
    def test_counters_match_even_if_sums_differ(self):
        # the compiled driver uses compensated sums for the mass identity,
        # so that one telemetry float is tolerance-level, not bitwise
        u, v, w, z = _random_state(3, ny=12, nx=12)
        hx = hy = 1.0 / 12
        common = (0.0, 0.2, 1e-3, 1.0, 0.9, 1.0, 1.0, hx, hy,
                  1e-12, 0.9, 0.25, 0.9, 10_000_000, float(v.max()))
        rf = _fallback.advance(u.copy(), v.copy(), w.copy(), z.copy(), *common)
        rc = _core.advance(u.copy(), v.copy(), w.copy(), z.copy(), *common)
        assert rf[3:6] == rc[3:6]      # steps, rejects, vmax violations
        assert rf[8] == rc[8]          # dt floor hits
        assert rf[7] <= 1e-12 and rc[7] <= 1e-12
