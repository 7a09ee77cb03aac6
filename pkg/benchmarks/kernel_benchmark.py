"""Compare the compiled stepping kernel against the pure-numpy fallback.

Runs the same adaptive segment through both backends on a few grid sizes and
reports wall time per step plus the speedup. Usage:

    python3 benchmarks/kernel_benchmark.py [--t-target 0.05] [--grids 64,128,256]
"""

import argparse
import time

import numpy as np

from haptosim import backend
from haptosim.harness import build_initial_state, reference_scenario
from haptosim.model import Grid
from haptosim.timestepper import StepControls


def time_segment(kern, state, params, grid, controls, t_target):
    u, v, w, z = (f.copy() for f in (state.u, state.v, state.w, state.z))
    start = time.perf_counter()
    out = kern.advance(
        u, v, w, z, 0.0, t_target, controls.dt_init,
        params.mu, params.beta, params.d_w, params.d_z,
        grid.hx, grid.hy, controls.dt_min, controls.safety,
        controls.cfl_diff, controls.positivity_guard,
        controls.max_steps_per_segment, float(v.max()),
    )
    elapsed = time.perf_counter() - start
    status, _, _, steps, rejects = out[0], out[1], out[2], out[3], out[4]
    if status != 0:
        raise RuntimeError(f"segment did not finish (status {status})")
    return elapsed, steps, rejects, (u, v, w, z)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--t-target", type=float, default=0.05)
    parser.add_argument("--grids", default="64,128,256")
    args = parser.parse_args()
    grids = [int(g) for g in args.grids.replace(",", " ").split()]

    names = backend.available()
    if "compiled" not in names:
        print("compiled backend not built; benchmarking the fallback only")
    print(f"backends: {', '.join(names)}   segment horizon: {args.t_target:g}")
    print(f"{'grid':>10} {'backend':>9} {'steps':>8} {'ms/step':>9} {'total s':>9} {'speedup':>8}")

    cfg = reference_scenario()
    controls = StepControls()
    # fallback first so the compiled row can report its speedup
    ordered = sorted(names, key=lambda n: n != "fallback")
    for n in grids:
        grid = Grid(nx=n, ny=n)
        state = build_initial_state(cfg.initial, grid, cfg.seed)
        base_ms = None
        fields = {}
        for name in ordered:
            kern = backend.resolve(name)
            elapsed, steps, rejects, out_fields = time_segment(
                kern, state, cfg.params, grid, controls, args.t_target)
            fields[name] = out_fields
            ms = 1e3 * elapsed / steps
            if name == "fallback":
                base_ms = ms
            speedup = "" if base_ms is None else f"{base_ms / ms:7.2f}x"
            print(f"{n:>7}^2 {name:>9} {steps:>8} {ms:>9.3f} {elapsed:>9.2f} {speedup:>8}")
        if len(fields) == 2:
            same = all(
                np.array_equal(fields["compiled"][k], fields["fallback"][k])
                for k in range(4)
            )
            print(f"{'':>10} fields bitwise identical across backends: {same}")


if __name__ == "__main__":
    main()
