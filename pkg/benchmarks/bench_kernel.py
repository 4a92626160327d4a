#!/usr/bin/env python3
"""Benchmark the compiled hour-integration kernel against its Python twin.

Two measurements:

1. micro: repeated `drive_hour` calls on the bundled route with a
   representative mid-race state (both implementations imported directly,
   same inputs, results asserted bit-identical first).
2. race: wall time for a full minimum-speed journey on the bundled
   scenario, run in a subprocess per kernel (`SOLARSIM_KERNEL` selects).

Usage: python3 benchmarks/bench_kernel.py [--calls N] [--races N]
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys
import timeit

import numpy as np

from solarsim import _kernel_py, fixtures
from solarsim.engine import Session

try:
    from solarsim import _kernel
except ImportError:
    _kernel = None

RACE_SNIPPET = """
import json, time
from solarsim import fixtures, kernel
from solarsim.engine import Session
from solarsim.strategies import ConstantSpeedPolicy

spec, route, weather, cfg = fixtures.load_scenario()
t0 = time.perf_counter()
sim = Session(spec, route, weather, cfg)
log = sim.run_to_finish(ConstantSpeedPolicy(fixtures.MIN_SPEED_KMH), max_days=9)
elapsed = time.perf_counter() - t0
assert log.finished
print(json.dumps({"impl": kernel.IMPLEMENTATION, "seconds": elapsed}))
"""


def kernel_args():
    """One representative `drive_hour` call: mid-race, driving hour, sun up."""
    spec, route, weather, cfg = fixtures.load_scenario()
    sim = Session(spec, route, weather, cfg)
    for _ in range(12):  # advance into day 2 so state is "typical"
        if sim.next_driving_hour(sim.state.clock) != sim.state.clock:
            sim.advance_idle(sim.next_driving_hour(sim.state.clock))
        sim.step_hour(65.0)
    st = sim.state
    wind_x, wind_y, charge_w, drag_c = sim._hour_env(st.clock)
    t = sim.tables
    return (
        t.cum, t.grade, t.cos_incline, t.cos_heading, t.sin_heading,
        t.zone_idx, wind_x, wind_y, charge_w, drag_c,
        spec.mass * sim.constants.gravity * spec.rolling_resistance,
        spec.mass * sim.constants.gravity,
        spec.constant_power_loss,
        65.0 / 3.6,
        route.segment_index_at(st.odometer),
        st.odometer,
        st.battery,
        spec.battery_capacity,
        3600.0,
        cfg.substep_m,
    )


def bench_micro(calls: int) -> None:
    args = kernel_args()
    ref = _kernel_py.drive_hour(*args)
    if _kernel is None:
        print("micro: compiled kernel not built; skipping comparison")
        return
    assert _kernel.drive_hour(*args) == ref, "implementations diverge"
    results = {}
    for name, mod in (("cython", _kernel), ("python", _kernel_py)):
        times = timeit.repeat(lambda: mod.drive_hour(*args), number=calls, repeat=5)
        per_call = min(times) / calls * 1e6
        results[name] = per_call
        print(f"micro {name:7s} {per_call:9.2f} us/call  ({calls} calls x5, best)")
    print(f"micro speedup {results['python'] / results['cython']:.1f}x")


def bench_race(races: int) -> None:
    for impl in ("cython", "python"):
        env = dict(os.environ)
        env.pop("SOLARSIM_KERNEL", None)
        if impl == "python":
            env["SOLARSIM_KERNEL"] = "python"
        samples = []
        for _ in range(races):
            out = subprocess.run(
                [sys.executable, "-c", RACE_SNIPPET],
                env=env, capture_output=True, text=True, check=True,
            )
            rec = json.loads(out.stdout.strip().splitlines()[-1])
            if rec["impl"] != impl:
                print(f"race {impl}: not available (got {rec['impl']}); skipping")
                break
            samples.append(rec["seconds"])
        if samples:
            print(f"race  {impl:7s} {min(samples)*1e3:9.1f} ms best "
                  f"(median {statistics.median(samples)*1e3:.1f} ms, n={len(samples)})")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--calls", type=int, default=2000)
    p.add_argument("--races", type=int, default=3)
    ns = p.parse_args()
    np.set_printoptions(suppress=True)
    bench_micro(ns.calls)
    bench_race(ns.races)


if __name__ == "__main__":
    main()
