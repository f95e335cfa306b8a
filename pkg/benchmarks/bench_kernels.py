"""Time the bandit kernels under numba and under the plain-Python fallback.

Each backend runs in its own interpreter because the switch is read at
import time:

    python benchmarks/bench_kernels.py [--steps 20000] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time

CHILD = r"""
import json, sys, time
import numpy as np
from beamlearn._accel import backend
from beamlearn.blb import run_blb
from beamlearn.baselines import run_eps_greedy_grid, run_ucb1_grid
from beamlearn.drifting import run_drifting_blb
from beamlearn.harness.scenario import ScenarioConfig, build_environment

steps, repeat = int(sys.argv[1]), int(sys.argv[2])
env = build_environment(ScenarioConfig(seed=0))
jobs = {
    "blb": lambda rng: run_blb(env, steps, rng=rng),
    "drifting-blb": lambda rng: run_drifting_blb(env, steps, rng=rng),
    "ucb1-grid-20": lambda rng: run_ucb1_grid(env, steps, 20, rng),
    "eps-greedy-grid-20": lambda rng: run_eps_greedy_grid(env, steps, 20, 0.9, rng),
}
out = {"backend": backend(), "times": {}}
for name, job in jobs.items():
    job(np.random.default_rng(0))  # warm-up / compile
    best = min(
        (lambda t0: (job(np.random.default_rng(1)), time.perf_counter() - t0)[1])(time.perf_counter())
        for _ in range(repeat)
    )
    out["times"][name] = best
print(json.dumps(out))
"""


def run_backend(disable: bool, steps: int, repeat: int) -> dict:
    env = dict(os.environ, BEAMLEARN_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, str(steps), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    t0 = time.perf_counter()
    fast = run_backend(False, args.steps, args.repeat)
    slow = run_backend(True, args.steps, args.repeat)
    print(f"{'algorithm':<20} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:<20} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:8.1f}x")
    print(f"({args.steps} steps, best of {args.repeat}; wall {time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
