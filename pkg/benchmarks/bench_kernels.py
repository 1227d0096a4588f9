"""Timing of the variational scan: compiled extension vs pure-Python.

Runs a batch of solves under the active backend, then re-executes itself
with CONSLAW_FORCE_FALLBACK=1 and compares both timing and output bytes:
the two backends must produce identical fields.

    python3 benchmarks/bench_kernels.py [n_paths] [n_steps]
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

from conslaw._kernels import BACKEND
from conslaw.hamiltonian import quadratic
from conslaw.paths import GridSpec, sample_two_sided_bm
from conslaw.solver import solve_field


def run_batch(n_paths, n_steps, seed=0):
    grid = GridSpec(-12.0, 12.0, n_steps)
    H = quadratic(1.0)
    checksum = 0.0
    t0 = time.perf_counter()
    for k in range(n_paths):
        pot = sample_two_sided_bm(grid, 1.0, seed, path_index=k)
        field = solve_field(pot, H, 1.0)
        checksum += float(np.sum(field.rho))
    elapsed = time.perf_counter() - t0
    return elapsed, checksum


def main():
    n_paths = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    n_steps = int(sys.argv[2]) if len(sys.argv) > 2 else 6000

    elapsed, checksum = run_batch(n_paths, n_steps)
    result = {"backend": BACKEND, "n_paths": n_paths, "n_steps": n_steps,
              "elapsed_s": round(elapsed, 4),
              "solves_per_s": round(n_paths / elapsed, 2),
              "checksum": checksum}

    if os.environ.get("_BENCH_CHILD"):
        print(json.dumps(result))
        return

    print(f"{BACKEND:>10}: {result['solves_per_s']:8.2f} solves/s "
          f"({n_paths} paths, {n_steps} steps)")
    env = dict(os.environ, CONSLAW_FORCE_FALLBACK="1", _BENCH_CHILD="1")
    proc = subprocess.run([sys.executable, os.path.abspath(__file__),
                           str(n_paths), str(n_steps)],
                          capture_output=True, text=True, env=env)
    other = json.loads(proc.stdout)
    print(f"{other['backend']:>10}: {other['solves_per_s']:8.2f} solves/s")
    if other["checksum"] != checksum:
        raise SystemExit("backends disagree on the solved fields")
    print(f"   speedup: {other['elapsed_s'] / elapsed:8.2f}x, "
          "identical output")


if __name__ == "__main__":
    main()
