#!/usr/bin/env python3
"""Benchmark the numpy and numba kernel backends against each other.

Reports per-call duration of the batched thermo kernel at several batch
sizes, plus an end-to-end 201x201 mode/exergy map. Smaller is better.
"""

import time

import numpy as np

import tritherm as tt
from tritherm import _kernels


def batch_args(n, seed=0):
    rng = np.random.default_rng(seed)
    temps = np.sort(rng.uniform(0.05, 1.0, size=(n, 3)), axis=1)
    return (np.ones(n), np.ones(n), rng.uniform(0.05, 0.95, n),
            temps[:, 2], temps[:, 1], temps[:, 0],
            rng.uniform(1.0, 2.0, n), np.full(n, 0.05), np.full(n, 0.01),
            rng.uniform(0.3, 1.0, n), np.full(n, 0.05), np.full(n, 0.01))


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}  "
          f"(select with {_kernels.ENV_BACKEND}=numpy|numba)\n")

    print("thermo_batch, best of 5 (per call):")
    for n in (1_000, 100_000, 1_000_000):
        args = batch_args(n)
        row = [f"n={n:>9,}"]
        for backend in backends:
            _kernels.thermo_batch(*args, backend=backend)  # warm / compile
            dt = best_of(lambda: _kernels.thermo_batch(*args, backend=backend))
            row.append(f"{backend}: {dt * 1e3:8.2f} ms")
        print("  " + "   ".join(row))

    print("\n201x201 mode/exergy map (run_sweep, 1 thread):")
    cfg = tt.MachineConfig(
        hot=tt.LorentzianBath(temperature=0.8, center=1.5, width=0.05, kappa=0.01),
        cold=tt.LorentzianBath(temperature=0.2, center=0.75, width=0.05, kappa=0.01),
        mid=tt.OhmicBath(temperature=0.5), drive_freq=0.5)
    spec = tt.SweepSpec(template=cfg,
                        axis1=tt.Axis("drive_freq", 0.02, 0.9, 201),
                        axis2=tt.Axis("hot.center", 1.0, 2.0, 201))
    for backend in backends:
        previous = _kernels.set_backend(backend)
        try:
            tt.run_sweep(spec)  # warm
            dt = best_of(lambda: tt.run_sweep(spec), repeats=3)
            print(f"  {backend}: {dt * 1e3:8.2f} ms")
        finally:
            _kernels.set_backend(previous)


if __name__ == "__main__":
    main()
