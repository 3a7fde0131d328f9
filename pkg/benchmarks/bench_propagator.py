#!/usr/bin/env python3
"""Benchmark: compiled propagation kernel vs the pure-numpy fallback.

Times the master-equation propagator on three workloads (empty cavity,
single-atom transit, two-atom transit) and prints a comparison table.

    python3 benchmarks/bench_propagator.py [--repeats N]
"""

import argparse
import time

import numpy as np

from atomcavity.cavity import default_cavity, g_max
from atomcavity.constants import default_rubidium
from atomcavity.dynamics import (
    DriveParams,
    HilbertSpec,
    RatesParams,
    available_backends,
    build_operators,
    propagate,
    transit_initial_state,
)
from atomcavity.trajectories import PulseSchedule


def gaussian_schedule(g_peak, t_center, tau, t_end, dt=1e-12):
    n = int(round(t_end / dt)) + 1
    t = dt * np.arange(n)
    g = g_peak * np.exp(-((t - t_center) ** 2) / (2 * tau**2))
    return PulseSchedule(t0=0.0, dt=dt, g=g, delta_cp=np.zeros(n),
                         active=np.ones(n, dtype=bool))


def silent_schedule():
    return PulseSchedule(t0=0.0, dt=1e-12, g=np.zeros(3),
                         delta_cp=np.zeros(3), active=np.zeros(3, dtype=bool))


def workloads():
    cavity = default_cavity()
    atom = default_rubidium()
    gm = g_max(cavity, atom)
    kappa = cavity.kappa
    drive = DriveParams.from_detuning(0.0, cavity.omega_res, kappa / 20)
    rates = RatesParams(kappa, atom.gamma)
    t_end = 10e-9
    samples = np.linspace(0.0, t_end, 101)

    sched = gaussian_schedule(gm, 3e-9, 0.7e-9, t_end)
    out = []
    for name, n_atoms, schedules in (
        ("empty cavity (N=4)", 1, [silent_schedule()]),
        ("single transit (N=4, M=1)", 1, [sched]),
        ("pair transit (N=4, M=2)", 2, [sched, sched.shifted(2e-9)]),
    ):
        spec = HilbertSpec(photon_cutoff=4, n_atoms=n_atoms)
        ops = build_operators(spec)
        rho0 = transit_initial_state(spec, drive, kappa)
        out.append((name, rho0, schedules, ops, drive, rates, t_end, samples))
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = sorted(available_backends())
    print(f"backends available: {', '.join(backends)}")
    header = f"{'workload':<28}" + "".join(f"{b:>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for name, rho0, schedules, ops, drive, rates, t_end, samples in workloads():
        times = {}
        for backend in backends:
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                res = propagate(rho0, schedules, drive, rates, ops,
                                (0.0, t_end), sample_times=samples,
                                backend_name=backend)
                best = min(best, time.perf_counter() - t0)
            times[backend] = (best, res.n_steps)
        row = f"{name:<28}"
        for backend in backends:
            best, n_steps = times[backend]
            row += f"{best * 1e3:>11.1f} ms"
        if len(backends) == 2:
            slow, fast = times[backends[1]][0], times[backends[0]][0]
            row += f"{slow / fast:>9.1f}x"
        row += f"   ({times[backends[0]][1]} steps)"
        print(row)


if __name__ == "__main__":
    main()
