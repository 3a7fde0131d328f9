#!/usr/bin/env python3
"""Generate the frozen golden data consumed by the acceptance suite.

Runs the desk-scale reference simulations, validates the central-transit
map against the independent fixed-step RK4 oracle (dt = 10 fs), and writes
the results to tests/golden/. Also refreshes the small CSV fixtures used by
the plotting front end.

Rerun after any intentional physics change: python3 scripts/freeze_goldens.py
"""

import sys
import time
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from atomcavity.cavity import default_cavity, g_max
from atomcavity.config import RunConfig, resolve_cp_field
from atomcavity.constants import default_rubidium
from atomcavity.dynamics import DriveParams
from atomcavity.ensemble import SweepSpec, run_delayed_pair, run_ensemble, run_single
from atomcavity.presets import FIG4_PRESETS, LIAD_BOX, default_detuning_grid
from atomcavity.trajectories import EnsembleSpec, SamplerKind
from oracle_rk4 import rk4_propagate, single_atom_ops

GOLDEN = ROOT / "tests" / "golden"
WORKERS = 2
ENSEMBLE_COUNT = 2000
ENSEMBLE_SEED = 2026


def validate_zero_column_with_rk4(result, cavity, atom, cp_field, sweep):
    """Independent RK4 (dt = 10 fs) on the zero-detuning column."""
    from atomcavity.ensemble import _prepare_single
    from atomcavity.presets import DEFAULT_BOX

    payload = _prepare_single(FIG4_PRESETS["fig4a"], sweep, cavity, atom,
                              cp_field, DEFAULT_BOX, n_atoms=1)
    sched = payload.schedules_template[0]
    drive = DriveParams.from_detuning(0.0, cavity.omega_res,
                                      sweep.eps_p_over_kappa * cavity.kappa)
    a_or, sm_or = single_atom_ops(sweep.photon_cutoff)
    n_or = a_or.conj().T @ a_or
    n_at = sm_or.conj().T @ sm_or
    stat = drive.delta_cl * (n_or + n_at) + drive.eps_p * (a_or + a_or.conj().T)
    coup = a_or @ sm_or.conj().T + sm_or @ a_or.conj().T
    t_tab = sched.times

    def h_of_t(t):
        g = np.interp(t, t_tab, sched.g, left=0.0, right=0.0)
        d = np.interp(t, t_tab, sched.delta_cp, left=0.0, right=0.0)
        return stat + g * coup + d * n_at

    from atomcavity.dynamics import transit_initial_state, HilbertSpec
    rho0 = transit_initial_state(HilbertSpec(sweep.photon_cutoff, 1), drive,
                                 cavity.kappa)
    t0 = time.perf_counter()
    rhos = rk4_propagate(rho0, h_of_t,
                         [(cavity.kappa, a_or), (atom.gamma, sm_or)],
                         0.0, sweep.t_obs, dt=1e-14,
                         sample_times=sweep.sample_times)
    oracle = np.einsum("ij,sji->s", n_or, rhos).real
    col = result.photon_map[:, result.zero_index]
    err_rel = np.abs(col - oracle) / np.maximum(np.abs(oracle), 1e-30)
    err_abs = np.abs(col - oracle)
    mask = np.abs(oracle) > 1e-5 * oracle.max()
    print(f"  RK4 validation ({time.perf_counter() - t0:.0f}s): "
          f"max rel (resolved) {err_rel[mask].max():.2e}, "
          f"max abs {err_abs.max():.2e}")
    assert err_rel[mask].max() < 1e-4, "golden column deviates from RK4 oracle"
    assert err_abs.max() < 1e-8, "golden column absolute error too large"


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    cavity = default_cavity()
    atom = default_rubidium()
    gm = g_max(cavity, atom)
    cp_field = resolve_cp_field(RunConfig().cp, cavity, atom)

    # --- fig4a: 201-detuning transit map --------------------------------
    sweep = SweepSpec(delta_cl=default_detuning_grid(gm, 201), t_obs=10e-9,
                      n_time_samples=201)
    t0 = time.perf_counter()
    res = run_single(FIG4_PRESETS["fig4a"], sweep, cavity, atom,
                     cp_field=cp_field, workers=WORKERS)
    print(f"fig4a 201-point sweep: {time.perf_counter() - t0:.0f}s, "
          f"dip {res.zero_trace.min():.3e}")
    validate_zero_column_with_rk4(res, cavity, atom, cp_field, sweep)
    np.savez_compressed(
        GOLDEN / "fig4a_map.npz", times=res.times, delta_cl=res.delta_cl,
        photon_map=res.photon_map, baseline=res.baseline,
        zero_trace=res.zero_trace, time_avg=res.time_avg)

    # --- fig6: delayed pairs ---------------------------------------------
    pair_sweep = SweepSpec(delta_cl=default_detuning_grid(gm, 161), t_obs=12e-9,
                           n_time_samples=241)
    t0 = time.perf_counter()
    pair0 = run_delayed_pair(0.0, pair_sweep, cavity, atom, cp_field=cp_field,
                             workers=WORKERS)
    print(f"pair delay=0 sweep: {time.perf_counter() - t0:.0f}s")
    np.savez_compressed(GOLDEN / "pair_delay0_map.npz", times=pair0.times,
                        delta_cl=pair0.delta_cl, photon_map=pair0.photon_map,
                        baseline=pair0.baseline)

    trace_sweep = SweepSpec(delta_cl=np.array([0.0]), t_obs=12e-9,
                            n_time_samples=241)
    traces = {}
    for delay in (2e-9, 4e-9):
        t0 = time.perf_counter()
        r = run_delayed_pair(delay, trace_sweep, cavity, atom, cp_field=cp_field,
                             workers=1)
        traces[delay] = r
        print(f"pair delay={delay * 1e9:.0f}ns zero trace: "
              f"{time.perf_counter() - t0:.0f}s, min {r.zero_trace.min():.3e}")
    np.savez_compressed(
        GOLDEN / "pair_traces.npz", times=traces[2e-9].times,
        trace_2ns=traces[2e-9].zero_trace, trace_4ns=traces[4e-9].zero_trace,
        baseline=traces[2e-9].baseline)

    # --- fig5: LIAD ensemble ----------------------------------------------
    espec = EnsembleSpec(kind=SamplerKind.LIAD_WALL, temperature=300.0,
                         count=ENSEMBLE_COUNT, seed=ENSEMBLE_SEED, box=LIAD_BOX)
    esweep = SweepSpec(delta_cl=np.array([-3 * gm, 0.0, 3 * gm]),
                       t_obs=10e-9, n_time_samples=101)
    t0 = time.perf_counter()
    eres = run_ensemble(espec, esweep, cavity, atom, cp_field=cp_field,
                        workers=WORKERS)
    print(f"fig5 ensemble ({ENSEMBLE_COUNT} trajectories): "
          f"{time.perf_counter() - t0:.0f}s")
    means = np.array([s.mean_photon for s in eres.spectrum])
    errs = np.array([s.std_error for s in eres.spectrum])
    for s in eres.spectrum:
        print(f"  delta={s.delta_cl:+.3e}: {s.mean_photon:.6f} "
              f"+- {s.std_error:.2e} (n={s.n_samples})")
    dip_sig = (means[0] - means[1]) / np.hypot(errs[0], errs[1])
    print(f"  dip significance vs -3g: {dip_sig:.1f} sigma")
    np.savez_compressed(GOLDEN / "fig5_ensemble.npz",
                        delta_cl=esweep.delta_cl, mean=means, stderr=errs,
                        n=np.array([s.n_samples for s in eres.spectrum]),
                        seed=np.array([ENSEMBLE_SEED]),
                        count=np.array([ENSEMBLE_COUNT]))
    print("goldens written to", GOLDEN)


if __name__ == "__main__":
    main()
