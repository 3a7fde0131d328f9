"""Sweep and ensemble orchestration.

Work items are dispatched to a process pool; every item is a pure function
of immutable inputs, and reductions run in fixed index order, so results
are bit-identical for any worker count. Workers receive the shared payload
once through the pool initializer.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .casimir import CPField
from .cavity import CavityModel
from .constants import AtomSpecies
from .errors import ConfigurationError
from .presets import PAIR_TRAJECTORY
from .trajectories import (
    EnsembleSpec,
    PulseSchedule,
    SamplerKind,
    SimulationBox,
    Trajectory,
    default_schedule_dt,
    propagate as propagate_trajectory,
    sample_liad,
    sample_thermal,
    schedule_from_trajectory,
    validate_wall,
)
from .dynamics import (
    DriveParams,
    HilbertSpec,
    RatesParams,
    build_operators,
    driven_cavity_steady_state,
    propagate,
    transit_initial_state,
)

log = logging.getLogger(__name__)

NORMALIZATIONS = ("raw", "empty_cavity")


@dataclass(frozen=True)
class SweepSpec:
    """Detuning grid plus per-run integrator and observation settings."""

    delta_cl: np.ndarray
    t_obs: float = 10e-9
    n_time_samples: int = 201
    photon_cutoff: int = 4
    eps_p_over_kappa: float = 0.05
    rtol: float = 1e-8
    atol: float = 1e-10
    normalization: str = "empty_cavity"

    def __post_init__(self):
        grid = np.asarray(self.delta_cl, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigurationError("detuning grid must be non-empty, strictly increasing")
        object.__setattr__(self, "delta_cl", grid)
        if self.normalization not in NORMALIZATIONS:
            raise ConfigurationError(f"normalization must be one of {NORMALIZATIONS}")
        if self.t_obs <= 0 or self.n_time_samples < 2:
            raise ConfigurationError("need a positive window and >= 2 time samples")

    @property
    def sample_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_obs, self.n_time_samples)


@dataclass(frozen=True)
class SpectrumResult:
    delta_cl: float
    mean_photon: float
    std_error: float
    n_samples: int


@dataclass
class RunDiagnostics:
    max_trace_dev: float = 0.0
    min_eig: float = 0.0
    max_top_fock: float = 0.0

    def merge(self, other: "RunDiagnostics") -> None:
        self.max_trace_dev = max(self.max_trace_dev, other.max_trace_dev)
        self.min_eig = min(self.min_eig, other.min_eig)
        self.max_top_fock = max(self.max_top_fock, other.max_top_fock)


@dataclass
class SingleRunResult:
    """The three Fig.-4 style panels for one trajectory."""

    times: np.ndarray
    delta_cl: np.ndarray
    photon_map: np.ndarray          # (n_times, n_detunings)
    time_avg: np.ndarray            # (n_detunings,)
    zero_trace: np.ndarray          # photon number vs t at the zero column
    zero_excitation: np.ndarray     # (n_times, M) at the zero column
    zero_index: int
    baseline: np.ndarray            # empty-cavity steady photon number per detuning
    g_of_t: np.ndarray              # (n_times, M) scheduled coupling
    diagnostics: RunDiagnostics
    failures: list = field(default_factory=list)


@dataclass
class EnsembleResult:
    spectrum: list[SpectrumResult]
    n_trajectories: int
    n_excluded: int
    diagnostics: RunDiagnostics
    trajectories: tuple[Trajectory, ...] = ()


# per-worker shared payload, set by the pool initializer
_PAYLOAD = None


def _set_payload(payload):
    global _PAYLOAD
    _PAYLOAD = payload


def _pool_map(items, worker, payload, workers: int):
    """Deterministic map: inline for one worker, process pool otherwise."""
    if workers <= 1:
        _set_payload(payload)
        try:
            return [worker(it) for it in items]
        finally:
            _set_payload(None)
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_set_payload, initargs=(payload,)
    ) as pool:
        chunk = max(1, len(items) // (workers * 8))
        return list(pool.map(worker, items, chunksize=chunk))


@dataclass(frozen=True)
class _TransitPayload:
    cavity: CavityModel
    atom: AtomSpecies
    sweep: SweepSpec
    schedules_template: tuple[PulseSchedule, ...]
    n_atoms: int

    def drive_for(self, delta: float) -> DriveParams:
        kappa = self.cavity.kappa
        return DriveParams.from_detuning(
            delta_cl=delta, omega_c=self.cavity.omega_res,
            eps_p=self.sweep.eps_p_over_kappa * kappa)


def _baseline_photon(cavity: CavityModel, sweep: SweepSpec, delta: float) -> float:
    """Empty-cavity steady-state photon number from the Liouvillian null
    space (the same object the transit initial state is built from)."""
    drive = DriveParams.from_detuning(delta, cavity.omega_res,
                                      sweep.eps_p_over_kappa * cavity.kappa)
    rho = driven_cavity_steady_state(sweep.photon_cutoff, drive, cavity.kappa)
    n = np.arange(sweep.photon_cutoff + 1)
    return float((np.diag(rho).real * n).sum())


def _run_one_detuning(idx: int):
    p = _PAYLOAD
    delta = float(p.sweep.delta_cl[idx])
    drive = p.drive_for(delta)
    rates = RatesParams(kappa=p.cavity.kappa, gamma=p.atom.gamma)
    spec = HilbertSpec(photon_cutoff=p.sweep.photon_cutoff, n_atoms=p.n_atoms)
    ops = build_operators(spec)
    rho0 = transit_initial_state(spec, drive, p.cavity.kappa)
    atom_detuning = p.atom.omega_a - p.cavity.omega_res
    try:
        res = propagate(
            rho0, list(p.schedules_template), drive, rates, ops,
            (0.0, p.sweep.t_obs), sample_times=p.sweep.sample_times,
            rtol=p.sweep.rtol, atol=p.sweep.atol,
            atom_cavity_detuning=atom_detuning,
        )
    except Exception as exc:  # noqa: BLE001 - failures are collected per point
        return idx, None, None, None, f"{type(exc).__name__}: {exc}"
    diag = RunDiagnostics(res.max_trace_dev(), res.min_eigenvalue(), res.max_top_fock())
    return idx, res.photon, res.atom_excitation, diag, None


def _prepare_single(
    trajectory: Trajectory,
    sweep: SweepSpec,
    cavity: CavityModel,
    atom: AtomSpecies,
    cp_field: CPField | None,
    box: SimulationBox,
    n_atoms: int,
    delay: float = 0.0,
) -> _TransitPayload:
    traj = trajectory
    if traj.termination is None:
        dt = default_schedule_dt(traj, cavity)
        traj = propagate_trajectory(traj, cavity.geometry, box, dt, sweep.t_obs)
    sched = schedule_from_trajectory(traj, cavity, atom, cp_field,
                                     t_grid_end=sweep.t_obs)
    schedules = [sched]
    if n_atoms == 2:
        schedules.append(sched.shifted(delay))
    return _TransitPayload(
        cavity=cavity, atom=atom, sweep=sweep,
        schedules_template=tuple(schedules), n_atoms=n_atoms)


def _collect_map(payload: _TransitPayload, workers: int) -> SingleRunResult:
    sweep = payload.sweep
    n_d = len(sweep.delta_cl)
    n_t = sweep.n_time_samples
    rows = _pool_map(list(range(n_d)), _run_one_detuning, payload, workers)

    photon_map = np.full((n_t, n_d), np.nan)
    exc_store: dict[int, np.ndarray] = {}
    diag = RunDiagnostics()
    failures = []
    for idx, photon, exc, d, err in rows:
        if err is not None:
            failures.append((float(sweep.delta_cl[idx]), err))
            continue
        photon_map[:, idx] = photon
        exc_store[idx] = exc
        diag.merge(d)
    if len(failures) > 0.01 * n_d:
        raise RuntimeError(
            f"{len(failures)}/{n_d} detuning points failed; first: {failures[0]}")

    zero_index = int(np.argmin(np.abs(sweep.delta_cl)))
    baseline = np.array([_baseline_photon(payload.cavity, sweep, d)
                         for d in sweep.delta_cl])
    sched = payload.schedules_template
    times = sweep.sample_times
    g_of_t = np.stack(
        [np.interp(times, s.times, s.g, left=0.0, right=0.0) for s in sched],
        axis=1)
    zero_exc = exc_store.get(zero_index)
    if zero_exc is None:
        zero_exc = np.full((n_t, payload.n_atoms), np.nan)
    return SingleRunResult(
        times=times,
        delta_cl=sweep.delta_cl,
        photon_map=photon_map,
        time_avg=np.nanmean(photon_map, axis=0),
        zero_trace=photon_map[:, zero_index],
        zero_excitation=zero_exc,
        zero_index=zero_index,
        baseline=baseline,
        g_of_t=g_of_t,
        diagnostics=diag,
        failures=failures,
    )


def run_single(
    trajectory: Trajectory,
    sweep: SweepSpec,
    cavity: CavityModel,
    atom: AtomSpecies,
    cp_field: CPField | None = None,
    box: SimulationBox | None = None,
    workers: int = 1,
) -> SingleRunResult:
    """One atom along one trajectory, swept over the detuning grid."""
    from .presets import DEFAULT_BOX
    payload = _prepare_single(trajectory, sweep, cavity, atom, cp_field,
                              box or DEFAULT_BOX, n_atoms=1)
    return _collect_map(payload, workers)


def run_delayed_pair(
    delay: float,
    sweep: SweepSpec,
    cavity: CavityModel,
    atom: AtomSpecies,
    cp_field: CPField | None = None,
    box: SimulationBox | None = None,
    workers: int = 1,
    trajectory: Trajectory | None = None,
) -> SingleRunResult:
    """Two atoms on the central chord, the second delayed by ``delay``."""
    if delay < 0:
        raise ConfigurationError("delay must be non-negative")
    from .presets import DEFAULT_BOX
    payload = _prepare_single(trajectory or PAIR_TRAJECTORY, sweep, cavity, atom,
                              cp_field, box or DEFAULT_BOX, n_atoms=2,
                              delay=delay)
    return _collect_map(payload, workers)


# Atoms whose peak coupling never exceeds this fraction of g_max(0) are
# spectators: with g ~ 0 the atomic factor is inert (the CP term acts on the
# ground state only), so the cavity stays in the steady state it started in
# and the run-averaged photon number equals the baseline exactly. The
# neglected pull on the spectrum is O((g_peak/kappa)^2) < 1e-10, far below
# the ensemble standard error.
NEGLIGIBLE_COUPLING_FRACTION = 1e-5


@dataclass(frozen=True)
class _EnsemblePayload:
    cavity: CavityModel
    atom: AtomSpecies
    sweep: SweepSpec
    cp_field: CPField | None
    trajectories: tuple[Trajectory, ...]
    baseline: np.ndarray
    g_peak_threshold: float


def _run_one_trajectory(idx: int):
    p = _PAYLOAD
    sweep = p.sweep
    traj = p.trajectories[idx]
    rates = RatesParams(kappa=p.cavity.kappa, gamma=p.atom.gamma)
    spec = HilbertSpec(photon_cutoff=sweep.photon_cutoff, n_atoms=1)
    ops = build_operators(spec)
    atom_detuning = p.atom.omega_a - p.cavity.omega_res
    try:
        sched = schedule_from_trajectory(traj, p.cavity, p.atom, p.cp_field,
                                         t_grid_end=sweep.t_obs)
    except Exception as exc:  # noqa: BLE001
        return idx, None, None, f"{type(exc).__name__}: {exc}"

    if sched.peak_coupling() < p.g_peak_threshold:
        if sweep.normalization == "empty_cavity":
            scalars = np.ones(len(sweep.delta_cl))
        else:
            scalars = p.baseline.copy()
        return idx, scalars, RunDiagnostics(), None

    scalars = np.empty(len(sweep.delta_cl))
    diag = RunDiagnostics()
    for j, delta in enumerate(sweep.delta_cl):
        drive = DriveParams.from_detuning(float(delta), p.cavity.omega_res,
                                          sweep.eps_p_over_kappa * p.cavity.kappa)
        rho0 = transit_initial_state(spec, drive, p.cavity.kappa)
        try:
            res = propagate(rho0, [sched], drive, rates, ops,
                            (0.0, sweep.t_obs), sample_times=sweep.sample_times,
                            rtol=sweep.rtol, atol=sweep.atol,
                            atom_cavity_detuning=atom_detuning)
        except Exception as exc:  # noqa: BLE001
            return idx, None, None, f"{type(exc).__name__}: {exc}"
        mean_n = float(np.trapezoid(res.photon, res.times) / sweep.t_obs)
        if sweep.normalization == "empty_cavity":
            mean_n /= p.baseline[j]
        scalars[j] = mean_n
        diag.merge(RunDiagnostics(res.max_trace_dev(), res.min_eigenvalue(),
                                  res.max_top_fock()))
    return idx, scalars, diag, None


def sample_ensemble(spec: EnsembleSpec, atom: AtomSpecies,
                    geometry, t_obs: float) -> list[Trajectory]:
    """Draw and terminate the ensemble's trajectories (deterministic in seed)."""
    if spec.kind is SamplerKind.THERMAL_BOX:
        raw = sample_thermal(spec, atom)
    elif spec.kind is SamplerKind.LIAD_WALL:
        validate_wall(spec, geometry)
        raw = sample_liad(spec, atom)
    else:
        raise ConfigurationError(f"ensemble sampler {spec.kind} needs explicit trajectories")
    # 1 ps marching step; bisection refines every crossing to dt/100
    return [propagate_trajectory(traj, geometry, spec.box, 1e-12, t_obs)
            for traj in raw]


def run_ensemble(
    spec: EnsembleSpec,
    sweep: SweepSpec,
    cavity: CavityModel,
    atom: AtomSpecies,
    cp_field: CPField | None = None,
    workers: int = 1,
) -> EnsembleResult:
    """Trajectory-averaged spectrum (Fig.-5 style).

    The per-trajectory scalar is the time average of <a^+a> over
    [0, t_obs], normalised per detuning by the empty-cavity steady-state
    photon number when the sweep asks for it.
    """
    trajectories = sample_ensemble(spec, atom, cavity.geometry, sweep.t_obs)
    baseline = np.array([_baseline_photon(cavity, sweep, d)
                         for d in sweep.delta_cl])
    from .cavity import g_max as _g_max
    payload = _EnsemblePayload(
        cavity=cavity, atom=atom, sweep=sweep, cp_field=cp_field,
        trajectories=tuple(trajectories), baseline=baseline,
        g_peak_threshold=NEGLIGIBLE_COUPLING_FRACTION * _g_max(cavity, atom))

    rows = _pool_map(list(range(len(trajectories))), _run_one_trajectory,
                     payload, workers)

    n_d = len(sweep.delta_cl)
    table = np.full((len(trajectories), n_d), np.nan)
    diag = RunDiagnostics()
    excluded = 0
    for idx, scalars, d, err in rows:
        if err is not None:
            excluded += 1
            log.warning("trajectory %d excluded: %s", idx, err)
            continue
        table[idx] = scalars
        diag.merge(d)
    if excluded > max(1e-3 * len(trajectories), 0):
        raise RuntimeError(
            f"{excluded}/{len(trajectories)} trajectories failed "
            "(more than the 0.1% exclusion budget)")

    valid = ~np.isnan(table[:, 0])
    n_valid = int(valid.sum())
    spectrum = []
    for j in range(n_d):
        col = table[valid, j]
        mean = float(col.mean())
        std_err = float(col.std(ddof=1) / np.sqrt(n_valid)) if n_valid > 1 else 0.0
        spectrum.append(SpectrumResult(
            delta_cl=float(sweep.delta_cl[j]), mean_photon=mean,
            std_error=std_err, n_samples=n_valid))
    return EnsembleResult(spectrum=spectrum, n_trajectories=len(trajectories),
                          n_excluded=excluded, diagnostics=diag,
                          trajectories=tuple(trajectories))
