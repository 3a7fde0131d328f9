"""Master-equation propagation and steady states.

The integrator is an embedded Dormand-Prince 5(4) with the density matrix
re-symmetrised after every accepted step; see the backend kernels for the
step loop. Observables are extracted at caller-requested sample times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import (
    AmbiguousSteadyStateError,
    CutoffError,
    NumericsError,
    StiffnessError,
)
from ..trajectories import PulseSchedule
from . import _core_py, backend
from .operators import (
    DriveParams,
    HilbertSpec,
    Operators,
    RatesParams,
    build_operators,
    coupling_operator,
    static_hamiltonian,
    validate_density_matrix,
)

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
TOP_FOCK_LIMIT = 1e-4


@dataclass(frozen=True)
class PropagationResult:
    """Sampled joint state and derived observables."""

    times: np.ndarray
    rho: np.ndarray                 # (n_samples, d, d)
    photon: np.ndarray              # <a^+ a>(t)
    atom_excitation: np.ndarray     # (n_samples, M)
    trace_dev: np.ndarray
    min_eig: np.ndarray
    top_fock: np.ndarray
    n_steps: int
    n_rejected: int
    backend: str

    def max_trace_dev(self) -> float:
        return float(self.trace_dev.max(initial=0.0))

    def min_eigenvalue(self) -> float:
        return float(self.min_eig.min(initial=0.0))

    def max_top_fock(self) -> float:
        return float(self.top_fock.max(initial=0.0))


def _expect(op: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    return np.einsum("ij,sji->s", op, rhos).real


def _schedule_tables(schedules, n_atoms):
    if len(schedules) != n_atoms:
        raise ValueError(f"need {n_atoms} schedules, got {len(schedules)}")
    if n_atoms == 0:
        return (np.zeros((0, 1)), np.zeros((0, 1)), np.zeros(0), np.ones(0))
    length = max(len(s.g) for s in schedules)
    g_tab = np.zeros((n_atoms, length))
    dcp_tab = np.zeros((n_atoms, length))
    for i, s in enumerate(schedules):
        g_tab[i, : len(s.g)] = s.g
        dcp_tab[i, : len(s.delta_cp)] = s.delta_cp
    t0s = np.array([s.t0 for s in schedules], dtype=float)
    dts = np.array([s.dt for s in schedules], dtype=float)
    return g_tab, dcp_tab, t0s, dts


def _initial_step(t_span, drive, rates, ops, g_tab, dcp_tab):
    rate = max(
        rates.kappa * (ops.spec.photon_cutoff + 1),
        rates.gamma,
        abs(drive.delta_cl),
        drive.eps_p,
        float(np.abs(g_tab).max(initial=0.0)),
        float(np.abs(dcp_tab).max(initial=0.0)),
        1.0 / (t_span[1] - t_span[0]),
    )
    return min(0.05 / rate, (t_span[1] - t_span[0]) / 100.0)


def propagate(
    rho0: np.ndarray,
    schedules: list[PulseSchedule],
    drive: DriveParams,
    rates: RatesParams,
    ops: Operators,
    t_span: tuple[float, float],
    sample_times: np.ndarray | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    atom_cavity_detuning: float = 0.0,
    check_cutoff: bool = True,
    backend_name: str | None = None,
) -> PropagationResult:
    """Evolve rho0 over t_span, sampling observables at sample_times.

    Raises StiffnessError on step underflow and CutoffError when the top
    Fock state accumulates more than 1e-4 population (increase the photon
    cutoff in that case).
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 <= t0:
        raise ValueError("t_span must be increasing")
    validate_density_matrix(rho0, ops.spec.dimension)
    if sample_times is None:
        sample_times = np.linspace(t0, t1, 201)
    sample_times = np.asarray(sample_times, dtype=float)
    if np.any(np.diff(sample_times) <= 0):
        raise ValueError("sample times must be strictly increasing")
    if sample_times[0] < t0 - 1e-30 or sample_times[-1] > t1 * (1 + 1e-12) + 1e-30:
        raise ValueError("sample times must lie within t_span")

    m = ops.spec.n_atoms
    g_tab, dcp_tab, t0s, dts = _schedule_tables(schedules, m)
    h_static = static_hamiltonian(ops, drive, atom_cavity_detuning)
    h_coup = np.array([coupling_operator(ops, i) for i in range(m)]) \
        if m else np.zeros((0, ops.spec.dimension, ops.spec.dimension), complex)
    h_det = np.array([ops.n_atom[i] for i in range(m)]) \
        if m else np.zeros((0, ops.spec.dimension, ops.spec.dimension), complex)

    kernel, used_backend = backend.get_kernel(backend_name)
    h0 = _initial_step((t0, t1), drive, rates, ops, g_tab, dcp_tab)
    c_sm = np.array(ops.sm) if m else np.zeros((0, *ops.a.shape), complex)
    n_sm = np.array(ops.n_atom) if m else np.zeros((0, *ops.a.shape), complex)

    rhos, n_steps, n_rejected, status, t_reached = kernel(
        np.asarray(rho0, dtype=complex),
        t0, t1, sample_times,
        h_static, h_coup, h_det,
        g_tab, dcp_tab, t0s, dts,
        ops.a, ops.n_photon, c_sm, n_sm,
        rates.kappa, rates.gamma,
        rtol, atol, h0,
    )
    if status == _core_py.STATUS_STEP_UNDERFLOW:
        raise StiffnessError(
            f"step size underflow at t = {t_reached:.6e} s "
            f"(after {n_steps} steps, {n_rejected} rejected); "
            "the problem is stiffer than the tolerances allow")
    if status == _core_py.STATUS_STEP_BUDGET:
        raise StiffnessError(
            f"step budget exhausted at t = {t_reached:.6e} s; "
            "integration is not progressing")

    rhos = np.asarray(rhos)
    photon = _expect(ops.n_photon, rhos)
    exc = np.stack([_expect(ops.n_atom[i], rhos) for i in range(m)], axis=1) \
        if m else np.zeros((len(sample_times), 0))
    traces = np.einsum("sii->s", rhos)
    trace_dev = np.abs(traces - 1.0)
    min_eig = np.array([np.linalg.eigvalsh(r).min() for r in rhos])
    top_fock = _expect(ops.top_fock, rhos)

    result = PropagationResult(
        times=sample_times,
        rho=rhos,
        photon=photon,
        atom_excitation=exc,
        trace_dev=trace_dev,
        min_eig=min_eig,
        top_fock=top_fock,
        n_steps=int(n_steps),
        n_rejected=int(n_rejected),
        backend=used_backend,
    )
    if check_cutoff and result.max_top_fock() > TOP_FOCK_LIMIT:
        raise CutoffError(
            f"top Fock state population reached {result.max_top_fock():.3e} "
            f"(limit {TOP_FOCK_LIMIT:g}); increase the photon cutoff "
            f"beyond N = {ops.spec.photon_cutoff}")
    return result


def liouvillian_matrix(h: np.ndarray, rates: RatesParams, ops: Operators) -> np.ndarray:
    """Superoperator matrix acting on column-stacked rho."""
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)

    def dissipator(op):
        ndag = op.conj().T @ op
        return (np.kron(op.conj(), op)
                - 0.5 * np.kron(eye, ndag)
                - 0.5 * np.kron(ndag.T, eye))

    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    if rates.kappa:
        lv += rates.kappa * dissipator(ops.a)
    if rates.gamma:
        for s in ops.sm:
            lv += rates.gamma * dissipator(s)
    return lv


def steady_state(h: np.ndarray, rates: RatesParams, ops: Operators) -> np.ndarray:
    """Unique trace-one null state of the Liouvillian.

    Raises AmbiguousSteadyStateError when the null space has dimension > 1,
    NumericsError when the residual exceeds 1e-10 times the Liouvillian
    norm.
    """
    lv = liouvillian_matrix(h, rates, ops)
    d = h.shape[0]
    _, s, vh = np.linalg.svd(lv)
    if s[0] == 0.0:
        raise AmbiguousSteadyStateError("Liouvillian is identically zero")
    if s[-2] < 1e-10 * s[0]:
        raise AmbiguousSteadyStateError(
            f"Liouvillian null space is degenerate (second singular value "
            f"{s[-2]:.3e} vs largest {s[0]:.3e})")
    rho = vh[-1].conj().reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise AmbiguousSteadyStateError("null vector is traceless")
    rho = rho / tr
    residual = np.linalg.norm(lv @ rho.flatten(order="F"))
    if residual > 1e-10 * s[0]:
        raise NumericsError(
            f"steady-state residual {residual:.3e} exceeds 1e-10 * |L| = "
            f"{1e-10 * s[0]:.3e}")
    return rho


def vacuum_ground_state(ops: Operators) -> np.ndarray:
    rho = np.zeros((ops.spec.dimension, ops.spec.dimension), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def empty_cavity_photon_number(drive: DriveParams, kappa: float) -> float:
    """Closed-form driven-damped cavity steady state eps^2/(Delta^2+(k/2)^2)."""
    return drive.eps_p**2 / (drive.delta_cl**2 + (kappa / 2.0) ** 2)


def driven_cavity_steady_state(photon_cutoff: int, drive: DriveParams,
                               kappa: float) -> np.ndarray:
    """Steady state of the empty driven cavity on the photon-only space."""
    spec = HilbertSpec(photon_cutoff=photon_cutoff, n_atoms=0)
    ops = build_operators(spec)
    h = static_hamiltonian(ops, drive)
    return steady_state(h, RatesParams(kappa=kappa, gamma=0.0), ops)


def transit_initial_state(spec: HilbertSpec, drive: DriveParams,
                          kappa: float) -> np.ndarray:
    """Empty-cavity driven steady state ⊗ ground atoms."""
    cav = driven_cavity_steady_state(spec.photon_cutoff, drive, kappa)
    ground = np.zeros((2**spec.n_atoms, 2**spec.n_atoms), dtype=complex)
    ground[0, 0] = 1.0
    return np.kron(cav, ground)
