"""Hilbert space, operators and Hamiltonian assembly for the driven
Jaynes-Cummings / Tavis-Cummings system.

Conventions (hbar = 1, every Hamiltonian entry in rad/s):

  * basis is photon-major: index = n * 2^M + q with Fock state n and the
    atomic bit pattern q; atom i occupies bit i (|g> = 0, |e> = 1),
  * rotated frame of the pump: H = (w_c - w_p) a^+ a
      + sum_i (w_a,i(t) - w_p) s_i^+ s_i^-
      + sum_i g_i(t) (a s_i^+ + s_i^- a^+) + eps_p (a + a^+),
    with w_a,i(t) = w_a + delta_cp,i(r_i(t)),
  * dissipators: kappa D[a] + Gamma sum_i D[s_i^-].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError

DEFAULT_DIMENSION_CAP = 64


@dataclass(frozen=True)
class HilbertSpec:
    """Truncated photon ⊗ qubits space: Fock states 0..N, M two-level atoms.

    M = 0 is accepted for the photon-only space used by empty-cavity
    baselines; transit runs use M in {1, 2}.
    """

    photon_cutoff: int
    n_atoms: int = 1
    dimension_cap: int = DEFAULT_DIMENSION_CAP

    def __post_init__(self):
        if self.photon_cutoff < 1:
            raise ConfigurationError("photon cutoff must be >= 1")
        if self.n_atoms not in (0, 1, 2):
            raise ConfigurationError("supported atom numbers are 0, 1 and 2")
        if self.dimension > self.dimension_cap:
            raise ConfigurationError(
                f"Hilbert dimension {self.dimension} exceeds cap {self.dimension_cap}")

    @property
    def dimension(self) -> int:
        return (self.photon_cutoff + 1) * 2**self.n_atoms


@dataclass(frozen=True)
class DriveParams:
    """Coherent drive: cavity frequency, pump frequency and rate (rad/s)."""

    omega_c: float
    omega_p: float
    eps_p: float

    def __post_init__(self):
        if self.eps_p < 0:
            raise ConfigurationError("drive rate eps_p must be non-negative")

    @property
    def delta_cl(self) -> float:
        """Cavity-laser detuning omega_c - omega_p."""
        return self.omega_c - self.omega_p

    @classmethod
    def from_detuning(cls, delta_cl: float, omega_c: float, eps_p: float) -> "DriveParams":
        return cls(omega_c=omega_c, omega_p=omega_c - delta_cl, eps_p=eps_p)


@dataclass(frozen=True)
class RatesParams:
    kappa: float
    gamma: float

    def __post_init__(self):
        if self.kappa < 0 or self.gamma < 0:
            raise ConfigurationError("decay rates must be non-negative")


@dataclass(frozen=True)
class Operators:
    """Dense operator set on the photon-major product basis."""

    spec: HilbertSpec
    a: np.ndarray
    adag: np.ndarray
    n_photon: np.ndarray
    sm: tuple[np.ndarray, ...]
    sp: tuple[np.ndarray, ...]
    n_atom: tuple[np.ndarray, ...]
    identity: np.ndarray
    top_fock: np.ndarray


def build_operators(spec: HilbertSpec) -> Operators:
    n_fock = spec.photon_cutoff + 1
    m = spec.n_atoms
    dim_atoms = 2**m

    a_fock = np.diag(np.sqrt(np.arange(1, n_fock)), k=1).astype(complex)
    eye_atoms = np.eye(dim_atoms, dtype=complex)
    a = np.kron(a_fock, eye_atoms)

    sm2 = np.array([[0, 1], [0, 0]], dtype=complex)   # |g><e|
    eye_fock = np.eye(n_fock, dtype=complex)
    sm = []
    for i in range(m):
        op = np.eye(1, dtype=complex)
        for j in reversed(range(m)):   # bit m-1 is the slowest atomic factor
            op = np.kron(op, sm2 if j == i else np.eye(2, dtype=complex))
        sm.append(np.kron(eye_fock, op))

    top = np.zeros((spec.dimension, spec.dimension), dtype=complex)
    base = spec.photon_cutoff * dim_atoms
    top[base:, base:] = np.eye(dim_atoms)

    return Operators(
        spec=spec,
        a=a,
        adag=a.conj().T,
        n_photon=a.conj().T @ a,
        sm=tuple(sm),
        sp=tuple(s.conj().T for s in sm),
        n_atom=tuple(s.conj().T @ s for s in sm),
        identity=np.eye(spec.dimension, dtype=complex),
        top_fock=top,
    )


def coupling_operator(ops: Operators, i: int) -> np.ndarray:
    """a s_i^+ + s_i^- a^+ (the Jaynes-Cummings exchange term for atom i)."""
    return ops.a @ ops.sp[i] + ops.sm[i] @ ops.adag


def static_hamiltonian(
    ops: Operators,
    drive: DriveParams,
    atom_cavity_detuning: float = 0.0,
) -> np.ndarray:
    """Time-independent part: detuned cavity, bare atom detuning, drive."""
    delta = drive.delta_cl
    h = delta * ops.n_photon + drive.eps_p * (ops.a + ops.adag)
    for n_i in ops.n_atom:
        h = h + (delta + atom_cavity_detuning) * n_i
    return h


def hamiltonian(
    ops: Operators,
    drive: DriveParams,
    g: np.ndarray,
    delta_cp: np.ndarray,
    atom_cavity_detuning: float = 0.0,
) -> np.ndarray:
    """Full Hamiltonian for instantaneous couplings g_i and CP shifts."""
    g = np.atleast_1d(np.asarray(g, dtype=float))
    delta_cp = np.atleast_1d(np.asarray(delta_cp, dtype=float))
    if len(g) != ops.spec.n_atoms or len(delta_cp) != ops.spec.n_atoms:
        raise ValueError("need one coupling and one shift per atom")
    h = static_hamiltonian(ops, drive, atom_cavity_detuning)
    for i in range(ops.spec.n_atoms):
        h = h + g[i] * coupling_operator(ops, i) + delta_cp[i] * ops.n_atom[i]
    return h


def schedule_value(tab: np.ndarray, t0: float, dt: float, t: float) -> float:
    """Linear interpolation on a uniform grid; zero outside the sampled span."""
    pos = (t - t0) / dt
    if pos <= 0.0:
        return float(tab[0]) if pos == 0.0 else 0.0
    if pos >= len(tab) - 1:
        return float(tab[-1]) if pos == len(tab) - 1 else 0.0
    k = int(pos)
    frac = pos - k
    return float(tab[k] * (1.0 - frac) + tab[k + 1] * frac)


def hamiltonian_at(
    t: float,
    ops: Operators,
    drive: DriveParams,
    schedules,
    atom_cavity_detuning: float = 0.0,
) -> np.ndarray:
    """Hamiltonian with g_i(t), delta_cp,i(t) read off the pulse schedules."""
    g = np.array([schedule_value(s.g, s.t0, s.dt, t) for s in schedules])
    d = np.array([schedule_value(s.delta_cp, s.t0, s.dt, t) for s in schedules])
    return hamiltonian(ops, drive, g, d, atom_cavity_detuning)


def lindblad_rhs(rho: np.ndarray, h: np.ndarray, rates: RatesParams,
                 ops: Operators) -> np.ndarray:
    """d rho / dt = -i [H, rho] + kappa D[a] rho + Gamma sum_i D[s_i^-] rho."""
    out = -1j * (h @ rho - rho @ h)
    if rates.kappa:
        out += rates.kappa * (
            ops.a @ rho @ ops.adag
            - 0.5 * (ops.n_photon @ rho + rho @ ops.n_photon)
        )
    if rates.gamma:
        for s, n_i in zip(ops.sm, ops.n_atom):
            out += rates.gamma * (
                s @ rho @ s.conj().T - 0.5 * (n_i @ rho + rho @ n_i)
            )
    return out


def validate_density_matrix(rho: np.ndarray, dim: int | None = None) -> None:
    """Hermitian within 1e-10, unit trace within 1e-8, positive within 1e-8."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"density matrix dimension {rho.shape[0]} != {dim}")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("density matrix is not Hermitian within 1e-10")
    if abs(np.trace(rho).real - 1.0) > 1e-8 or abs(np.trace(rho).imag) > 1e-8:
        raise ValueError("density matrix trace deviates from 1 beyond 1e-8")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -1e-8:
        raise ValueError("density matrix has eigenvalue below -1e-8")
