"""Quantum core: truncated atom(s) ⊗ photon space, driven Jaynes-Cummings /
Tavis-Cummings Hamiltonian with scheduled couplings, Lindblad propagation."""

from .backend import available_backends, default_backend_name, get_kernel
from .evolve import (
    PropagationResult,
    driven_cavity_steady_state,
    empty_cavity_photon_number,
    liouvillian_matrix,
    propagate,
    steady_state,
    transit_initial_state,
    vacuum_ground_state,
)
from .operators import (
    DriveParams,
    HilbertSpec,
    Operators,
    RatesParams,
    build_operators,
    coupling_operator,
    hamiltonian,
    hamiltonian_at,
    lindblad_rhs,
    schedule_value,
    static_hamiltonian,
    validate_density_matrix,
)

__all__ = [
    "DriveParams",
    "HilbertSpec",
    "Operators",
    "PropagationResult",
    "RatesParams",
    "available_backends",
    "build_operators",
    "coupling_operator",
    "default_backend_name",
    "driven_cavity_steady_state",
    "empty_cavity_photon_number",
    "get_kernel",
    "hamiltonian",
    "hamiltonian_at",
    "lindblad_rhs",
    "liouvillian_matrix",
    "propagate",
    "schedule_value",
    "static_hamiltonian",
    "steady_state",
    "transit_initial_state",
    "vacuum_ground_state",
    "validate_density_matrix",
]
