"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid or inconsistent user-supplied configuration."""


class DegenerateFieldError(ValueError):
    """Mode field carries no energy (all-zero intensity)."""


class InvalidStartError(ValueError):
    """Trajectory starts inside the dielectric."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureError(NumericsError):
    """Frequency integral did not converge after maximum refinement."""


class StiffnessError(NumericsError):
    """Adaptive integrator step size underflowed."""


class CutoffError(NumericsError):
    """Photon-number truncation leaked population; increase the Fock cutoff."""


class AmbiguousSteadyStateError(NumericsError):
    """Liouvillian null space has dimension > 1; steady state not unique."""
