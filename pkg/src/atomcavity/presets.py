"""Built-in trajectory presets and default sweep geometry."""

from __future__ import annotations

import numpy as np

from .trajectories import SimulationBox, Trajectory

# single-atom transit presets: initial position (m) and velocity (m/s)
FIG4_PRESETS: dict[str, Trajectory] = {
    "fig4a": Trajectory(r0=(0.0, 0.0, 600e-9), v0=(0.0, 0.0, -200.0)),
    "fig4b": Trajectory(r0=(100e-9, 150e-9, 300e-9), v0=(0.0, 50.0, -100.0)),
    "fig4c": Trajectory(r0=(800e-9, -200e-9, -500e-9), v0=(120.0, -40.0, 100.0)),
}

# both atoms of a delayed pair follow the central chord at -200 m/s
PAIR_TRAJECTORY = FIG4_PRESETS["fig4a"]
PAIR_DELAYS = (0.0, 2e-9, 4e-9)

DEFAULT_BOX = SimulationBox(half_extents=(2e-6, 1e-6, 1e-6))
# LIAD runs track atoms from the desorption wall up to the cavity
LIAD_BOX = SimulationBox(half_extents=(2.5e-6, 2.5e-6, 2.5e-6))


def default_detuning_grid(g_peak: float, n_points: int = 201,
                          span_in_g: float = 3.0) -> np.ndarray:
    """Symmetric detuning grid over +- span_in_g * g_peak (rad/s)."""
    if n_points < 1:
        raise ValueError("need at least one detuning point")
    return np.linspace(-span_in_g * g_peak, span_in_g * g_peak, n_points)
