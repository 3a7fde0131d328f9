"""Pure-numpy propagation kernel (reference backend).

Embedded Dormand-Prince 5(4) with PI-free step control, density-matrix
re-symmetrisation on every accepted step, and linear interpolation of the
per-atom pulse schedules. The compiled backend implements the same
algorithm step for step; both must stay in lockstep so results differ only
at rounding level.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Dormand-Prince 5(4) tableau
DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
# y1 - yhat1 error weights (includes the k7 stage)
DP_E = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
        -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_STEP_BUDGET = 2

MAX_STEPS = 20_000_000
SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0


def _interp(tab: np.ndarray, t0: float, dt: float, t: float) -> float:
    pos = (t - t0) / dt
    if pos <= 0.0:
        return float(tab[0]) if pos == 0.0 else 0.0
    last = len(tab) - 1
    if pos >= last:
        return float(tab[last]) if pos == last else 0.0
    k = int(pos)
    frac = pos - k
    return tab[k] * (1.0 - frac) + tab[k + 1] * frac


class _Rhs:
    def __init__(self, h_static, h_coup, h_det, g_tab, dcp_tab,
                 sched_t0, sched_dt, c_a, n_a, c_sm, n_sm, kappa, gamma):
        self.h_static = h_static
        self.h_coup = h_coup
        self.h_det = h_det
        self.g_tab = g_tab
        self.dcp_tab = dcp_tab
        self.sched_t0 = sched_t0
        self.sched_dt = sched_dt
        self.c_a = c_a
        self.adag = c_a.conj().T.copy()
        self.n_a = n_a
        self.c_sm = c_sm
        self.sp = [s.conj().T.copy() for s in c_sm]
        self.n_sm = n_sm
        self.kappa = kappa
        self.gamma = gamma
        self.n_atoms = len(c_sm)

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        h = self.h_static.copy()
        for i in range(self.n_atoms):
            g = _interp(self.g_tab[i], self.sched_t0[i], self.sched_dt[i], t)
            d = _interp(self.dcp_tab[i], self.sched_t0[i], self.sched_dt[i], t)
            if g != 0.0:
                h += g * self.h_coup[i]
            if d != 0.0:
                h += d * self.h_det[i]
        out = -1j * (h @ rho - rho @ h)
        if self.kappa:
            out += self.kappa * (
                self.c_a @ rho @ self.adag
                - 0.5 * (self.n_a @ rho + rho @ self.n_a)
            )
        if self.gamma:
            for i in range(self.n_atoms):
                out += self.gamma * (
                    self.c_sm[i] @ rho @ self.sp[i]
                    - 0.5 * (self.n_sm[i] @ rho + rho @ self.n_sm[i])
                )
        return out


def propagate_kernel(
    rho0: np.ndarray,
    t0: float,
    t1: float,
    t_samples: np.ndarray,
    h_static: np.ndarray,
    h_coup: np.ndarray,
    h_det: np.ndarray,
    g_tab: np.ndarray,
    dcp_tab: np.ndarray,
    sched_t0: np.ndarray,
    sched_dt: np.ndarray,
    c_a: np.ndarray,
    n_a: np.ndarray,
    c_sm: np.ndarray,
    n_sm: np.ndarray,
    kappa: float,
    gamma: float,
    rtol: float,
    atol: float,
    h0: float,
):
    """Integrate rho through [t0, t1], recording at t_samples.

    Returns (rho_samples, n_steps, n_rejected, status, t_reached).
    """
    rhs = _Rhs(h_static, list(h_coup), list(h_det), g_tab, dcp_tab,
               sched_t0, sched_dt, c_a, n_a, list(c_sm), n_sm, kappa, gamma)
    d = rho0.shape[0]
    n_samples = len(t_samples)
    out = np.empty((n_samples, d, d), dtype=complex)

    rho = 0.5 * (rho0 + rho0.conj().T)
    t = t0
    h = h0
    tiny = 1e-15 * (t1 - t0)
    hmin = 1e-15 * (t1 - t0)
    n_steps = 0
    n_rejected = 0
    just_rejected = False
    k = [None] * 7

    idx = 0
    while idx < n_samples and t_samples[idx] <= t0 + tiny:
        out[idx] = rho
        idx += 1

    for j in range(idx, n_samples):
        t_target = float(t_samples[j])
        while t_target - t > tiny:
            h_used = min(h, t_target - t)
            if h_used < hmin:
                return out[:j], n_steps, n_rejected, STATUS_STEP_UNDERFLOW, t
            if n_steps >= MAX_STEPS:
                return out[:j], n_steps, n_rejected, STATUS_STEP_BUDGET, t

            k[0] = rhs(t, rho)
            y5 = None
            for s in range(1, 7):
                y = rho.copy()
                a_row = DP_A[s]
                for m, a_sm in enumerate(a_row):
                    if a_sm != 0.0:
                        y += (h_used * a_sm) * k[m]
                k[s] = rhs(t + DP_C[s] * h_used, y)
                if s == 6:
                    # the last stage argument is the 5th-order solution
                    y5 = y
            err = np.zeros_like(rho)
            for m, e in enumerate(DP_E):
                if e != 0.0:
                    err += (h_used * e) * k[m]

            scale = atol + rtol * np.maximum(np.abs(rho), np.abs(y5))
            errnorm = float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))
            n_steps += 1
            if errnorm <= 1.0:
                rho = 0.5 * (y5 + y5.conj().T)
                t = t + h_used
                if errnorm == 0.0:
                    fac = FAC_MAX
                else:
                    fac = min(FAC_MAX, max(FAC_MIN, SAFETY * errnorm**-0.2))
                if just_rejected:
                    fac = min(fac, 1.0)   # no growth right after a rejection
                just_rejected = False
                h = h_used * fac
            else:
                n_rejected += 1
                just_rejected = True
                h = h_used * max(FAC_MIN, SAFETY * errnorm**-0.2)
        t = t_target
        out[j] = rho

    return out, n_steps, n_rejected, STATUS_OK, t
