# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernel.

Same algorithm as ``_core_py.propagate_kernel`` (Dormand-Prince 5(4),
re-symmetrisation on accept, linear schedule interpolation); the matrix
products go through BLAS zgemm and the stage arithmetic through tight C
loops. Any change here must be mirrored in the reference backend.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, pow
from scipy.linalg.cython_blas cimport zgemm

BACKEND_NAME = "compiled"

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_STEP_BUDGET = 2

cdef int _ST_OK = 0
cdef int _ST_UNDERFLOW = 1
cdef int _ST_BUDGET = 2

cdef long MAX_STEPS = 20000000
cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0

ctypedef double complex zcomplex


cdef inline void mm(zcomplex* a, zcomplex* b, zcomplex* c, int d,
                    zcomplex alpha, zcomplex beta) noexcept nogil:
    # row-major C = alpha * A @ B + beta * C via the column-major transpose trick
    cdef char t = b'N'
    zgemm(&t, &t, &d, &d, &d, &alpha, b, &d, a, &d, &beta, c, &d)


cdef inline void axpy(int n, zcomplex alpha, zcomplex* x, zcomplex* y) noexcept nogil:
    cdef int i
    for i in range(n):
        y[i] = y[i] + alpha * x[i]


cdef inline void copy(int n, zcomplex* src, zcomplex* dst) noexcept nogil:
    cdef int i
    for i in range(n):
        dst[i] = src[i]


cdef inline double interp(double* tab, int n, double t0, double dt,
                          double t) noexcept nogil:
    cdef double pos = (t - t0) / dt
    cdef int last = n - 1
    cdef int k
    cdef double frac
    if pos <= 0.0:
        return tab[0] if pos == 0.0 else 0.0
    if pos >= last:
        return tab[last] if pos == <double>last else 0.0
    k = <int>pos
    frac = pos - k
    return tab[k] * (1.0 - frac) + tab[k + 1] * frac


def propagate_kernel(
    cnp.ndarray rho0,
    double t0,
    double t1,
    cnp.ndarray t_samples,
    cnp.ndarray h_static,
    cnp.ndarray h_coup,
    cnp.ndarray h_det,
    cnp.ndarray g_tab,
    cnp.ndarray dcp_tab,
    cnp.ndarray sched_t0,
    cnp.ndarray sched_dt,
    cnp.ndarray c_a,
    cnp.ndarray n_a,
    cnp.ndarray c_sm,
    cnp.ndarray n_sm,
    double kappa,
    double gamma,
    double rtol,
    double atol,
    double h0,
):
    """See ``_core_py.propagate_kernel``; identical contract."""
    cdef zcomplex[:, ::1] rho_v = np.ascontiguousarray(rho0, dtype=np.complex128)
    cdef double[::1] ts_v = np.ascontiguousarray(t_samples, dtype=np.float64)
    cdef zcomplex[:, ::1] hs_v = np.ascontiguousarray(h_static, dtype=np.complex128)
    cdef zcomplex[:, :, ::1] hc_v = np.ascontiguousarray(h_coup, dtype=np.complex128)
    cdef zcomplex[:, :, ::1] hd_v = np.ascontiguousarray(h_det, dtype=np.complex128)
    cdef double[:, ::1] g_v = np.ascontiguousarray(g_tab, dtype=np.float64)
    cdef double[:, ::1] dcp_v = np.ascontiguousarray(dcp_tab, dtype=np.float64)
    cdef double[::1] st0_v = np.ascontiguousarray(sched_t0, dtype=np.float64)
    cdef double[::1] sdt_v = np.ascontiguousarray(sched_dt, dtype=np.float64)
    cdef zcomplex[:, ::1] a_v = np.ascontiguousarray(c_a, dtype=np.complex128)
    cdef zcomplex[:, ::1] na_v = np.ascontiguousarray(n_a, dtype=np.complex128)
    cdef zcomplex[:, :, ::1] sm_v = np.ascontiguousarray(c_sm, dtype=np.complex128)
    cdef zcomplex[:, :, ::1] nsm_v = np.ascontiguousarray(n_sm, dtype=np.complex128)

    cdef int d = rho_v.shape[0]
    cdef int d2 = d * d
    cdef int n_atoms = hc_v.shape[0]
    cdef int sched_len = g_v.shape[1] if n_atoms > 0 else 0
    cdef int n_samples = ts_v.shape[0]

    adag_np = np.ascontiguousarray(np.asarray(a_v).conj().T)
    cdef zcomplex[:, ::1] adag_v = adag_np
    sp_np = np.ascontiguousarray(np.asarray(sm_v).conj().transpose(0, 2, 1))
    cdef zcomplex[:, :, ::1] sp_v = sp_np

    out_np = np.empty((n_samples, d, d), dtype=np.complex128)
    cdef zcomplex[:, :, ::1] out_v = out_np

    # workspace: rho, y, err, H, T1, T2 and 7 stage slots
    work_np = np.empty((13, d2), dtype=np.complex128)
    cdef zcomplex[:, ::1] w = work_np
    cdef zcomplex* rho_p = &w[0, 0]
    cdef zcomplex* y_p = &w[1, 0]
    cdef zcomplex* err_p = &w[2, 0]
    cdef zcomplex* h_p = &w[3, 0]
    cdef zcomplex* t1_p = &w[4, 0]
    cdef zcomplex* t2_p = &w[5, 0]
    cdef zcomplex* k_p[7]
    cdef int s
    for s in range(7):
        k_p[s] = &w[6 + s, 0]

    # Dormand-Prince coefficients
    cdef double[7] cc
    cc[0] = 0.0; cc[1] = 1.0 / 5.0; cc[2] = 3.0 / 10.0; cc[3] = 4.0 / 5.0
    cc[4] = 8.0 / 9.0; cc[5] = 1.0; cc[6] = 1.0
    cdef double[6][6] aa
    cdef int i_, j_
    for i_ in range(6):
        for j_ in range(6):
            aa[i_][j_] = 0.0
    aa[0][0] = 1.0 / 5.0
    aa[1][0] = 3.0 / 40.0; aa[1][1] = 9.0 / 40.0
    aa[2][0] = 44.0 / 45.0; aa[2][1] = -56.0 / 15.0; aa[2][2] = 32.0 / 9.0
    aa[3][0] = 19372.0 / 6561.0; aa[3][1] = -25360.0 / 2187.0
    aa[3][2] = 64448.0 / 6561.0; aa[3][3] = -212.0 / 729.0
    aa[4][0] = 9017.0 / 3168.0; aa[4][1] = -355.0 / 33.0
    aa[4][2] = 46732.0 / 5247.0; aa[4][3] = 49.0 / 176.0
    aa[4][4] = -5103.0 / 18656.0
    aa[5][0] = 35.0 / 384.0; aa[5][1] = 0.0; aa[5][2] = 500.0 / 1113.0
    aa[5][3] = 125.0 / 192.0; aa[5][4] = -2187.0 / 6784.0; aa[5][5] = 11.0 / 84.0
    cdef double[7] ee
    ee[0] = 71.0 / 57600.0; ee[1] = 0.0; ee[2] = -71.0 / 16695.0
    ee[3] = 71.0 / 1920.0; ee[4] = -17253.0 / 339200.0; ee[5] = 22.0 / 525.0
    ee[6] = -1.0 / 40.0

    cdef double t = t0
    cdef double h = h0
    cdef double tiny = 1e-15 * (t1 - t0)
    cdef double hmin = 1e-15 * (t1 - t0)
    cdef long n_steps = 0
    cdef long n_rejected = 0
    cdef bint just_rejected = False
    cdef int status = _ST_OK
    cdef int idx = 0
    cdef int recorded = 0
    cdef int j, m, i
    cdef double t_target, h_used, errnorm, sc, ea, fac, g_i, d_i
    cdef zcomplex alpha, val
    cdef zcomplex one = 1.0
    cdef zcomplex zero = 0.0
    cdef zcomplex mhalf = -0.5
    cdef zcomplex mi = -1.0j
    cdef double acc

    # symmetrised initial state
    for i in range(d):
        for j in range(d):
            rho_p[i * d + j] = 0.5 * (rho_v[i, j] + rho_v[j, i].conjugate())

    while idx < n_samples and ts_v[idx] <= t0 + tiny:
        copy(d2, rho_p, &out_v[idx, 0, 0])
        recorded += 1
        idx += 1

    cdef bint failed = False
    with nogil:
        for j in range(idx, n_samples):
            t_target = ts_v[j]
            while t_target - t > tiny:
                h_used = h if h < (t_target - t) else (t_target - t)
                if h_used < hmin:
                    status = _ST_UNDERFLOW
                    failed = True
                    break
                if n_steps >= MAX_STEPS:
                    status = _ST_BUDGET
                    failed = True
                    break

                # stage 0 on rho, stages 1..6 on accumulated y
                _rhs(t, rho_p, k_p[0], d, &hs_v[0, 0],
                     hc_v, hd_v, g_v, dcp_v, sched_len,
                     &st0_v[0] if n_atoms else NULL,
                     &sdt_v[0] if n_atoms else NULL, n_atoms,
                     &a_v[0, 0], &adag_v[0, 0], &na_v[0, 0],
                     sm_v, sp_v, nsm_v, kappa, gamma,
                     h_p, t1_p, t2_p)
                for s in range(1, 7):
                    copy(d2, rho_p, y_p)
                    for m in range(s):
                        if aa[s - 1][m] != 0.0:
                            alpha = h_used * aa[s - 1][m]
                            axpy(d2, alpha, k_p[m], y_p)
                    _rhs(t + cc[s] * h_used, y_p, k_p[s], d, &hs_v[0, 0],
                         hc_v, hd_v, g_v, dcp_v, sched_len,
                         &st0_v[0] if n_atoms else NULL,
                         &sdt_v[0] if n_atoms else NULL, n_atoms,
                         &a_v[0, 0], &adag_v[0, 0], &na_v[0, 0],
                         sm_v, sp_v, nsm_v, kappa, gamma,
                         h_p, t1_p, t2_p)
                # y_p now holds the 5th-order solution (stage-7 argument)

                for i in range(d2):
                    err_p[i] = 0.0
                for m in range(7):
                    if ee[m] != 0.0:
                        alpha = h_used * ee[m]
                        axpy(d2, alpha, k_p[m], err_p)

                acc = 0.0
                for i in range(d2):
                    sc = atol + rtol * _zmax(rho_p[i], y_p[i])
                    ea = _zabs(err_p[i]) / sc
                    acc += ea * ea
                errnorm = sqrt(acc / d2)
                n_steps += 1

                if errnorm <= 1.0:
                    # accept: hermitise y into rho
                    for i in range(d):
                        rho_p[i * d + i] = y_p[i * d + i].real + 0.0j
                        for m in range(i + 1, d):
                            val = 0.5 * (y_p[i * d + m] + y_p[m * d + i].conjugate())
                            rho_p[i * d + m] = val
                            rho_p[m * d + i] = val.conjugate()
                    t = t + h_used
                    if errnorm == 0.0:
                        fac = FAC_MAX
                    else:
                        fac = SAFETY * pow(errnorm, -0.2)
                        if fac > FAC_MAX:
                            fac = FAC_MAX
                        elif fac < FAC_MIN:
                            fac = FAC_MIN
                    if just_rejected and fac > 1.0:
                        fac = 1.0   # no growth right after a rejection
                    just_rejected = False
                    h = h_used * fac
                else:
                    n_rejected += 1
                    just_rejected = True
                    fac = SAFETY * pow(errnorm, -0.2)
                    if fac < FAC_MIN:
                        fac = FAC_MIN
                    h = h_used * fac
            if failed:
                break
            t = t_target
            copy(d2, rho_p, &out_v[j, 0, 0])
            recorded += 1

    if failed:
        return out_np[:recorded], int(n_steps), int(n_rejected), status, t
    return out_np, int(n_steps), int(n_rejected), _ST_OK, t


cdef inline double _zabs(zcomplex z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double _zmax(zcomplex a, zcomplex b) noexcept nogil:
    cdef double xa = _zabs(a)
    cdef double xb = _zabs(b)
    return xa if xa > xb else xb


cdef void _rhs(double t, zcomplex* rho, zcomplex* out, int d,
               zcomplex* h_static,
               zcomplex[:, :, ::1] h_coup, zcomplex[:, :, ::1] h_det,
               double[:, ::1] g_tab, double[:, ::1] dcp_tab, int sched_len,
               double* sched_t0, double* sched_dt, int n_atoms,
               zcomplex* c_a, zcomplex* adag, zcomplex* n_a,
               zcomplex[:, :, ::1] c_sm, zcomplex[:, :, ::1] sp,
               zcomplex[:, :, ::1] n_sm,
               double kappa, double gamma,
               zcomplex* bufh, zcomplex* t1, zcomplex* t2) noexcept nogil:
    cdef int i, at, d2 = d * d
    cdef double g, dcp
    cdef zcomplex one = 1.0
    cdef zcomplex zero = 0.0
    cdef zcomplex mi = -1.0j
    cdef zcomplex pi_ = 1.0j
    cdef zcomplex kap = kappa
    cdef zcomplex mhk = -0.5 * kappa
    cdef zcomplex gam = gamma
    cdef zcomplex mhg = -0.5 * gamma

    # H(t)
    copy(d2, h_static, bufh)
    for at in range(n_atoms):
        g = interp(&g_tab[at, 0], sched_len, sched_t0[at], sched_dt[at], t)
        dcp = interp(&dcp_tab[at, 0], sched_len, sched_t0[at], sched_dt[at], t)
        if g != 0.0:
            axpy(d2, g + 0.0j, &h_coup[at, 0, 0], bufh)
        if dcp != 0.0:
            axpy(d2, dcp + 0.0j, &h_det[at, 0, 0], bufh)

    # out = -i (H rho - rho H)
    mm(bufh, rho, t1, d, one, zero)
    mm(rho, bufh, t2, d, one, zero)
    for i in range(d2):
        out[i] = mi * (t1[i] - t2[i])

    if kappa != 0.0:
        # out += kappa (a rho adag) - kappa/2 (n_a rho + rho n_a)
        mm(c_a, rho, t1, d, one, zero)
        mm(t1, adag, t2, d, one, zero)
        axpy(d2, kap, t2, out)
        mm(n_a, rho, t1, d, one, zero)
        axpy(d2, mhk, t1, out)
        mm(rho, n_a, t1, d, one, zero)
        axpy(d2, mhk, t1, out)

    if gamma != 0.0:
        for at in range(n_atoms):
            mm(&c_sm[at, 0, 0], rho, t1, d, one, zero)
            mm(t1, &sp[at, 0, 0], t2, d, one, zero)
            axpy(d2, gam, t2, out)
            mm(&n_sm[at, 0, 0], rho, t1, d, one, zero)
            axpy(d2, mhg, t1, out)
            mm(rho, &n_sm[at, 0, 0], t1, d, one, zero)
            axpy(d2, mhg, t1, out)
