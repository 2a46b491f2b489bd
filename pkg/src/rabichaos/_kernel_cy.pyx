# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integrator kernel: Dormand-Prince 5(4) over the mean-field flow.

C twin of ``_kernel_py`` (same tableau, same step control, same energy-shell
projection, same crossing refinement); the hot loops run without the GIL so
orbit sweeps parallelize across threads.  ``tests/test_classical.py`` checks
the two kernels against each other.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, fmax, fmin, nextafter, pow, sqrt

cnp.import_array()

KERNEL_NAME = "compiled"

STATUS_OK = 0
STATUS_SINGULARITY = 1
STATUS_STEP_UNDERFLOW = 2
STATUS_TLIMIT = 3

cdef enum:
    C_OK = 0
    C_SING = 1
    C_UNDER = 2
    C_TLIM = 3

cdef double SINGULAR_R2 = 2.0 - 1e-9
cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0

# Dormand-Prince 5(4) tableau (FSAL) and quartic dense-output coefficients.
cdef double A2[1]
cdef double A3[2]
cdef double A4[3]
cdef double A5[4]
cdef double A6[5]
A2[0] = 1.0 / 5
A3[:] = [3.0 / 40, 9.0 / 40]
A4[:] = [44.0 / 45, -56.0 / 15, 32.0 / 9]
A5[:] = [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729]
A6[:] = [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
         -5103.0 / 18656]

cdef double BW[6]
BW[:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
         11.0 / 84]

cdef double EW[7]
EW[:] = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
         22.0 / 525, -1.0 / 40]

cdef double DP[7][4]
DP[0][:] = [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608,
            -12715105075.0 / 11282082432]
DP[1][:] = [0.0, 0.0, 0.0, 0.0]
DP[2][:] = [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
            87487479700.0 / 32700410799]
DP[3][:] = [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304,
            -10690763975.0 / 1880347072]
DP[4][:] = [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
            701980252875.0 / 199316789632]
DP[5][:] = [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883,
            -1453857185.0 / 822651844]
DP[6][:] = [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423,
            69997945.0 / 29380423]


cdef struct RK:
    double w, w0, g
    double rtol, atol, direction
    double t, e0, h_abs
    double y[4]
    double f[4]
    double K[7][4]
    int status
    long n_steps, n_rejected
    double max_e_err


cdef inline bint c_eom(double* y, double w, double w0, double g,
                       double* f) nogil:
    cdef double r2 = y[0] * y[0] + y[1] * y[1]
    cdef double arg = 4.0 - 2.0 * r2
    cdef double s
    if arg <= 2e-9:
        return False
    s = sqrt(arg)
    f[0] = w * y[1] - 2.0 * g * y[0] * y[2] * y[1] / s
    f[1] = -w * y[0] - g * y[2] * (s - 2.0 * y[0] * y[0] / s)
    f[2] = w0 * y[3]
    f[3] = -w0 * y[2] - g * y[0] * s
    return True


cdef inline double c_energy(double* y, double w, double w0, double g) nogil:
    cdef double r2 = y[0] * y[0] + y[1] * y[1]
    cdef double arg = 4.0 - 2.0 * r2
    if arg < 0.0:
        arg = 0.0
    return (0.5 * w * (r2 - 1.0) + 0.5 * w0 * (y[2] * y[2] + y[3] * y[3])
            + g * y[0] * y[2] * sqrt(arg))


cdef void c_project(double* y, double* f, double e0, double w, double w0,
                    double g) nogil:
    """Up to two Newton pullbacks of y onto the shell H = e0 along grad H.

    grad H = (-f[1], f[0], -f[3], f[2]), so the flow vector is reused; f is
    refreshed at the corrected point.  No-op when the correction would leave
    the valid domain.
    """
    cdef double de, n2
    cdef double y_try[4]
    cdef double f_try[4]
    cdef int it, i
    for it in range(2):
        de = c_energy(y, w, w0, g) - e0
        if fabs(de) <= 1e-14 * fmax(1.0, fabs(e0)):
            return
        n2 = f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3]
        if n2 <= 1e-300:
            return
        de /= n2
        y_try[0] = y[0] + de * f[1]
        y_try[1] = y[1] - de * f[0]
        y_try[2] = y[2] + de * f[3]
        y_try[3] = y[3] - de * f[2]
        if not c_eom(y_try, w, w0, g, f_try):
            return
        for i in range(4):
            y[i] = y_try[i]
            f[i] = f_try[i]


cdef double c_initial_step(RK* s) nogil:
    cdef double scale[4]
    cdef double y1[4]
    cdef double f1[4]
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, h0, h1, v
    cdef int i
    for i in range(4):
        scale[i] = s.atol + s.rtol * fabs(s.y[i])
        v = s.y[i] / scale[i]
        d0 += v * v
        v = s.f[i] / scale[i]
        d1 += v * v
    d0 = sqrt(d0 / 4.0)
    d1 = sqrt(d1 / 4.0)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    for i in range(4):
        y1[i] = s.y[i] + h0 * s.direction * s.f[i]
    if not c_eom(y1, s.w, s.w0, s.g, f1):
        return h0
    for i in range(4):
        v = (f1[i] - s.f[i]) / scale[i]
        d2 += v * v
    d2 = sqrt(d2 / 4.0) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = fmax(1e-6, h0 * 1e-3)
    else:
        h1 = pow(0.01 / fmax(d1, d2), 0.2)
    return fmin(100.0 * h0, h1)


cdef bint rk_init(RK* s, double* y0, double t0, double direction,
                  double rtol, double atol, double w, double w0,
                  double g) nogil:
    cdef int i
    s.w = w; s.w0 = w0; s.g = g
    s.rtol = rtol; s.atol = atol; s.direction = direction
    s.t = t0
    s.status = C_OK
    s.n_steps = 0
    s.n_rejected = 0
    s.max_e_err = 0.0
    for i in range(4):
        s.y[i] = y0[i]
    s.e0 = c_energy(s.y, w, w0, g)
    if (not c_eom(s.y, w, w0, g, s.f)
            or s.y[0] * s.y[0] + s.y[1] * s.y[1] > SINGULAR_R2):
        s.status = C_SING
        return False
    s.h_abs = c_initial_step(s)
    return True


cdef bint rk_step(RK* s, double t_target, double* y_old, double* h_out) nogil:
    """One accepted (and shell-projected) step clamped to t_target.

    On success copies the pre-step state into y_old, stores the signed step
    in h_out, and leaves the stage derivatives in s.K for dense output.
    """
    cdef double min_step = 10.0 * fabs(
        nextafter(s.t, s.direction * INFINITY) - s.t)
    cdef double h_abs = fmax(s.h_abs, min_step)
    cdef bint rejected_singular = False, singular
    cdef double t_new, h, err, v, factor, de
    cdef double y_st[4]
    cdef double y_new[4]
    cdef double f_new[4]
    cdef int i

    while True:
        if h_abs < min_step:
            s.status = C_SING if rejected_singular else C_UNDER
            return False
        t_new = s.t + h_abs * s.direction
        if (t_new - t_target) * s.direction >= 0.0:
            t_new = t_target
        h = t_new - s.t
        for i in range(4):
            s.K[0][i] = s.f[i]
        singular = False

        for i in range(4):
            y_st[i] = s.y[i] + h * A2[0] * s.K[0][i]
        singular = not c_eom(y_st, s.w, s.w0, s.g, s.K[1])
        if not singular:
            for i in range(4):
                y_st[i] = s.y[i] + h * (A3[0] * s.K[0][i] + A3[1] * s.K[1][i])
            singular = not c_eom(y_st, s.w, s.w0, s.g, s.K[2])
        if not singular:
            for i in range(4):
                y_st[i] = s.y[i] + h * (A4[0] * s.K[0][i] + A4[1] * s.K[1][i]
                                        + A4[2] * s.K[2][i])
            singular = not c_eom(y_st, s.w, s.w0, s.g, s.K[3])
        if not singular:
            for i in range(4):
                y_st[i] = s.y[i] + h * (A5[0] * s.K[0][i] + A5[1] * s.K[1][i]
                                        + A5[2] * s.K[2][i] + A5[3] * s.K[3][i])
            singular = not c_eom(y_st, s.w, s.w0, s.g, s.K[4])
        if not singular:
            for i in range(4):
                y_st[i] = s.y[i] + h * (A6[0] * s.K[0][i] + A6[1] * s.K[1][i]
                                        + A6[2] * s.K[2][i] + A6[3] * s.K[3][i]
                                        + A6[4] * s.K[4][i])
            singular = not c_eom(y_st, s.w, s.w0, s.g, s.K[5])
        if not singular:
            for i in range(4):
                y_new[i] = s.y[i] + h * (BW[0] * s.K[0][i] + BW[2] * s.K[2][i]
                                         + BW[3] * s.K[3][i] + BW[4] * s.K[4][i]
                                         + BW[5] * s.K[5][i])
            singular = (not c_eom(y_new, s.w, s.w0, s.g, f_new)
                        or y_new[0] * y_new[0] + y_new[1] * y_new[1]
                        > SINGULAR_R2)
        if singular:
            rejected_singular = True
            s.n_rejected += 1
            h_abs = fabs(h) * MIN_FACTOR
            continue

        for i in range(4):
            s.K[6][i] = f_new[i]
        err = 0.0
        for i in range(4):
            v = h * (EW[0] * s.K[0][i] + EW[2] * s.K[2][i] + EW[3] * s.K[3][i]
                     + EW[4] * s.K[4][i] + EW[5] * s.K[5][i]
                     + EW[6] * s.K[6][i])
            v /= s.atol + s.rtol * fmax(fabs(s.y[i]), fabs(y_new[i]))
            err += v * v
        err = sqrt(err / 4.0)
        if err <= 1.0:
            factor = MAX_FACTOR if err == 0.0 else fmin(
                MAX_FACTOR, SAFETY * pow(err, -0.2))
            s.h_abs = fabs(h) * factor
            s.n_steps += 1
            for i in range(4):
                y_old[i] = s.y[i]
                s.y[i] = y_new[i]
                s.f[i] = f_new[i]
            s.t = t_new
            c_project(s.y, s.f, s.e0, s.w, s.w0, s.g)
            if s.y[0] * s.y[0] + s.y[1] * s.y[1] > SINGULAR_R2:
                s.status = C_SING
                return False
            de = fabs(c_energy(s.y, s.w, s.w0, s.g) - s.e0)
            if de > s.max_e_err:
                s.max_e_err = de
            h_out[0] = h
            return True
        rejected_singular = False
        s.n_rejected += 1
        h_abs = fabs(h) * fmax(MIN_FACTOR, SAFETY * pow(err, -0.2))


cdef inline void c_dense(RK* s, double* y_old, double h, double theta,
                         double* out) nogil:
    cdef double x1 = theta, x2 = theta * theta
    cdef double x3 = x2 * theta, x4 = x3 * theta
    cdef double q
    cdef int i, j
    for i in range(4):
        q = 0.0
        for j in range(7):
            q += s.K[j][i] * (DP[j][0] * x1 + DP[j][1] * x2 + DP[j][2] * x3
                              + DP[j][3] * x4)
        out[i] = y_old[i] + h * q


cdef inline double c_dense_q2(RK* s, double* y_old, double h,
                              double theta) nogil:
    cdef double x1 = theta, x2 = theta * theta
    cdef double x3 = x2 * theta, x4 = x3 * theta
    cdef double q = 0.0
    cdef int j
    for j in range(7):
        q += s.K[j][2] * (DP[j][0] * x1 + DP[j][1] * x2 + DP[j][2] * x3
                          + DP[j][3] * x4)
    return y_old[2] + h * q


cdef dict _make_info(RK* s):
    return {
        "kernel": KERNEL_NAME,
        "energy0": s.e0,
        "max_energy_error": s.max_e_err,
        "t_reached": s.t,
        "status": s.status,
        "n_steps": s.n_steps,
        "n_rejected": s.n_rejected,
    }


def integrate_path(y0, double t0, double t1, double rtol, double atol,
                   double omega, double omega0, double g, t_eval):
    """Same contract as the Python twin; see _kernel_py.integrate_path."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y0a = np.ascontiguousarray(
        y0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] te = np.ascontiguousarray(
        t_eval, dtype=np.float64)
    cdef Py_ssize_t m = te.shape[0]
    out_arr = np.full((m, 4), np.nan)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] tev = te
    cdef RK s
    cdef double direction = 1.0 if t1 >= t0 else -1.0
    cdef Py_ssize_t k = 0
    cdef double h = 0.0
    cdef double y_old[4]
    cdef double ys[4]
    cdef double fs[4]
    cdef int i
    cdef bint ok = rk_init(&s, &y0a[0], t0, direction, rtol, atol,
                           omega, omega0, g)

    with nogil:
        while k < m and (tev[k] - t0) * direction <= 0.0:
            for i in range(4):
                out[k, i] = s.y[i]
            k += 1
        if ok and t1 != t0:
            while (s.t - t1) * direction < 0.0:
                if not rk_step(&s, t1, y_old, &h):
                    break
                while k < m and (tev[k] - s.t) * direction <= 0.0:
                    c_dense(&s, y_old, h, (tev[k] - (s.t - h)) / h, ys)
                    if c_eom(ys, s.w, s.w0, s.g, fs):
                        c_project(ys, fs, s.e0, s.w, s.w0, s.g)
                    for i in range(4):
                        out[k, i] = ys[i]
                    k += 1

    return out_arr, _make_info(&s)


def section_crossings(y0, double t0, double rtol, double atol, double omega,
                      double omega0, double g, long max_crossings,
                      double t_limit, double q2_tol=1e-10,
                      double p2_min=1e-8, bint count_start=True):
    """Same contract as the Python twin; see _kernel_py.section_crossings."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y0a = np.ascontiguousarray(
        y0, dtype=np.float64)
    rows_arr = np.empty((max(max_crossings, 0), 5))
    cdef double[:, ::1] rows = rows_arr
    cdef RK s
    cdef long k = 0
    cdef double h = 0.0, t_end = t0 + t_limit
    cdef double lo, hi, mid, q2m, theta
    cdef double y_old[4]
    cdef double yc[4]
    cdef int it
    cdef bint ok = rk_init(&s, &y0a[0], t0, 1.0, rtol, atol,
                           omega, omega0, g)

    if not ok:
        return np.empty((0, 5)), _make_info(&s)

    with nogil:
        if count_start and fabs(s.y[2]) <= q2_tol and s.y[3] > p2_min:
            rows[k, 0] = t0
            rows[k, 1] = s.y[0]
            rows[k, 2] = s.y[1]
            rows[k, 3] = s.y[2]
            rows[k, 4] = s.y[3]
            k += 1
        while k < max_crossings:
            if s.t >= t_end:
                s.status = C_TLIM
                break
            if not rk_step(&s, t_end, y_old, &h):
                break
            if y_old[2] < 0.0 and s.y[2] >= 0.0:
                # Upward zero of q2 = section hit with p2 > 0; bisection on
                # the interpolant (steps are small against the q2 period, so
                # one crossing per step).
                lo = 0.0
                hi = 1.0
                for it in range(100):
                    mid = 0.5 * (lo + hi)
                    q2m = c_dense_q2(&s, y_old, h, mid)
                    if fabs(q2m) <= 0.1 * q2_tol:
                        lo = mid
                        hi = mid
                        break
                    if q2m < 0.0:
                        lo = mid
                    else:
                        hi = mid
                theta = 0.5 * (lo + hi)
                c_dense(&s, y_old, h, theta, yc)
                if yc[3] > p2_min and fabs(yc[2]) <= q2_tol:
                    rows[k, 0] = (s.t - h) + theta * h
                    rows[k, 1] = yc[0]
                    rows[k, 2] = yc[1]
                    rows[k, 3] = yc[2]
                    rows[k, 4] = yc[3]
                    k += 1

    return rows_arr[:k].copy(), _make_info(&s)
