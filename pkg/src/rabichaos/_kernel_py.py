"""Pure-Python integrator kernel (fallback twin of the compiled one).

Implements the same Dormand-Prince 5(4) stepper with dense output that
``_kernel_cy`` carries in C: equations of motion of the mean-field
Hamiltonian, adaptive error control, per-step energy-shell projection, and
upward-crossing detection of the q2 = 0 plane refined by bisection on the
quartic interpolant.  Slower by two orders of magnitude, selected only when
the extension is missing or RABICHAOS_PURE_PYTHON is set.

The projection step matters: an embedded 5(4) pair alone drifts in energy
linearly with time (about 1e-5 relative per 1e3 time units at tol 1e-10 on
the chaotic reference orbit), far outside the drift budget of long section
sweeps.  Each accepted step is therefore pulled back onto the initial energy
shell with up to two Newton corrections along grad H, a displacement of the
order of the local error; the reported drift is the post-correction residual.
"""

import math

import numpy as np

from ._tableau import A, B, E, MAX_FACTOR, MIN_FACTOR, P, SAFETY

KERNEL_NAME = "python"

STATUS_OK = 0
STATUS_SINGULARITY = 1
STATUS_STEP_UNDERFLOW = 2
STATUS_TLIMIT = 3

# Trajectories are aborted before the atomic disk rim, where the flow is
# singular (s -> 0): beyond this radius-squared a step is never accepted.
SINGULAR_R2 = 2.0 - 1e-9

_ERR_EXP = -0.2  # -1/(error-estimator order + 1)


def _eom(y, omega, omega0, g):
    """Hamilton's equations of the mean-field surface; None when singular."""
    q1, p1, q2, p2 = y
    r2 = q1 * q1 + p1 * p1
    arg = 4.0 - 2.0 * r2
    if arg <= 2e-9:
        return None
    s = math.sqrt(arg)
    return np.array([
        omega * p1 - 2.0 * g * q1 * q2 * p1 / s,
        -omega * q1 - g * q2 * (s - 2.0 * q1 * q1 / s),
        omega0 * p2,
        -omega0 * q2 - g * q1 * s,
    ])


def energy(y, omega, omega0, g):
    q1, p1, q2, p2 = y
    r2 = q1 * q1 + p1 * p1
    return (0.5 * omega * (r2 - 1.0)
            + 0.5 * omega0 * (q2 * q2 + p2 * p2)
            + g * q1 * q2 * math.sqrt(max(4.0 - 2.0 * r2, 0.0)))


def _initial_step(y0, f0, direction, rtol, atol, omega, omega0, g):
    scale = atol + rtol * np.abs(y0)
    d0 = math.sqrt(np.mean((y0 / scale) ** 2))
    d1 = math.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = _eom(y0 + h0 * direction * f0, omega, omega0, g)
    if f1 is None:
        return h0
    d2 = math.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def _dense(y_old, h, K, theta):
    """Quartic dense-output evaluation at fraction theta of the step."""
    x = np.array([theta, theta ** 2, theta ** 3, theta ** 4])
    return y_old + h * (K.T @ (P @ x))


def _project(y, f, e0, omega, omega0, g):
    """Pull y back onto the shell H = e0 along grad H (up to 2 Newton steps).

    grad H is a component permutation of the equations of motion, so f is
    reused; f is refreshed at the corrected point.  Returns (y, f) unchanged
    if the correction would leave the valid domain.
    """
    for _ in range(2):
        de = energy(y, omega, omega0, g) - e0
        if abs(de) <= 1e-14 * max(1.0, abs(e0)):
            break
        gh = np.array([-f[1], f[0], -f[3], f[2]])
        n2 = gh @ gh
        if n2 <= 1e-300:
            break
        y_try = y - (de / n2) * gh
        f_try = _eom(y_try, omega, omega0, g)
        if f_try is None:
            break
        y, f = y_try, f_try
    return y, f


class _Stepper:
    """Adaptive DOPRI5(4) driver over the 4-dimensional mean-field flow."""

    def __init__(self, y0, t0, direction, rtol, atol, omega, omega0, g):
        self.w = (omega, omega0, g)
        self.y = np.asarray(y0, dtype=float).copy()
        self.t = t0
        self.direction = direction
        self.rtol = rtol
        self.atol = atol
        self.f = _eom(self.y, *self.w)
        self.e0 = energy(self.y, *self.w)
        self.status = STATUS_OK
        self.n_steps = 0
        self.n_rejected = 0
        self.K = np.empty((7, 4))
        self.h_abs = None
        if self.f is None or self.y[0] ** 2 + self.y[1] ** 2 > SINGULAR_R2:
            self.status = STATUS_SINGULARITY
        else:
            self.h_abs = _initial_step(self.y, self.f, direction,
                                       rtol, atol, *self.w)

    def step(self, t_target):
        """Advance internal state by one accepted step, clamped to t_target.

        On success returns (y_old, h, t_new) with self.K holding the stage
        derivatives of the accepted step (for dense output); on failure sets
        self.status and returns None.
        """
        omega, omega0, g = self.w
        direction = self.direction
        min_step = 10.0 * abs(np.nextafter(self.t, direction * math.inf) - self.t)
        h_abs = max(self.h_abs, min_step)
        rejected_singular = False
        K = self.K
        while True:
            if h_abs < min_step:
                self.status = (STATUS_SINGULARITY if rejected_singular
                               else STATUS_STEP_UNDERFLOW)
                return None
            t_new = self.t + h_abs * direction
            if (t_new - t_target) * direction >= 0.0:
                t_new = t_target
            h = t_new - self.t
            K[0] = self.f
            singular = False
            for i in range(1, 6):
                fi = _eom(self.y + h * (K[:i].T @ A[i, :i]), omega, omega0, g)
                if fi is None:
                    singular = True
                    break
                K[i] = fi
            if not singular:
                y_new = self.y + h * (K[:6].T @ B)
                f_new = _eom(y_new, omega, omega0, g)
                singular = (f_new is None
                            or y_new[0] ** 2 + y_new[1] ** 2 > SINGULAR_R2)
            if singular:
                rejected_singular = True
                self.n_rejected += 1
                h_abs = abs(h) * MIN_FACTOR
                continue
            K[6] = f_new
            scale = self.atol + self.rtol * np.maximum(np.abs(self.y),
                                                       np.abs(y_new))
            err = math.sqrt(np.mean((h * (K.T @ E) / scale) ** 2))
            if err <= 1.0:
                factor = MAX_FACTOR if err == 0.0 else min(
                    MAX_FACTOR, SAFETY * err ** _ERR_EXP)
                self.h_abs = abs(h) * factor
                self.n_steps += 1
                y_old = self.y
                y_proj, f_proj = _project(y_new, f_new, self.e0,
                                          omega, omega0, g)
                if y_proj[0] ** 2 + y_proj[1] ** 2 > SINGULAR_R2:
                    self.status = STATUS_SINGULARITY
                    return None
                self.y = y_proj
                self.t = t_new
                self.f = f_proj.copy()
                return y_old, h, t_new
            rejected_singular = False
            self.n_rejected += 1
            h_abs = abs(h) * max(MIN_FACTOR, SAFETY * err ** _ERR_EXP)


def integrate_path(y0, t0, t1, rtol, atol, omega, omega0, g, t_eval):
    """Integrate from t0 to t1, sampling dense output at the t_eval nodes.

    Returns (Y, info): Y has one row per t_eval entry (NaN rows past an
    abort), info carries status, t_reached, step counts, the initial energy
    and the largest absolute energy deviation seen at accepted steps.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    out = np.full((len(t_eval), 4), np.nan)
    direction = 1.0 if t1 >= t0 else -1.0
    st = _Stepper(y0, t0, direction, rtol, atol, omega, omega0, g)
    e0 = st.e0
    info = {"kernel": KERNEL_NAME, "energy0": e0, "max_energy_error": 0.0,
            "t_reached": t0, "status": st.status, "n_steps": 0, "n_rejected": 0}
    k = 0
    while k < len(t_eval) and (t_eval[k] - t0) * direction <= 0.0:
        out[k] = st.y
        k += 1
    if st.status != STATUS_OK or t1 == t0:
        info["status"] = st.status
        return out, info

    while (st.t - t1) * direction < 0.0:
        result = st.step(t1)
        if result is None:
            break
        y_old, h, t_new = result
        while k < len(t_eval) and (t_eval[k] - t_new) * direction <= 0.0:
            ys = _dense(y_old, h, st.K, (t_eval[k] - (t_new - h)) / h)
            fs = _eom(ys, omega, omega0, g)
            if fs is not None:
                ys, _ = _project(ys, fs, e0, omega, omega0, g)
            out[k] = ys
            k += 1
        de = abs(energy(st.y, omega, omega0, g) - e0)
        if de > info["max_energy_error"]:
            info["max_energy_error"] = de

    info.update(status=st.status, t_reached=st.t,
                n_steps=st.n_steps, n_rejected=st.n_rejected)
    return out, info


def section_crossings(y0, t0, rtol, atol, omega, omega0, g, max_crossings,
                      t_limit, q2_tol=1e-10, p2_min=1e-8, count_start=True):
    """Collect upward crossings of the q2 = 0 plane along the trajectory.

    A crossing is an accepted-step interval where q2 passes from negative to
    nonnegative, refined by bisection on the dense interpolant until
    |q2| <= q2_tol; hits with p2 <= p2_min are discarded as tangential.
    Returns (crossings, info) with crossing rows (t, q1, p1, q2, p2).
    Integration stops after max_crossings hits or at t0 + t_limit
    (status STATUS_TLIMIT in the latter case).
    """
    rows = []
    st = _Stepper(y0, t0, 1.0, rtol, atol, omega, omega0, g)
    e0 = st.e0
    info = {"kernel": KERNEL_NAME, "energy0": e0, "max_energy_error": 0.0,
            "t_reached": t0, "status": st.status, "n_steps": 0, "n_rejected": 0}
    if st.status != STATUS_OK:
        return np.empty((0, 5)), info
    if count_start and abs(st.y[2]) <= q2_tol and st.y[3] > p2_min:
        rows.append((t0, *st.y))

    t_end = t0 + t_limit
    while len(rows) < max_crossings:
        if st.t >= t_end:
            st.status = STATUS_TLIMIT
            break
        result = st.step(t_end)
        if result is None:
            break
        y_old, h, t_new = result
        q2a, q2b = y_old[2], st.y[2]
        if q2a < 0.0 <= q2b:
            # An upward zero of q2 is exactly a section hit with p2 > 0
            # (q2' = omega0 p2).  Steps are small against the q2 oscillation,
            # so at most one crossing fits in a step.
            lo, hi = 0.0, 1.0
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                q2m = _dense(y_old, h, st.K, mid)[2]
                if abs(q2m) <= 0.1 * q2_tol:
                    lo = hi = mid
                    break
                if q2m < 0.0:
                    lo = mid
                else:
                    hi = mid
            theta = 0.5 * (lo + hi)
            yc = _dense(y_old, h, st.K, theta)
            if yc[3] > p2_min and abs(yc[2]) <= q2_tol:
                rows.append(((t_new - h) + theta * h, *yc))
        de = abs(energy(st.y, omega, omega0, g) - e0)
        if de > info["max_energy_error"]:
            info["max_energy_error"] = de

    info.update(status=st.status, t_reached=st.t,
                n_steps=st.n_steps, n_rejected=st.n_rejected)
    out = np.array(rows) if rows else np.empty((0, 5))
    return out, info
