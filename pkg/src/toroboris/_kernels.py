"""Compiled step loop for the closed-form toroidal field family.

The kernel is the hot path for long-horizon runs (reference solutions need
1e7+ steps).  With numba present it runs at ~30 ns/step; without numba the
same function executes as plain Python, so either way one code path defines
the arithmetic.

The recursion is carried in summed form: the increment d^n = x^n - x^{n-1}
is the solver variable and positions accumulate as x += d.  This is the
same closed-form solve as in position variables but keeps round-off at the
scale of the increments, which matters over 1e7 steps.

Expression shapes here must stay aligned with boris._generic_loop (which
handles arbitrary field models); equality of the two paths is pinned by a
test.
"""

from __future__ import annotations

from math import sqrt

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


STATUS_OK = 0
STATUS_AXIS = 1
STATUS_DOMAIN = 2
STATUS_RUNAWAY = 3


@njit(cache=False)
def two_step_loop(
    n_steps,
    sample_every,
    h,
    eps,
    mu0,
    a0,
    a1,
    a2,
    c_e,
    r_min,
    b_min,
    v_max,
    x_arr,
    d_arr,
    out_t,
    out_x,
    out_v,
):
    """Iterate the two-step recursion from x^1 = x_arr, d^1 = d_arr.

    Step i advances (x^i, d^i) to (x^{i+1}, d^{i+1}); the centered velocity
    (d^i + d^{i+1}) / (2h) is recorded whenever i is a multiple of
    sample_every.  Sample row 0 (the initial state) is filled by the
    caller.  Returns (status, rows_written, steps_completed).
    """
    x1, x2, x3 = x_arr[0], x_arr[1], x_arr[2]
    d1, d2, d3 = d_arr[0], d_arr[1], d_arr[2]
    half_h = 0.5 * h
    h2 = h * h
    inv_2h = 1.0 / (2.0 * h)
    inv_eps = 1.0 / eps
    bound = abs(h) * v_max
    k = 1
    for i in range(1, n_steps + 1):
        r = sqrt(x1 * x1 + x2 * x2)
        if r < r_min:
            return STATUS_AXIS, k, i - 1
        z = x3
        inv_r = 1.0 / r
        er1 = x1 * inv_r
        er2 = x2 * inv_r
        bb = a0 + a1 * r + a2 * z * z
        if bb <= b_min:
            return STATUS_DOMAIN, k, i - 1
        scale = bb * inv_eps
        B1 = -scale * er2
        B2 = scale * er1
        B3 = 0.0
        gr = a1 * inv_eps * mu0
        gz = 2.0 * a2 * z * inv_eps * mu0
        em_r = c_e * z - gr
        em1 = em_r * er1
        em2 = em_r * er2
        em3 = c_e * r - gz
        cx1 = half_h * B1
        cx2 = half_h * B2
        cx3 = half_h * B3
        q1 = d2 * B3 - d3 * B2
        q2 = d3 * B1 - d1 * B3
        q3 = d1 * B2 - d2 * B1
        r1 = d1 + half_h * q1 + h2 * em1
        r2 = d2 + half_h * q2 + h2 * em2
        r3 = d3 + half_h * q3 + h2 * em3
        dot = cx1 * r1 + cx2 * r2 + cx3 * r3
        den = 1.0 / (1.0 + cx1 * cx1 + cx2 * cx2 + cx3 * cx3)
        dn1 = (r1 - (cx2 * r3 - cx3 * r2) + dot * cx1) * den
        dn2 = (r2 - (cx3 * r1 - cx1 * r3) + dot * cx2) * den
        dn3 = (r3 - (cx1 * r2 - cx2 * r1) + dot * cx3) * den
        if sqrt(dn1 * dn1 + dn2 * dn2 + dn3 * dn3) > bound:
            return STATUS_RUNAWAY, k, i - 1
        if i % sample_every == 0:
            out_t[k] = i * h
            out_x[k, 0] = x1
            out_x[k, 1] = x2
            out_x[k, 2] = x3
            out_v[k, 0] = (d1 + dn1) * inv_2h
            out_v[k, 1] = (d2 + dn2) * inv_2h
            out_v[k, 2] = (d3 + dn3) * inv_2h
            k += 1
        x1 = x1 + dn1
        x2 = x2 + dn2
        x3 = x3 + dn3
        d1 = dn1
        d2 = dn2
        d3 = dn3
    return STATUS_OK, k, n_steps
