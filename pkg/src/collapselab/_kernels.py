"""Jitted inner loops for the transformed-coordinate time steppers.

One module holds every hot loop so the solver layer stays readable.  The
kernels operate on plain arrays; all domain objects live one layer up.
Falls back to pure Python if numba is unavailable (functional, but far too
slow for production sweeps).
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco

ACCEPT = 0
REJECT_MONOTONE = 1
REJECT_RATE = 2


@njit(cache=True, nogil=True, fastmath=True)
def _solve_tridiagonal(lo, di, up, rhs, x, cp, dp):
    """Thomas solve for interior nodes 1..n-1; x[0], x[n] already pinned."""
    n = x.shape[0] - 1
    cp[1] = up[1] / di[1]
    dp[1] = (rhs[1] - lo[1] * x[0]) / di[1]
    for i in range(2, n):
        r = rhs[i]
        u = up[i]
        if i == n - 1:
            r -= u * x[n]
            u = 0.0
        denom = di[i] - lo[i] * cp[i - 1]
        cp[i] = u / denom
        dp[i] = (r - lo[i] * dp[i - 1]) / denom
    if n == 2:
        x[1] = (rhs[1] - lo[1] * x[0] - up[1] * x[2]) / di[1]
        return
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, 0, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]


@njit(cache=True, nogil=True, fastmath=True)
def _monotone_accept(x, tol):
    """True if ``x`` is nondecreasing within ``tol``.

    Round-off dips and overshoots are projected back between the running
    maximum and the pinned right endpoint, which stay untouched.
    """
    n = x.shape[0] - 1
    cap = x[n]
    prev = x[0]
    for i in range(1, n):
        xi = x[i]
        if xi < prev - tol or xi > cap + tol:
            return False
        if xi < prev:
            xi = prev
        elif xi > cap:
            xi = cap
        x[i] = xi
        prev = xi
    return x[n] >= prev - tol


@njit(cache=True, nogil=True, fastmath=True)
def max_backward_slope(x, coords):
    out = 0.0
    for i in range(1, x.shape[0]):
        slope = (x[i] - x[i - 1]) / (coords[i] - coords[i - 1])
        if slope > out:
            out = slope
    return out


@njit(cache=True, nogil=True, fastmath=True)
def _max_abs_diff(a, b):
    out = 0.0
    for i in range(a.shape[0]):
        d = abs(a[i] - b[i])
        if d > out:
            out = d
    return out


@njit(cache=True, nogil=True, fastmath=True)
def front_cfl_limit(coords, X, vel, hloc, jump_floor):
    """Largest step resolving the advection of the mass-carrying front.

    Only resolved, mass-carrying cells restrict the step: nodes whose
    neighborhood carries less than ``jump_floor`` are quiescent, and the
    innermost cells are skipped because a sub-grid core there is a stiff
    slaved mode that the L-stable implicit solve damps correctly.
    """
    dt = 1e300
    n = coords.shape[0] - 1
    for i in range(4, n):
        if X[i + 1] - X[i - 1] < jump_floor:
            continue
        c = abs(vel[i])
        if c > 0.0:
            cand = hloc[i] / c
            if cand < dt:
                dt = cand
    return dt


@njit(cache=True, nogil=True, fastmath=True)
def transport_velocity_4d(s, W, mu, vel):
    for i in range(1, s.shape[0] - 1):
        vel[i] = 4.0 * (W[i] - 0.25 * mu * s[i])


@njit(cache=True, nogil=True, fastmath=True)
def transport_velocity_2d(rho, M, transport_mass, vel):
    two_pi = 2.0 * np.pi
    for i in range(1, rho.shape[0] - 1):
        vel[i] = 2.0 * (M[i] - transport_mass * rho[i] / two_pi)


@njit(cache=True, nogil=True, fastmath=True)
def _assemble_advection_diffusion(coords, vel, dcoef, wlo, wmid, whi, dt,
                                  lo, di, up):
    """Rows of ``I - dt*(diffusion + upwinded advection)`` for interior nodes.

    The advection term is ``vel * d/d(coord)`` with the one-sided difference
    chosen by the sign of ``vel``; both pieces keep the matrix an M-matrix,
    so the solve preserves positivity regardless of the step size.
    """
    n = coords.shape[0] - 1
    for i in range(1, n):
        a = -dt * dcoef[i] * wlo[i]
        b = 1.0 + dt * dcoef[i] * wmid[i]
        c = -dt * dcoef[i] * whi[i]
        v = vel[i]
        if v > 0.0:
            k = dt * v / (coords[i + 1] - coords[i])
            b += k
            c -= k
        elif v < 0.0:
            k = -dt * v / (coords[i] - coords[i - 1])
            b += k
            a -= k
        lo[i] = a
        di[i] = b
        up[i] = c
    lo[0] = lo[n] = 0.0
    di[0] = di[n] = 1.0
    up[0] = up[n] = 0.0


@njit(cache=True, nogil=True, fastmath=True)
def _limited_correction(coords, X, vel, dt, out):
    """Explicit antidiffusive correction lifting transport to second order.

    Deferred correction between the first-order upwind slope (the one in
    the implicit matrix) and a van Leer harmonic-mean slope; the limiter
    vanishes at extrema and discontinuities, falling back to the monotone
    first-order scheme there.
    """
    n = coords.shape[0] - 1
    for i in range(1, n):
        v = vel[i]
        if v == 0.0:
            out[i] = 0.0
            continue
        b = (X[i] - X[i - 1]) / (coords[i] - coords[i - 1])
        f = (X[i + 1] - X[i]) / (coords[i + 1] - coords[i])
        prod = b * f
        lim = 2.0 * prod / (b + f) if prod > 0.0 else 0.0
        upw = f if v > 0.0 else b
        out[i] = dt * v * (lim - upw)


@njit(cache=True, nogil=True, fastmath=True)
def step_attempt_4d(s, U, W, Unew, Wnew, dt, vel, zero_vel, delta, u_end,
                    w_end_new, dcoef, wlo, wmid, whi, mono_tol,
                    rate_cap_u, rate_cap_w, lo, di, up, cp, dp, rw, ru):
    """One step attempt for the 4D pair; returns an accept/reject code.

    Diffusion and first-order upwinded transport of ``U`` (velocity ``vel``
    lagged at the current state) are implicit; the limited second-order
    transport correction and the production/decay coupling of ``W`` are
    explicit.  Rejected when spatial monotonicity breaks or the per-step
    change exceeds the rate caps.
    """
    n = s.shape[0] - 1
    _limited_correction(s, U, vel, dt, ru)
    for i in range(1, n):
        rw[i] = W[i] + dt * (U[i] - delta * W[i])
        ru[i] += U[i]
    Unew[0] = 0.0
    Wnew[0] = 0.0
    Unew[n] = u_end
    Wnew[n] = w_end_new
    _assemble_advection_diffusion(s, vel, dcoef, wlo, wmid, whi, dt, lo, di, up)
    _solve_tridiagonal(lo, di, up, ru, Unew, cp, dp)
    _assemble_advection_diffusion(s, zero_vel, dcoef, wlo, wmid, whi, dt, lo, di, up)
    _solve_tridiagonal(lo, di, up, rw, Wnew, cp, dp)
    if _max_abs_diff(Unew, U) > rate_cap_u or _max_abs_diff(Wnew, W) > rate_cap_w:
        return REJECT_RATE
    if not _monotone_accept(Unew, mono_tol):
        return REJECT_MONOTONE
    if not _monotone_accept(Wnew, mono_tol):
        return REJECT_MONOTONE
    return ACCEPT


@njit(cache=True, nogil=True, fastmath=True)
def step_attempt_2d(rho, M, Mnew, dt, vel, m_end,
                    dcoef, wlo, wmid, whi, mono_tol, rate_cap,
                    lo, di, up, cp, dp, ru):
    """One step attempt for the unit-disk equation; see :func:`step_attempt_4d`."""
    n = rho.shape[0] - 1
    _limited_correction(rho, M, vel, dt, ru)
    for i in range(1, n):
        ru[i] += M[i]
    Mnew[0] = 0.0
    Mnew[n] = m_end
    _assemble_advection_diffusion(rho, vel, dcoef, wlo, wmid, whi, dt, lo, di, up)
    _solve_tridiagonal(lo, di, up, ru, Mnew, cp, dp)
    if _max_abs_diff(Mnew, M) > rate_cap:
        return REJECT_RATE
    if not _monotone_accept(Mnew, mono_tol):
        return REJECT_MONOTONE
    return ACCEPT
