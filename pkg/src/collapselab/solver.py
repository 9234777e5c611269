"""Time integration of the transformed Dirichlet systems.

The 4D cooperative pair ``(U, W)`` and the 2D scalar equation are advanced
with a semi-implicit scheme: degenerate diffusion and the upwinded transport
(velocity lagged at the current state) share one tridiagonal M-matrix solve,
while production/decay is explicit.  Boundary values are re-imposed every
step, with the producer endpoint taken from its exact exponential
relaxation.  Steps are adaptive: rejected and halved when spatial
monotonicity breaks or the solution moves more than a rate cap per step;
blowup is declared on a slope or origin-value threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .model import (
    MASS_KIND_M2D,
    MASS_KIND_U4D,
    MASS_KIND_W4D,
    SPHERE_AREA_4D,
    Grid,
    MassProfile,
    RadialProfile,
)
from .subsolutions import TIME_CLIP, Subsolution2D, SubsolutionPair4D
from .transform import forward_mass_2d, forward_mass_4d

TERM_REACHED_END = "reached t_end"
TERM_BLOWUP = "blowup detected"
TERM_STEP_COLLAPSE = "step-size collapse"
TERM_STEP_BUDGET = "step budget exhausted"

DT_FLOOR = 1e-14
DEFAULT_SLOPE_THRESHOLD = 1e8
DEFAULT_RATE_CAP = 0.02
VALUE_THRESHOLD_4D = 0.9 * 32.0
VALUE_THRESHOLD_2D = 0.9 * 4.0


class StepCollapseError(RuntimeError):
    """Raised when the adaptive step falls below the hard floor."""


@dataclass(frozen=True)
class SolverState4D:
    grid: Grid
    U: np.ndarray
    W: np.ndarray
    t: float
    blowup: bool = False

    @property
    def mu(self) -> float:
        return 4.0 * float(self.W[-1])

    @property
    def max_slope(self) -> float:
        return float(_kernels.max_backward_slope(self.U, self.grid.nodes))

    def mass_profile_u(self) -> MassProfile:
        return MassProfile(coords=self.grid.nodes, values=self.U, kind=MASS_KIND_U4D)

    def mass_profile_w(self) -> MassProfile:
        return MassProfile(coords=self.grid.nodes, values=self.W, kind=MASS_KIND_W4D)


@dataclass(frozen=True)
class SolverState2D:
    grid: Grid
    M: np.ndarray
    t: float
    blowup: bool = False

    @property
    def max_slope(self) -> float:
        return float(_kernels.max_backward_slope(self.M, self.grid.nodes))

    def mass_profile(self) -> MassProfile:
        return MassProfile(coords=self.grid.nodes, values=self.M, kind=MASS_KIND_M2D)


@dataclass
class Trajectory:
    """Snapshots of a run plus its termination record."""

    dim: int
    grid: Grid
    mass_m: float
    delta: float | None
    times: np.ndarray
    U: np.ndarray
    W: np.ndarray | None
    termination: str
    t_final: float
    final_max_slope: float
    final_origin_value: float
    w0_endpoint: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_snapshots(self) -> int:
        return len(self.times)

    def state(self, k: int):
        if self.dim == 4:
            return SolverState4D(
                grid=self.grid, U=self.U[k], W=self.W[k], t=float(self.times[k]),
                blowup=self.termination == TERM_BLOWUP and k == self.n_snapshots - 1,
            )
        return SolverState2D(
            grid=self.grid, M=self.U[k], t=float(self.times[k]),
            blowup=self.termination == TERM_BLOWUP and k == self.n_snapshots - 1,
        )


class _Workspace:
    """Preallocated arrays shared by the step attempts of one run."""

    def __init__(self, coords: np.ndarray, diffusion: np.ndarray):
        n = len(coords)
        self.coords = coords
        self.dcoef = diffusion
        wlo = np.zeros(n)
        wmid = np.zeros(n)
        whi = np.zeros(n)
        hm = coords[1:-1] - coords[:-2]
        hp = coords[2:] - coords[1:-1]
        wlo[1:-1] = 2.0 / (hm * (hm + hp))
        whi[1:-1] = 2.0 / (hp * (hm + hp))
        wmid[1:-1] = wlo[1:-1] + whi[1:-1]
        self.wlo, self.wmid, self.whi = wlo, wmid, whi
        hloc = np.full(n, np.inf)
        hloc[1:-1] = np.minimum(hm, hp)
        self.hloc = hloc
        self.vel = np.zeros(n)
        self.zero_vel = np.zeros(n)
        self.lo = np.zeros(n)
        self.di = np.ones(n)
        self.up = np.zeros(n)
        self.cp = np.zeros(n)
        self.dp = np.zeros(n)
        self.rw = np.zeros(n)
        self.ru = np.zeros(n)


def _workspace_4d(grid: Grid) -> _Workspace:
    return _Workspace(grid.nodes, 16.0 * grid.nodes**1.5)


def _workspace_2d(grid: Grid) -> _Workspace:
    return _Workspace(grid.nodes, 4.0 * grid.nodes)


def _as_mass_values(data, grid: Grid, dim: int, kind: str) -> np.ndarray:
    """Nodal cumulative-mass values on ``grid`` from either input form."""
    if isinstance(data, MassProfile):
        if data.kind != kind:
            raise ValueError(f"expected a {kind} mass profile")
        if len(data.coords) == len(grid.nodes) and np.array_equal(data.coords, grid.nodes):
            return data.values.copy()
        return data.interp(grid.nodes)
    if isinstance(data, RadialProfile):
        fwd = forward_mass_4d(data, grid, kind=kind) if dim == 4 else forward_mass_2d(data, grid)
        return fwd.values.copy()
    raise TypeError("initial data must be a RadialProfile or MassProfile")


def _mono_tol(scale: float) -> float:
    return 1e-11 * max(1.0, scale)


def step_4d(state: SolverState4D, dt: float, delta: float,
            mu_override: float | None = None,
            w_end_override: float | None = None,
            rate_cap: float = DEFAULT_RATE_CAP) -> SolverState4D:
    """Advance one accepted step, halving ``dt`` on rejects.

    The producer endpoint follows its exact relaxation anchored at the
    current state; the transport velocity uses the producer mean at the
    current time unless overridden.
    """
    ws = _workspace_4d(state.grid)
    s = state.grid.nodes
    Unew = np.empty_like(state.U)
    Wnew = np.empty_like(state.W)
    u_end = float(state.U[-1])
    w_end_now = float(state.W[-1])
    mass_m = SPHERE_AREA_4D * u_end
    w_scale = max(w_end_now, u_end / delta if delta > 0.0 else u_end, 1.0)
    tol = _mono_tol(max(u_end, w_end_now))
    cap_u = rate_cap * max(1.0, u_end)
    cap_w = rate_cap * w_scale
    mu = state.mu if mu_override is None else mu_override
    _kernels.transport_velocity_4d(s, state.W, mu, ws.vel)
    while True:
        if w_end_override is not None:
            w_end_new = w_end_override
        elif delta > 0.0:
            decay = math.exp(-delta * dt)
            w_end_new = w_end_now * decay + mass_m / (SPHERE_AREA_4D * delta) * (1.0 - decay)
        else:
            w_end_new = w_end_now + mass_m / SPHERE_AREA_4D * dt
        code = _kernels.step_attempt_4d(
            s, state.U, state.W, Unew, Wnew, dt, ws.vel, ws.zero_vel, delta,
            u_end, w_end_new, ws.dcoef, ws.wlo, ws.wmid, ws.whi, tol,
            cap_u, cap_w, ws.lo, ws.di, ws.up, ws.cp, ws.dp, ws.rw, ws.ru,
        )
        if code == _kernels.ACCEPT:
            return SolverState4D(grid=state.grid, U=Unew, W=Wnew, t=state.t + dt)
        dt *= 0.5
        if dt < DT_FLOOR:
            raise StepCollapseError(f"step collapsed below {DT_FLOOR} at t={state.t}")


def step_2d(state: SolverState2D, dt: float, mass_m: float,
            transport_mass: float | None = None,
            rate_cap: float = DEFAULT_RATE_CAP) -> SolverState2D:
    """2D analog of :func:`step_4d`."""
    ws = _workspace_2d(state.grid)
    rho = state.grid.nodes
    Mnew = np.empty_like(state.M)
    m_end = float(state.M[-1])
    if transport_mass is None:
        transport_mass = mass_m
    tol = _mono_tol(m_end)
    cap = rate_cap * max(1.0, m_end)
    _kernels.transport_velocity_2d(rho, state.M, transport_mass, ws.vel)
    while True:
        code = _kernels.step_attempt_2d(
            rho, state.M, Mnew, dt, ws.vel, m_end,
            ws.dcoef, ws.wlo, ws.wmid, ws.whi, tol, cap,
            ws.lo, ws.di, ws.up, ws.cp, ws.dp, ws.ru,
        )
        if code == _kernels.ACCEPT:
            return SolverState2D(grid=state.grid, M=Mnew, t=state.t + dt)
        dt *= 0.5
        if dt < DT_FLOOR:
            raise StepCollapseError(f"step collapsed below {DT_FLOOR} at t={state.t}")


def _interval(t_end: float, interval: float | None) -> float:
    if interval is None:
        interval = t_end / 100.0 if t_end > 0.0 else 1.0
    return max(interval, 1e-12)


def run_4d(
    u0,
    w0,
    *,
    delta: float,
    mass_m: float | None = None,
    grid: Grid | None = None,
    n: int = 2048,
    t_end: float = 10.0,
    snapshot_interval: float | None = None,
    dt_init: float = 1e-6,
    dt_max: float | None = None,
    rate_cap: float = DEFAULT_RATE_CAP,
    cfl: float = 0.5,
    max_steps: int | None = None,
    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD,
    value_threshold: float = VALUE_THRESHOLD_4D,
    value_node: int = 1,
    mu_override: float | None = None,
    w_end_override: float | None = None,
) -> Trajectory:
    """Integrate the 4D pair from radial densities or mass profiles.

    Returns the trajectory with snapshots every ``snapshot_interval`` (plus
    the initial and final states) and the termination cause: the horizon,
    a detected blowup, a step-size collapse, or an exhausted step budget.
    """
    if grid is None:
        grid = Grid.radial_4d(n)
    if grid.policy != "radial-4d":
        raise ValueError("run_4d needs a 4D grid")
    s = grid.nodes
    U = _as_mass_values(u0, grid, 4, MASS_KIND_U4D)
    W = _as_mass_values(w0, grid, 4, MASS_KIND_W4D)
    if mass_m is None:
        mass_m = SPHERE_AREA_4D * float(U[-1])
    elif not math.isclose(SPHERE_AREA_4D * float(U[-1]), mass_m, rel_tol=1e-8, abs_tol=1e-12):
        raise ValueError("initial data mass is inconsistent with mass_m")
    u_end = float(U[-1])
    w0_end = float(W[-1])
    ws = _workspace_4d(grid)
    Unew = np.empty_like(U)
    Wnew = np.empty_like(W)
    w_relax = mass_m / (SPHERE_AREA_4D * delta) if delta > 0.0 else w0_end
    w_scale = max(1.0, w0_end, w_relax)
    tol = _mono_tol(max(u_end, w_scale))
    cap_u = rate_cap * max(1.0, u_end)
    cap_w = rate_cap * w_scale

    interval = _interval(t_end, snapshot_interval)
    if dt_max is None:
        dt_max = interval
    react_cap = 0.5 / delta if delta > 0.0 else math.inf
    dt_next = min(dt_init, dt_max)

    def w_end_at(t: float) -> float:
        if w_end_override is not None:
            return w_end_override
        if delta > 0.0:
            decay = math.exp(-delta * t)
            return w0_end * decay + mass_m / (SPHERE_AREA_4D * delta) * (1.0 - decay)
        return w0_end + mass_m / SPHERE_AREA_4D * t

    times = [0.0]
    snaps_u = [U.copy()]
    snaps_w = [W.copy()]
    termination = TERM_REACHED_END
    t = 0.0
    next_snap = interval

    def blown(Ucur) -> bool:
        slope = _kernels.max_backward_slope(Ucur, s)
        return slope >= slope_threshold or Ucur[value_node] >= value_threshold

    jump_floor = 5e-3 * max(u_end, 1e-300)
    steps = 0
    if blown(U):
        termination = TERM_BLOWUP
    else:
        while t < t_end * (1.0 - 1e-13):
            if max_steps is not None and steps >= max_steps:
                termination = TERM_STEP_BUDGET
                break
            mu = mu_override if mu_override is not None else 4.0 * w_end_at(t)
            _kernels.transport_velocity_4d(s, W, mu, ws.vel)
            dt_front = cfl * _kernels.front_cfl_limit(s, U, ws.vel, ws.hloc, jump_floor)
            dt = min(dt_next, dt_front, react_cap, next_snap - t, t_end - t)
            accepted = False
            while True:
                code = _kernels.step_attempt_4d(
                    s, U, W, Unew, Wnew, dt, ws.vel, ws.zero_vel, delta,
                    u_end, w_end_at(t + dt), ws.dcoef, ws.wlo, ws.wmid, ws.whi,
                    tol, cap_u, cap_w, ws.lo, ws.di, ws.up, ws.cp, ws.dp,
                    ws.rw, ws.ru,
                )
                if code == _kernels.ACCEPT:
                    accepted = True
                    break
                dt *= 0.5
                if dt < DT_FLOOR:
                    break
            if not accepted:
                termination = TERM_STEP_COLLAPSE
                break
            t += dt
            steps += 1
            U, Unew = Unew, U
            W, Wnew = Wnew, W
            dt_next = min(dt * 1.25, dt_max)
            if t >= next_snap * (1.0 - 1e-12):
                times.append(t)
                snaps_u.append(U.copy())
                snaps_w.append(W.copy())
                next_snap += interval
            if blown(U):
                termination = TERM_BLOWUP
                break

    if times[-1] != t:
        times.append(t)
        snaps_u.append(U.copy())
        snaps_w.append(W.copy())
    return Trajectory(
        dim=4, grid=grid, mass_m=mass_m, delta=delta,
        times=np.asarray(times), U=np.asarray(snaps_u), W=np.asarray(snaps_w),
        termination=termination, t_final=t,
        final_max_slope=float(_kernels.max_backward_slope(U, s)),
        final_origin_value=float(U[1]),
        w0_endpoint=w0_end,
        meta={"slope_threshold": slope_threshold, "value_threshold": value_threshold,
              "steps": steps},
    )


def run_2d(
    u0,
    *,
    mass_m: float | None = None,
    grid: Grid | None = None,
    n: int = 2048,
    t_end: float = 10.0,
    snapshot_interval: float | None = None,
    dt_init: float = 1e-6,
    dt_max: float | None = None,
    rate_cap: float = DEFAULT_RATE_CAP,
    cfl: float = 0.5,
    max_steps: int | None = None,
    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD,
    value_threshold: float = VALUE_THRESHOLD_2D,
    value_node: int = 1,
    transport_mass: float | None = None,
) -> Trajectory:
    """Integrate the unit-disk equation; see :func:`run_4d`.

    ``transport_mass`` overrides the mass entering the drift normalization
    (0 recovers the free-space operator solved by the stationary family).
    """
    if grid is None:
        grid = Grid.radial_2d(n)
    if grid.policy != "radial-2d":
        raise ValueError("run_2d needs a 2D grid")
    rho = grid.nodes
    M = _as_mass_values(u0, grid, 2, MASS_KIND_M2D)
    if mass_m is None:
        mass_m = 2.0 * math.pi * float(M[-1])
    elif not math.isclose(2.0 * math.pi * float(M[-1]), mass_m, rel_tol=1e-8, abs_tol=1e-12):
        raise ValueError("initial data mass is inconsistent with mass_m")
    m_end = float(M[-1])
    if transport_mass is None:
        transport_mass = mass_m
    ws = _workspace_2d(grid)
    Mnew = np.empty_like(M)
    tol = _mono_tol(m_end)
    cap = rate_cap * max(1.0, m_end)

    interval = _interval(t_end, snapshot_interval)
    if dt_max is None:
        dt_max = interval
    dt_next = min(dt_init, dt_max)

    times = [0.0]
    snaps = [M.copy()]
    termination = TERM_REACHED_END
    t = 0.0
    next_snap = interval

    def blown(Mcur) -> bool:
        slope = _kernels.max_backward_slope(Mcur, rho)
        return slope >= slope_threshold or Mcur[value_node] >= value_threshold

    jump_floor = 5e-3 * max(m_end, 1e-300)
    steps = 0
    if blown(M):
        termination = TERM_BLOWUP
    else:
        while t < t_end * (1.0 - 1e-13):
            if max_steps is not None and steps >= max_steps:
                termination = TERM_STEP_BUDGET
                break
            _kernels.transport_velocity_2d(rho, M, transport_mass, ws.vel)
            dt_front = cfl * _kernels.front_cfl_limit(rho, M, ws.vel, ws.hloc, jump_floor)
            dt = min(dt_next, dt_front, next_snap - t, t_end - t)
            accepted = False
            while True:
                code = _kernels.step_attempt_2d(
                    rho, M, Mnew, dt, ws.vel, m_end,
                    ws.dcoef, ws.wlo, ws.wmid, ws.whi, tol, cap,
                    ws.lo, ws.di, ws.up, ws.cp, ws.dp, ws.ru,
                )
                if code == _kernels.ACCEPT:
                    accepted = True
                    break
                dt *= 0.5
                if dt < DT_FLOOR:
                    break
            if not accepted:
                termination = TERM_STEP_COLLAPSE
                break
            t += dt
            steps += 1
            M, Mnew = Mnew, M
            dt_next = min(dt * 1.25, dt_max)
            if t >= next_snap * (1.0 - 1e-12):
                times.append(t)
                snaps.append(M.copy())
                next_snap += interval
            if blown(M):
                termination = TERM_BLOWUP
                break

    if times[-1] != t:
        times.append(t)
        snaps.append(M.copy())
    return Trajectory(
        dim=2, grid=grid, mass_m=mass_m, delta=None,
        times=np.asarray(times), U=np.asarray(snaps), W=None,
        termination=termination, t_final=t,
        final_max_slope=float(_kernels.max_backward_slope(M, rho)),
        final_origin_value=float(M[1]),
        meta={"slope_threshold": slope_threshold, "value_threshold": value_threshold,
              "steps": steps},
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Per-snapshot positive part of (subsolution - solution)."""

    times: np.ndarray
    violations: np.ndarray

    @property
    def max_violation(self) -> float:
        return float(np.max(self.violations)) if len(self.violations) else 0.0


def comparison_monitor(traj: Trajectory, barrier) -> ComparisonReport:
    """Monitor the comparison ordering along a trajectory.

    For snapshots inside the barrier's existence window, reports
    ``max (barrier - solution)_+`` over the nodes.  Diagnostic only: a
    positive violation flags either truncation error or initial data that
    never dominated the barrier.
    """
    if traj.dim == 4:
        if not isinstance(barrier, SubsolutionPair4D):
            raise TypeError("4D trajectory needs a SubsolutionPair4D")
        t_star = barrier.params.t_star
    else:
        if not isinstance(barrier, Subsolution2D):
            raise TypeError("2D trajectory needs a Subsolution2D")
        t_star = barrier.params.t_star
    coords = traj.grid.nodes
    times = []
    violations = []
    t_cap = t_star * TIME_CLIP
    for k, t in enumerate(traj.times):
        if t > t_cap:
            continue
        gap = barrier.u_bar(coords, float(t)) - traj.U[k]
        times.append(float(t))
        violations.append(max(0.0, float(np.max(gap))))
    return ComparisonReport(times=np.asarray(times), violations=np.asarray(violations))
