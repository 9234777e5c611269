"""Energy functional, dissipation estimates, invariant audits, collapse reports.

All quantities are post-processing over immutable trajectory snapshots.  The
energy combines entropy, chemical coupling, and the two potential terms; its
decay rate is estimated from consecutive snapshots and compared against the
dissipation integral, giving a per-interval identity residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SPHERE_AREA_4D, MassProfile
from .solver import SolverState4D, Trajectory, TERM_BLOWUP
from .transform import (
    density_from_mass_2d,
    density_from_mass_4d,
    reconstruct_potential,
)

_ENTROPY_FLOOR = 1e-300
_DENSITY_GUARD = 1e-12


def _xlogx(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    mask = u > _ENTROPY_FLOOR
    out[mask] = u[mask] * np.log(u[mask])
    return out


@dataclass(frozen=True)
class EnergySnapshot:
    """One evaluation of the energy functional and its four terms."""

    t: float
    entropy: float
    coupling: float
    laplacian_sq: float
    gradient_sq: float
    total: float


def energy(state: SolverState4D, delta: float) -> EnergySnapshot:
    """Energy of a 4D state.

    The entropy uses the reconstructed density with vanishing cells
    contributing zero; the squared Laplacian is evaluated exactly from the
    elliptic balance as the squared deviation of the producer from its mean.
    """
    r = state.grid.radii
    u = density_from_mass_4d(state.mass_profile_u()).values
    w = density_from_mass_4d(state.mass_profile_w()).values
    pot = reconstruct_potential(state.mass_profile_w())
    mu = state.mu
    r3 = r**3
    entropy = SPHERE_AREA_4D * np.trapezoid(_xlogx(u) * r3, r)
    coupling = SPHERE_AREA_4D * np.trapezoid(u * pot.v * r3, r)
    lap_sq = SPHERE_AREA_4D * np.trapezoid((mu - w) ** 2 * r3, r)
    grad_sq = SPHERE_AREA_4D * np.trapezoid(pot.v_r**2 * r3, r)
    total = entropy - coupling + 0.5 * lap_sq + 0.5 * delta * grad_sq
    return EnergySnapshot(
        t=state.t, entropy=float(entropy), coupling=float(coupling),
        laplacian_sq=float(lap_sq), gradient_sq=float(grad_sq), total=float(total),
    )


@dataclass(frozen=True)
class DissipationEstimate:
    """Interval dissipation and the energy-identity residual."""

    t_mid: float
    dt: float
    value: float
    energy_a: float
    energy_b: float
    residual: float


def dissipation(state_a: SolverState4D, state_b: SolverState4D, dt: float,
                delta: float) -> DissipationEstimate:
    """Dissipation between two consecutive snapshots ``dt`` apart.

    The potential rate uses the difference of reconstructed radial
    derivatives; the drift term is evaluated at the midpoint state with
    one-sided density slopes and a relative floor guarding the logarithmic
    derivative.
    """
    if dt <= 0.0:
        raise ValueError("snapshot spacing must be positive")
    r = state_a.grid.radii
    r3 = r**3
    pot_a = reconstruct_potential(state_a.mass_profile_w())
    pot_b = reconstruct_potential(state_b.mass_profile_w())
    dvr = (pot_b.v_r - pot_a.v_r) / dt
    rate_term = SPHERE_AREA_4D * np.trapezoid(dvr**2 * r3, r)

    u_a = density_from_mass_4d(state_a.mass_profile_u()).values
    u_b = density_from_mass_4d(state_b.mass_profile_u()).values
    u_mid = 0.5 * (u_a + u_b)
    vr_mid = 0.5 * (pot_a.v_r + pot_b.v_r)
    u_r = np.empty_like(u_mid)
    u_r[1:] = np.diff(u_mid) / np.diff(r)
    u_r[0] = u_r[1]
    guard = _DENSITY_GUARD * max(float(np.max(u_mid)), _ENTROPY_FLOOR)
    mask = u_mid >= guard
    drift = np.zeros_like(u_mid)
    drift[mask] = u_mid[mask] * (u_r[mask] / u_mid[mask] - vr_mid[mask]) ** 2
    drift_term = SPHERE_AREA_4D * np.trapezoid(drift * r3, r)

    e_a = energy(state_a, delta).total
    e_b = energy(state_b, delta).total
    value = float(rate_term + drift_term)
    residual = abs((e_b - e_a) / dt + value)
    return DissipationEstimate(
        t_mid=0.5 * (state_a.t + state_b.t), dt=dt, value=value,
        energy_a=e_a, energy_b=e_b, residual=float(residual),
    )


@dataclass
class EnergyReport:
    """Per-snapshot energy terms and per-interval dissipation estimates."""

    snapshots: list[EnergySnapshot]
    intervals: list[DissipationEstimate]

    @property
    def max_residual(self) -> float:
        return max((d.residual for d in self.intervals), default=0.0)

    @property
    def energies(self) -> np.ndarray:
        return np.asarray([s.total for s in self.snapshots])


def energy_report(traj: Trajectory, delta: float | None = None) -> EnergyReport:
    if traj.dim != 4:
        raise ValueError("the energy functional is defined for 4D trajectories")
    if delta is None:
        delta = traj.delta
    snaps = [energy(traj.state(k), delta) for k in range(traj.n_snapshots)]
    intervals = []
    for k in range(traj.n_snapshots - 1):
        dt = float(traj.times[k + 1] - traj.times[k])
        if dt <= 0.0:
            continue
        intervals.append(dissipation(traj.state(k), traj.state(k + 1), dt, delta))
    return EnergyReport(snapshots=snaps, intervals=intervals)


@dataclass(frozen=True)
class AuditRow:
    t: float
    u_mass_drift: float
    u_mass_ok: bool
    w_mass: float
    w_mass_ok: bool
    max_r3vr: float
    r3vr_ok: bool
    energy: float
    energy_increase: float
    energy_ok: bool


@dataclass
class AuditTable:
    rows: list[AuditRow]
    w_mass_bound: float
    r3vr_bound: float

    @property
    def all_ok(self) -> bool:
        return all(
            row.u_mass_ok and row.w_mass_ok and row.r3vr_ok and row.energy_ok
            for row in self.rows
        )


_MASS_TOL = 1e-8


def invariant_audit(traj: Trajectory, w0_mass: float | None = None) -> AuditTable:
    """Per-snapshot conservation and pointwise-bound audit.

    Checks mass pinning, the producer-mass relaxation bound, the weighted
    potential-gradient bound, and monotone decay of the energy within ten
    times the per-interval identity residual.  2D trajectories only carry
    the mass check; the other columns are reported as passing NaNs.
    """
    m = traj.mass_m
    if traj.dim == 2:
        rows = []
        for k in range(traj.n_snapshots):
            drift = abs(2.0 * math.pi * float(traj.U[k][-1]) - m)
            rows.append(AuditRow(
                t=float(traj.times[k]), u_mass_drift=drift, u_mass_ok=drift <= _MASS_TOL,
                w_mass=math.nan, w_mass_ok=True, max_r3vr=math.nan, r3vr_ok=True,
                energy=math.nan, energy_increase=math.nan, energy_ok=True,
            ))
        return AuditTable(rows=rows, w_mass_bound=math.nan, r3vr_bound=math.nan)

    delta = traj.delta
    if w0_mass is None:
        w0_mass = SPHERE_AREA_4D * (traj.w0_endpoint if traj.w0_endpoint is not None
                                    else float(traj.W[0][-1]))
    m_tilde = max(w0_mass, m / delta) if delta > 0.0 else math.inf
    r3vr_bound = m_tilde / math.pi**2
    report = energy_report(traj)
    rows = []
    for k in range(traj.n_snapshots):
        state = traj.state(k)
        drift = abs(SPHERE_AREA_4D * float(state.U[-1]) - m)
        w_mass = SPHERE_AREA_4D * float(state.W[-1])
        pot = reconstruct_potential(state.mass_profile_w())
        max_r3vr = float(np.max(np.abs(pot.v_r * state.grid.radii**3)))
        e_now = report.snapshots[k].total
        if k == 0:
            inc, e_ok = 0.0, True
        else:
            inc = e_now - report.snapshots[k - 1].total
            interval = report.intervals[k - 1]
            e_ok = inc <= 10.0 * interval.residual * interval.dt + 1e-10 * max(1.0, abs(e_now))
        rows.append(AuditRow(
            t=float(traj.times[k]), u_mass_drift=drift, u_mass_ok=drift <= _MASS_TOL,
            w_mass=w_mass, w_mass_ok=w_mass <= m_tilde + _MASS_TOL,
            max_r3vr=max_r3vr, r3vr_ok=max_r3vr <= r3vr_bound + _MASS_TOL,
            energy=e_now, energy_increase=inc, energy_ok=e_ok,
        ))
    return AuditTable(rows=rows, w_mass_bound=m_tilde, r3vr_bound=r3vr_bound)


@dataclass(frozen=True)
class CollapseReport:
    """Late-time mass distribution of a blowup run.

    ``mass_in_ball`` samples the final snapshot's cumulative mass at the
    grid radii; ``point_mass`` extrapolates it to the origin over the three
    smallest resolved radii; the outer profile holds the reconstructed
    density away from the concentration zone.
    """

    radii: np.ndarray
    mass_in_ball: np.ndarray
    point_mass: float
    r_cut: float
    outer_r: np.ndarray
    outer_f: np.ndarray
    detection_time: float
    total_mass: float


def collapse_diagnostics(traj: Trajectory) -> CollapseReport:
    if traj.termination != TERM_BLOWUP:
        raise ValueError("collapse diagnostics need a trajectory terminated by blowup")
    area = SPHERE_AREA_4D if traj.dim == 4 else 2.0 * math.pi
    radii = traj.grid.radii[1:]
    final = traj.U[-1]
    xi = area * final[1:]
    r_fit = radii[:3]
    xi_fit = xi[:3]
    slope, intercept = np.polyfit(r_fit, xi_fit, 1)
    point_mass = float(min(max(intercept, 0.0), traj.mass_m))
    r_cut = 10.0 * radii[0]
    if traj.dim == 4:
        dens = density_from_mass_4d(MassProfile(
            coords=traj.grid.nodes, values=final, kind="U4D"))
    else:
        dens = density_from_mass_2d(MassProfile(
            coords=traj.grid.nodes, values=final, kind="M2D"))
    outer = dens.r >= r_cut
    return CollapseReport(
        radii=radii, mass_in_ball=xi, point_mass=point_mass, r_cut=r_cut,
        outer_r=dens.r[outer], outer_f=dens.values[outer],
        detection_time=traj.t_final, total_mass=traj.mass_m,
    )
