"""Acceptance suite: every primary criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in the
captured output of a failing run).  The expensive artifacts (certified
trajectories, sweeps) are session fixtures shared across criteria.
"""
import math

import numpy as np
import pytest

import collapselab as cl
from collapselab.solver import TERM_BLOWUP, TERM_REACHED_END
from collapselab.subsolutions import g_condition_slack

DELTAS = (0.5, 1.0, 2.0)
KAPPAS = (0.5, 1.0, 2.0)
MASS_FACTORS = (1.05, 1.5, 3.0)

CERT_N = 2048
RTOL = 1e-12


def _report(name, ok, detail=""):
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name} {detail}")
    assert ok, f"{name} {detail}"


def bump_profile(grid, mass, dim):
    shape = cl.RadialProfile(r=grid.radii, values=(1 - grid.radii**2) ** 2)
    total = cl.mass_4d(shape) if dim == 4 else cl.mass_2d(shape)
    return cl.RadialProfile(r=grid.radii, values=shape.values * (mass / total))


# ---------------------------------------------------------------------------
# Shared heavy artifacts


@pytest.fixture(scope="module")
def certified_runs_4d(pair_4d_ref):
    p = pair_4d_ref.params
    out = {}
    for n in (2048, 4096):
        grid = cl.Grid.radial_4d(n)
        data = cl.build_initial_data_4d(pair_4d_ref, grid)
        out[n] = cl.run_4d(
            data.U0, data.W0, delta=p.delta, grid=grid, t_end=p.t_star,
            snapshot_interval=p.t_star / 10.0,
        )
    return out


@pytest.fixture(scope="module")
def certified_runs_2d(sub_2d_ref):
    p = sub_2d_ref.params
    out = {}
    for n in (2048, 4096):
        grid = cl.Grid.radial_2d(n)
        data = cl.build_initial_data_2d(sub_2d_ref, grid)
        out[n] = cl.run_2d(
            data.M0, grid=grid, t_end=1.2 * p.t_star,
            snapshot_interval=p.t_star / 20.0,
        )
    return out


@pytest.fixture(scope="module")
def subcritical_run_4d():
    grid = cl.Grid.radial_4d(2048)
    m = 0.8 * cl.CRITICAL_MASS_4D
    u0 = bump_profile(grid, m, 4)
    return cl.run_4d(u0, u0, delta=1.0, grid=grid, t_end=10.0, snapshot_interval=0.5)


@pytest.fixture(scope="module")
def subcritical_run_2d():
    grid = cl.Grid.radial_2d(2048)
    m = 0.8 * cl.CRITICAL_MASS_2D
    u0 = bump_profile(grid, m, 2)
    return cl.run_2d(u0, grid=grid, t_end=10.0, snapshot_interval=0.5)


# ---------------------------------------------------------------------------
# Criterion 1: subsolution certificates on 2048x2048 grids


@pytest.mark.parametrize("delta", DELTAS)
@pytest.mark.parametrize("kappa", KAPPAS)
@pytest.mark.parametrize("factor", MASS_FACTORS)
def test_certificates_4d(delta, kappa, factor):
    mass = factor * cl.CRITICAL_MASS_4D
    pair = cl.SubsolutionPair4D(cl.select_parameters_4d(delta, kappa, mass))
    cert = cl.certify_subsolution_4d(pair, grid_n=CERT_N, n_time=CERT_N, rtol=RTOL)
    res_u = cert.check("residual_transport_max").value
    res_w = cert.check("residual_production_max").value
    _report(
        f"certificate 4D (delta={delta}, kappa={kappa}, m={factor}*64pi^2)",
        cert.verdict == "pass" and res_u <= RTOL and res_w <= RTOL,
        f"max residuals ({res_u:.2e}, {res_w:.2e})",
    )


@pytest.mark.parametrize("factor", MASS_FACTORS)
def test_certificates_2d(factor):
    mass = factor * cl.CRITICAL_MASS_2D
    sub = cl.Subsolution2D(cl.select_parameters_2d(mass))
    cert = cl.certify_subsolution_2d(sub, grid_n=CERT_N, n_time=CERT_N, rtol=RTOL)
    res = cert.check("residual_transport_max").value
    _report(
        f"certificate 2D (m={factor}*8pi)",
        cert.verdict == "pass" and res <= RTOL,
        f"max residual {res:.2e}",
    )


# ---------------------------------------------------------------------------
# Criterion 2: scalar parameter conditions with positive slack


def test_scalar_conditions():
    ok = True
    worst = math.inf
    for delta in DELTAS:
        for kappa in KAPPAS:
            for factor in MASS_FACTORS:
                p = cl.select_parameters_4d(delta, kappa, factor * cl.CRITICAL_MASS_4D)
                for name, slack, _ in cl.params4d_slacks(p):
                    worst = min(worst, slack)
                    ok = ok and slack > 0.0
                g = g_condition_slack(p, n_samples=10_000)
                ok = ok and g >= 0.0
    for factor in MASS_FACTORS:
        p = cl.select_parameters_2d(factor * cl.CRITICAL_MASS_2D)
        for name, slack, _ in cl.params2d_slacks(p):
            worst = min(worst, slack)
            ok = ok and slack > 0.0
    _report("scalar parameter conditions", ok, f"min slack {worst:.3e}")


# ---------------------------------------------------------------------------
# Criterion 3: stationary oracles


def test_stationary_oracles():
    ok = True
    worst = 0.0
    s = np.linspace(1e-8, 1.0, 1000)
    rho = np.linspace(1e-8, 1.0, 1000)
    for lam in (0.5, 1.0, 2.0):
        fam4, fam2 = cl.eval_stationary(lam)
        r1 = 16 * s**1.5 * fam4.mass_u_ss(s) + 4 * fam4.mass_u_s(s) * fam4.mass_w(s)
        r2 = 16 * s**1.5 * fam4.mass_w_ss(s) + fam4.mass_u(s)
        r3 = 4 * rho * fam2.mass_rhorho(rho) + 2 * fam2.mass(rho) * fam2.mass_rho(rho)
        scale1 = np.maximum(np.abs(16 * s**1.5 * fam4.mass_u_ss(s)), 1.0)
        scale2 = np.maximum(np.abs(fam4.mass_u(s)), 1.0)
        scale3 = np.maximum(np.abs(4 * rho * fam2.mass_rhorho(rho)), 1.0)
        worst = max(worst, float(np.max(np.abs(r1) / scale1)),
                    float(np.max(np.abs(r2) / scale2)),
                    float(np.max(np.abs(r3) / scale3)))
    ok = worst <= 1e-10
    # limits by substitution: the transformed endpoints are the thresholds
    ok = ok and 2.0 * math.pi**2 * 32.0 == pytest.approx(cl.CRITICAL_MASS_4D, rel=1e-14)
    ok = ok and 2.0 * math.pi * 4.0 == pytest.approx(cl.CRITICAL_MASS_2D, rel=1e-14)
    _report("stationary oracles", ok, f"worst residual {worst:.2e}")


# ---------------------------------------------------------------------------
# Criterion 4: solver conservation on every run in this suite


def _check_conservation(traj):
    area = 2.0 * math.pi**2 if traj.dim == 4 else 2.0 * math.pi
    drift = max(abs(area * traj.U[k][-1] - traj.mass_m)
                for k in range(traj.n_snapshots))
    w_err = 0.0
    if traj.dim == 4:
        w0, delta, m = traj.w0_endpoint, traj.delta, traj.mass_m
        for k, t in enumerate(traj.times):
            exact = w0 * math.exp(-delta * t) + m / (area * delta) * (
                1.0 - math.exp(-delta * t))
            w_err = max(w_err, abs(traj.W[k][-1] - exact))
    return drift, w_err


def test_solver_conservation(certified_runs_4d, certified_runs_2d,
                             subcritical_run_4d, subcritical_run_2d):
    runs = (list(certified_runs_4d.values()) + list(certified_runs_2d.values())
            + [subcritical_run_4d, subcritical_run_2d])
    drift = max(_check_conservation(tr)[0] for tr in runs)
    w_err = max(_check_conservation(tr)[1] for tr in runs)
    _report("solver conservation", drift <= 1e-8 and w_err <= 1e-10,
            f"mass drift {drift:.2e}, boundary error {w_err:.2e}")


# ---------------------------------------------------------------------------
# Criterion 5: comparison property on the certified 4D run


def test_comparison_property(certified_runs_4d, pair_4d_ref):
    v2048 = cl.comparison_monitor(certified_runs_4d[2048], pair_4d_ref).max_violation
    v4096 = cl.comparison_monitor(certified_runs_4d[4096], pair_4d_ref).max_violation
    _report("comparison property (4D certified)",
            v4096 <= 1e-5 and v4096 <= v2048 + 1e-12,
            f"violations n=2048: {v2048:.2e}, n=4096: {v4096:.2e}")


# ---------------------------------------------------------------------------
# Criterion 6: blowup vs boundedness


def test_subcritical_bounded(subcritical_run_4d, subcritical_run_2d):
    ok = True
    details = []
    for traj in (subcritical_run_4d, subcritical_run_2d):
        slope = max(traj.state(k).max_slope for k in range(traj.n_snapshots))
        ok = ok and traj.termination == TERM_REACHED_END and slope < 1e3
        details.append(f"{traj.dim}D slope {slope:.1f}")
    _report("subcritical runs bounded", ok, "; ".join(details))


def test_supercritical_blowup(certified_runs_4d, certified_runs_2d,
                              pair_4d_ref, sub_2d_ref):
    ok = True
    details = []
    for runs, t_star in ((certified_runs_4d, pair_4d_ref.params.t_star),
                         (certified_runs_2d, sub_2d_ref.params.t_star)):
        tb = {}
        for n, traj in runs.items():
            ok = ok and traj.termination == TERM_BLOWUP and traj.t_final <= t_star
            tb[n] = traj.t_final
        spread = abs(tb[4096] - tb[2048]) / max(tb[4096], tb[2048], 1e-30)
        ok = ok and spread <= 0.05
        details.append(f"t_b={tb[2048]:.3e}/{tb[4096]:.3e} (spread {spread:.1%})")
    _report("supercritical blowup with stable detection time", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# Criterion 7: critical-mass sweeps


def test_sweep_2d():
    crit = cl.CRITICAL_MASS_2D
    res = cl.run_sweep(2, 0.5 * crit, 2.0 * crit, n=2048, t_end=20.0,
                       max_bisections=12)
    err = abs(res.estimate - crit) / crit
    _report("2D critical-mass sweep", err <= 0.05,
            f"estimate {res.estimate:.3f} vs {crit:.3f} ({err:+.2%})")


def test_sweep_4d():
    crit = cl.CRITICAL_MASS_4D
    res = cl.run_sweep(4, 0.5 * crit, 2.0 * crit, n=2048, t_end=20.0,
                       max_bisections=12)
    err = abs(res.estimate - crit) / crit
    _report("4D critical-mass sweep", err <= 0.10,
            f"estimate {res.estimate:.2f} vs {crit:.2f} ({err:+.2%})")


# ---------------------------------------------------------------------------
# Criterion 8: energy identity refinement


def test_energy_identity():
    m = 0.8 * cl.CRITICAL_MASS_4D
    means = []
    mono_ok = True
    for n, dt in ((64, 4e-3), (128, 2e-3), (256, 1e-3)):
        grid = cl.Grid.radial_4d(n)
        u0 = bump_profile(grid, m, 4)
        traj = cl.run_4d(u0, u0, delta=1.0, grid=grid, t_end=0.4,
                         snapshot_interval=8 * dt, dt_max=dt, dt_init=dt)
        rep = cl.energy_report(traj)
        means.append(np.mean([d.residual for d in rep.intervals if d.t_mid >= 0.05]))
        energies = rep.energies
        for k in range(1, len(energies)):
            interval = rep.intervals[k - 1]
            allowed = 10.0 * interval.residual * interval.dt + 1e-9
            mono_ok = mono_ok and energies[k] - energies[k - 1] <= allowed
    orders = [math.log2(means[i] / means[i + 1]) for i in range(2)]
    _report("energy identity first-order refinement",
            min(orders) >= 0.8 and mono_ok,
            f"orders {orders[0]:.2f}, {orders[1]:.2f}")


# ---------------------------------------------------------------------------
# Criterion 9: collapse diagnostics


def test_collapse_diagnostics(certified_runs_4d, certified_runs_2d):
    ok = True
    details = []
    for traj in list(certified_runs_4d.values()) + list(certified_runs_2d.values()):
        report = cl.collapse_diagnostics(traj)
        ok = ok and np.all(np.diff(report.mass_in_ball) >= 0.0)
        ok = ok and report.mass_in_ball[-1] == pytest.approx(traj.mass_m, rel=1e-9)
        ok = ok and 0.0 <= report.point_mass <= traj.mass_m
        if traj.dim == 4:
            ok = ok and traj.U[-1][1] >= 0.9 * 32.0
            details.append(f"4D n={traj.grid.n}: m*={report.point_mass:.1f}")
        else:
            details.append(f"2D n={traj.grid.n}: m*={report.point_mass:.2f}")
    _report("collapse diagnostics", ok, "; ".join(details))
