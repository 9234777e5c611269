"""Time stepping: conservation, boundary relaxation, blowup, comparison."""
import math

import numpy as np
import pytest

import collapselab as cl
from collapselab.solver import (
    TERM_BLOWUP,
    TERM_REACHED_END,
    SolverState2D,
    SolverState4D,
)


def bump_4d(grid, mass):
    shape = cl.RadialProfile(r=grid.radii, values=(1 - grid.radii**2) ** 2)
    return cl.RadialProfile(r=grid.radii, values=shape.values * (mass / cl.mass_4d(shape)))


def bump_2d(grid, mass):
    shape = cl.RadialProfile(r=grid.radii, values=(1 - grid.radii**2) ** 2)
    return cl.RadialProfile(r=grid.radii, values=shape.values * (mass / cl.mass_2d(shape)))


class TestStep:
    def test_zero_data_stays_zero(self):
        g = cl.Grid.radial_4d(64)
        z = cl.RadialProfile(r=g.radii, values=np.zeros(65))
        traj = cl.run_4d(z, z, delta=1.0, grid=g, t_end=0.3, snapshot_interval=0.1)
        assert traj.termination == TERM_REACHED_END
        assert np.max(np.abs(traj.U)) == 0.0
        assert np.max(np.abs(traj.W)) == 0.0

    def test_single_step_advances(self):
        g = cl.Grid.radial_4d(64)
        u0 = bump_4d(g, 100.0)
        U = cl.forward_mass_4d(u0, g)
        state = SolverState4D(grid=g, U=U.values.copy(), W=U.values.copy(), t=0.0)
        nxt = cl.step_4d(state, 1e-4, delta=1.0)
        assert nxt.t == pytest.approx(1e-4)
        assert np.all(np.diff(nxt.U) >= 0.0)
        assert nxt.U[-1] == state.U[-1]

    def test_step_2d(self):
        g = cl.Grid.radial_2d(64)
        u0 = bump_2d(g, 10.0)
        M = cl.forward_mass_2d(u0, g)
        state = SolverState2D(grid=g, M=M.values.copy(), t=0.0)
        nxt = cl.step_2d(state, 1e-4, mass_m=10.0)
        assert np.all(np.diff(nxt.M) >= 0.0)
        assert nxt.M[0] == 0.0


class TestBoundaryRelaxation:
    def test_producer_endpoint_follows_closed_form(self):
        g = cl.Grid.radial_4d(128)
        m, delta = 400.0, 1.7
        u0 = bump_4d(g, m)
        w0 = bump_4d(g, 3.0 * m)
        traj = cl.run_4d(u0, w0, delta=delta, grid=g, t_end=2.0, snapshot_interval=0.25)
        w0_end = traj.w0_endpoint
        area = 2.0 * math.pi**2
        for k, t in enumerate(traj.times):
            exact = w0_end * math.exp(-delta * t) + m / (area * delta) * (
                1.0 - math.exp(-delta * t))
            assert abs(traj.W[k][-1] - exact) <= 1e-10

    def test_mass_pinning(self):
        g = cl.Grid.radial_4d(128)
        m = 300.0
        u0 = bump_4d(g, m)
        traj = cl.run_4d(u0, u0, delta=1.0, grid=g, t_end=1.0, snapshot_interval=0.2)
        for k in range(traj.n_snapshots):
            assert abs(2.0 * math.pi**2 * traj.U[k][-1] - m) <= 1e-8

    def test_monotone_snapshots(self):
        g = cl.Grid.radial_2d(128)
        u0 = bump_2d(g, 18.0)
        traj = cl.run_2d(u0, grid=g, t_end=2.0, snapshot_interval=0.25)
        for k in range(traj.n_snapshots):
            assert np.min(np.diff(traj.U[k])) >= 0.0


class TestStationaryDrift:
    def test_4d_pair_near_stationary(self):
        # transformed steady pair, boundaries pinned, producer mean disabled
        fam, _ = cl.eval_stationary(1.0)
        drifts = []
        for n in (128, 256):
            g = cl.Grid.radial_4d(n)
            U0 = cl.MassProfile(coords=g.nodes, values=fam.mass_u(g.nodes), kind="U4D")
            W0 = cl.MassProfile(coords=g.nodes, values=fam.mass_w(g.nodes), kind="W4D")
            traj = cl.run_4d(U0, W0, delta=0.0, grid=g, t_end=0.01,
                             snapshot_interval=0.01, dt_max=1e-4,
                             mu_override=0.0, w_end_override=float(W0.values[-1]))
            drifts.append(np.max(np.abs(traj.U[-1] - U0.values)))
        assert drifts[0] < 5e-3
        assert drifts[1] < 0.5 * drifts[0]

    def test_2d_family_near_stationary(self):
        _, fam = cl.eval_stationary(1.0)
        g = cl.Grid.radial_2d(256)
        M0 = cl.MassProfile(coords=g.nodes, values=fam.mass(g.nodes), kind="M2D")
        traj = cl.run_2d(M0, grid=g, t_end=0.01, snapshot_interval=0.01,
                         dt_max=1e-4, transport_mass=0.0)
        assert np.max(np.abs(traj.U[-1] - M0.values)) < 5e-4


class TestConvergence:
    def test_temporal_first_order(self):
        g = cl.Grid.radial_4d(128)
        m = 0.8 * cl.CRITICAL_MASS_4D
        u0 = bump_4d(g, m)
        ref = cl.run_4d(u0, u0, delta=1.0, grid=g, t_end=1.0,
                        snapshot_interval=1.0, dt_max=1e-4, dt_init=1e-4)
        errs = []
        for dtm in (8e-3, 4e-3, 2e-3):
            tr = cl.run_4d(u0, u0, delta=1.0, grid=g, t_end=1.0,
                           snapshot_interval=1.0, dt_max=dtm, dt_init=dtm)
            errs.append(np.max(np.abs(tr.U[-1] - ref.U[-1])))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) > 0.9

    def test_spatial_second_order(self):
        # mid-transient comparison with the temporal error suppressed
        m = 0.8 * cl.CRITICAL_MASS_4D
        sols = {}
        for n in (64, 128, 256):
            g = cl.Grid.radial_4d(n)
            u0 = bump_4d(g, m)
            tr = cl.run_4d(u0, u0, delta=1.0, grid=g, t_end=0.1,
                           snapshot_interval=0.1, dt_max=1e-5, dt_init=1e-5)
            sols[n] = tr.U[-1]
        e1 = np.max(np.abs(sols[64] - sols[128][::2]))
        e2 = np.max(np.abs(sols[128] - sols[256][::2]))
        assert math.log2(e1 / e2) > 1.7


class TestBlowupAndBounded:
    def test_subcritical_2d_reaches_horizon(self):
        g = cl.Grid.radial_2d(512)
        m = 0.8 * cl.CRITICAL_MASS_2D
        traj = cl.run_2d(bump_2d(g, m), grid=g, t_end=3.0, snapshot_interval=0.5)
        assert traj.termination == TERM_REACHED_END
        assert traj.final_max_slope < 1e3

    def test_certified_2d_blows_up(self, sub_2d_ref):
        g = cl.Grid.radial_2d(1024)
        data = cl.build_initial_data_2d(sub_2d_ref, g)
        traj = cl.run_2d(data.M0, grid=g, t_end=1.2, snapshot_interval=0.05)
        assert traj.termination == TERM_BLOWUP
        assert traj.t_final <= sub_2d_ref.params.t_star
        report = cl.comparison_monitor(traj, sub_2d_ref)
        assert report.max_violation <= 1e-5

    def test_certified_4d_blows_up(self, pair_4d_ref):
        g = cl.Grid.radial_4d(1024)
        data = cl.build_initial_data_4d(pair_4d_ref, g)
        traj = cl.run_4d(data.U0, data.W0, delta=pair_4d_ref.params.delta,
                         grid=g, t_end=pair_4d_ref.params.t_star,
                         snapshot_interval=pair_4d_ref.params.t_star / 10)
        assert traj.termination == TERM_BLOWUP
        assert traj.t_final <= pair_4d_ref.params.t_star
        assert traj.final_origin_value >= 0.9 * 32.0
        report = cl.comparison_monitor(traj, pair_4d_ref)
        assert report.max_violation <= 1e-5

    def test_monitor_flags_non_dominating_data(self, sub_2d_ref):
        # initial data strictly below the subsolution: diagnostic violation
        g = cl.Grid.radial_2d(256)
        p = sub_2d_ref.params
        weak = cl.MassProfile(coords=g.nodes,
                              values=0.25 * p.mass_m / (2 * math.pi) * g.nodes,
                              kind="M2D")
        traj = cl.run_2d(weak, grid=g, t_end=0.02, snapshot_interval=0.01,
                         mass_m=0.25 * p.mass_m)
        report = cl.comparison_monitor(traj, sub_2d_ref)
        assert report.max_violation > 0.0

    def test_mass_mismatch_rejected(self):
        g = cl.Grid.radial_2d(64)
        u0 = bump_2d(g, 10.0)
        with pytest.raises(ValueError):
            cl.run_2d(u0, grid=g, mass_m=11.0, t_end=0.1)


class TestStepBudget:
    def test_budget_termination(self):
        g = cl.Grid.radial_2d(128)
        u0 = bump_2d(g, 18.0)
        traj = cl.run_2d(u0, grid=g, t_end=50.0, snapshot_interval=10.0,
                         max_steps=25)
        assert traj.termination == "step budget exhausted"
        assert traj.meta["steps"] == 25
