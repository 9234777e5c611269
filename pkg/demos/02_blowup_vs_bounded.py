"""Integrate the transformed systems on both sides of the mass threshold.

Subcritical bumps relax to the homogeneous state; certified supercritical
data collapse in finite time, with the solution staying above the analytic
lower barrier the whole way down.
"""
import math

import numpy as np

import collapselab as cl

n = 1024


def bump(grid, mass, dim):
    shape = cl.RadialProfile(r=grid.radii, values=(1 - grid.radii**2) ** 2)
    total = cl.mass_4d(shape) if dim == 4 else cl.mass_2d(shape)
    return cl.RadialProfile(r=grid.radii, values=shape.values * (mass / total))


print("== subcritical: 80% of the critical mass, smooth bump ==")
g4 = cl.Grid.radial_4d(n)
u0 = bump(g4, 0.8 * cl.CRITICAL_MASS_4D, 4)
traj = cl.run_4d(u0, u0, delta=1.0, grid=g4, t_end=10.0, snapshot_interval=1.0)
print(f"4D: {traj.termination} at t={traj.t_final:.1f}, final max slope "
      f"{traj.final_max_slope:.1f} (homogeneous state gives {0.8 * 32.0:.1f})")

g2 = cl.Grid.radial_2d(n)
m2 = 0.8 * cl.CRITICAL_MASS_2D
traj2 = cl.run_2d(bump(g2, m2, 2), grid=g2, t_end=10.0, snapshot_interval=1.0)
print(f"2D: {traj2.termination} at t={traj2.t_final:.1f}, final max slope "
      f"{traj2.final_max_slope:.2f}")

print()
print("== supercritical: certified initial data ==")
p2 = cl.select_parameters_2d(16.0 * math.pi)
sub = cl.Subsolution2D(p2)
data = cl.build_initial_data_2d(sub, g2)
traj3 = cl.run_2d(data.M0, grid=g2, t_end=1.2, snapshot_interval=0.01)
monitor = cl.comparison_monitor(traj3, sub)
print(f"2D (m = 16*pi): {traj3.termination} at t={traj3.t_final:.3e} "
      f"<= t_star = {p2.t_star}")
print(f"   barrier violation along the run: {monitor.max_violation:.2e}")
print(f"   mass within the first grid cell at detection: "
      f"{2 * math.pi * traj3.final_origin_value:.2f} of {traj3.mass_m:.2f}")

p4 = cl.select_parameters_4d(1.0, 1.0, 700.0)
pair = cl.SubsolutionPair4D(p4)
data4 = cl.build_initial_data_4d(pair, g4)
traj4 = cl.run_4d(data4.U0, data4.W0, delta=1.0, grid=g4,
                  t_end=p4.t_star, snapshot_interval=p4.t_star / 10)
print(f"4D (m = 700): {traj4.termination} at t={traj4.t_final:.3e} "
      f"<= t_star = {p4.t_star:.3e}")
print("   (the certified 4D data are concentrated below the grid scale, so")
print("    detection is immediate: the construction demands ~95% of the mass")
print(f"    within r ~ {p4.eps**1.5:.1e})")
rep = cl.collapse_diagnostics(traj4)
print(f"   extrapolated point mass: {rep.point_mass:.1f} "
      f"(threshold 64*pi^2 = {cl.CRITICAL_MASS_4D:.1f})")
