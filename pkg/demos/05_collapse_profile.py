"""Late-time mass distribution of a collapsing run.

At detection, the cumulative mass jumps to the point-mass level within a
few grid cells of the origin: the numerical signature of the Dirac
concentration, with the regular remainder resolved outside.
"""
import math

import collapselab as cl

grid = cl.Grid.radial_2d(2048)
params = cl.select_parameters_2d(16.0 * math.pi)
sub = cl.Subsolution2D(params)
data = cl.build_initial_data_2d(sub, grid)
traj = cl.run_2d(data.M0, grid=grid, t_end=1.2, snapshot_interval=0.01)
report = cl.collapse_diagnostics(traj)

print(f"termination: {traj.termination} at t = {report.detection_time:.3e}")
print(f"point-mass estimate: {report.point_mass:.3f} "
      f"(8*pi = {cl.CRITICAL_MASS_2D:.3f}, total mass {report.total_mass:.3f})")
print(f"outer profile resolved for r >= {report.r_cut:.4f}")
print()
print("    r         mass in ball")
for k in (0, 1, 2, 4, 16, 64, 256, 1023, 2047):
    print(f"  {report.radii[k]:.5f}   {report.mass_in_ball[k]:10.4f}")
