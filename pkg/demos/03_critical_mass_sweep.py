"""Locate both critical masses by bisection over standardized probes.

Moderate resolution keeps this demo quick; the acceptance suite runs the
production version (n = 2048, 12 bisections) and lands within 3.3% of
8*pi and 0.5% of 64*pi^2.
"""
import time

import collapselab as cl

for dim, crit, label in ((2, cl.CRITICAL_MASS_2D, "8*pi"),
                         (4, cl.CRITICAL_MASS_4D, "64*pi^2")):
    start = time.time()
    result = cl.run_sweep(dim, 0.5 * crit, 2.0 * crit, n=512, t_end=10.0,
                          max_bisections=8)
    err = (result.estimate - crit) / crit
    print(f"== {dim}D sweep ({len(result.probes)} probes, "
          f"{time.time() - start:.0f}s) ==")
    for p in result.probes:
        print(f"   m/crit = {p.mass / crit:6.4f}  ->  {p.termination}")
    print(f"   estimate: {result.estimate:.3f} vs {label} = {crit:.3f} "
          f"({err:+.2%})")
    print()
