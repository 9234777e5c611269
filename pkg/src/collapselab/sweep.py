"""Critical-mass bisection over a standardized concentrated probe family.

Each probe is the same fractional-linear ("Mobius") cumulative profile with
a fixed core width, scaled to the probe mass; bisection on the mass then
locates the boundary between horizon-bounded runs and detected blowups for
that family.  Classification is necessarily a finite-horizon proxy: ``t_end``
and the blowup thresholds are part of the sweep definition.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .model import (
    MASS_KIND_M2D,
    MASS_KIND_U4D,
    MASS_KIND_W4D,
    SPHERE_AREA_4D,
    Grid,
    MassProfile,
)
from .solver import TERM_BLOWUP, TERM_STEP_COLLAPSE, run_2d, run_4d

DEFAULT_PROBE_THETA_2D = 1e-4
DEFAULT_PROBE_THETA_4D = 1e-2


class BracketError(Exception):
    """The mass bracket does not straddle the bounded/blowup boundary."""


@dataclass(frozen=True)
class ProbeResult:
    mass: float
    termination: str
    t_final: float

    @property
    def blowup(self) -> bool:
        return self.termination == TERM_BLOWUP


@dataclass
class SweepResult:
    dim: int
    theta: float
    t_end: float
    n: int
    probes: list[ProbeResult]
    bounded_max: float
    blowup_min: float

    @property
    def estimate(self) -> float:
        return 0.5 * (self.bounded_max + self.blowup_min)


def mobius_mass_profile(grid: Grid, theta: float, endpoint: float, kind: str) -> MassProfile:
    s = grid.nodes
    values = (1.0 + theta) * s / (theta + s) * endpoint
    return MassProfile(coords=s, values=values, kind=kind)


def probe_2d(mass: float, theta: float, grid: Grid) -> MassProfile:
    return mobius_mass_profile(grid, theta, mass / (2.0 * math.pi), MASS_KIND_M2D)


def probe_4d(mass: float, theta: float, grid: Grid, w_mass: float):
    U0 = mobius_mass_profile(grid, theta, mass / SPHERE_AREA_4D, MASS_KIND_U4D)
    W0 = mobius_mass_profile(grid, theta, w_mass / SPHERE_AREA_4D, MASS_KIND_W4D)
    return U0, W0


# Producer mass of the standardized 4D probe: fixed inside the window the
# blowup construction prescribes, *not* scaled with the probe mass (a
# mass-proportional producer builds a potential well that focuses even
# subcritical populations).
DEFAULT_PROBE_W_MASS_4D = 20.0 * math.pi**2


def run_sweep(
    dim: int,
    mass_lo: float,
    mass_hi: float,
    *,
    n: int = 2048,
    t_end: float = 20.0,
    theta: float | None = None,
    delta: float = 1.0,
    w0_mass: float | None = None,
    max_bisections: int = 12,
    threads: int = 1,
    value_node: int = 8,
    max_steps: int = 900_000,
    cfl: float = 2.0,
    rate_cap: float = 0.05,
) -> SweepResult:
    """Bisect the probe-family critical mass inside ``[mass_lo, mass_hi]``.

    The endpoints must classify as bounded (low) and blowup (high); at most
    ``max_bisections`` further probes refine the bracket.  Probe runs are
    deterministic, so the result is reproducible for a fixed configuration.
    """
    if dim not in (2, 4):
        raise ValueError("dimension must be 2 or 4")
    if not mass_lo < mass_hi:
        raise BracketError(f"degenerate mass bracket [{mass_lo}, {mass_hi}]")
    if theta is None:
        theta = DEFAULT_PROBE_THETA_4D if dim == 4 else DEFAULT_PROBE_THETA_2D
    if w0_mass is None:
        w0_mass = DEFAULT_PROBE_W_MASS_4D
    grid = Grid.radial_4d(n) if dim == 4 else Grid.radial_2d(n)

    def classify(mass: float) -> ProbeResult:
        # Classification rides on the concentrated-mass criterion alone:
        # the density/slope trigger fires on transient focusing of provably
        # bounded concentrated data, while mass-in-a-vanishing-ball is the
        # quantity the boundedness threshold is stated in.
        if dim == 4:
            U0, W0 = probe_4d(mass, theta, grid, w0_mass)
            traj = run_4d(
                U0, W0, delta=delta, mass_m=mass, grid=grid, t_end=t_end,
                slope_threshold=1e30, value_node=value_node,
                max_steps=max_steps, cfl=cfl, rate_cap=rate_cap,
            )
        else:
            M0 = probe_2d(mass, theta, grid)
            traj = run_2d(
                M0, mass_m=mass, grid=grid, t_end=t_end,
                slope_threshold=1e30, value_node=value_node,
                max_steps=max_steps, cfl=cfl, rate_cap=rate_cap,
            )
        if traj.termination == TERM_STEP_COLLAPSE:
            raise RuntimeError(f"probe at mass {mass} hit a step-size collapse")
        return ProbeResult(mass=mass, termination=traj.termination, t_final=traj.t_final)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            lo_future = pool.submit(classify, mass_lo)
            hi_future = pool.submit(classify, mass_hi)
            lo_res, hi_res = lo_future.result(), hi_future.result()
    else:
        lo_res, hi_res = classify(mass_lo), classify(mass_hi)
    probes = [lo_res, hi_res]
    if lo_res.blowup or not hi_res.blowup:
        raise BracketError(
            f"bracket does not straddle: low mass {mass_lo} -> {lo_res.termination}, "
            f"high mass {mass_hi} -> {hi_res.termination}"
        )
    bounded_max, blowup_min = mass_lo, mass_hi
    for _ in range(max_bisections):
        mid = 0.5 * (bounded_max + blowup_min)
        res = classify(mid)
        probes.append(res)
        if res.blowup:
            blowup_min = mid
        else:
            bounded_max = mid
    return SweepResult(
        dim=dim, theta=theta, t_end=t_end, n=n, probes=probes,
        bounded_max=bounded_max, blowup_min=blowup_min,
    )
