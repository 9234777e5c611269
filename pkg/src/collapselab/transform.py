"""Cumulative-mass substitution and its inverses, plus potential reconstruction.

The forward transform maps a radial density to its cumulative mass expressed
in the graded coordinate (``s = r^4`` in 4D, ``rho = r^2`` in 2D), normalized
by the sphere/circle factor so the endpoint value is ``mass / (2*pi^2)``
(resp. ``mass / (2*pi)``).  The inverse assigns one-sided backward slopes,
which keeps nonnegativity for monotone inputs and localizes steep gradients
at the origin-most cell.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    MASS_KIND_M2D,
    MASS_KIND_U4D,
    MASS_KIND_W4D,
    SPHERE_AREA_4D,
    Grid,
    MassProfile,
    RadialProfile,
)


def _cumtrapz_transformed(values: np.ndarray, coords: np.ndarray, scale: float) -> np.ndarray:
    """Cumulative trapezoid of ``values`` against the transformed coordinate.

    Integrating against ``s`` (rather than ``r``) makes constant densities
    exact at the nodes and ties the endpoint to the same quadrature used by
    the mass functionals below.
    """
    increments = 0.5 * (values[1:] + values[:-1]) * np.diff(coords) * scale
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(increments, out=out[1:])
    return out


def mass_4d(f: RadialProfile) -> float:
    """Total mass ``2*pi^2 * int f r^3 dr`` (trapezoid in ``s = r^4``)."""
    s = f.r**4
    return float(SPHERE_AREA_4D * _cumtrapz_transformed(f.values, s, 0.25)[-1])


def mass_2d(f: RadialProfile) -> float:
    """Total mass ``2*pi * int f r dr`` (trapezoid in ``rho = r^2``)."""
    rho = f.r**2
    return float(2.0 * np.pi * _cumtrapz_transformed(f.values, rho, 0.5)[-1])


def _check_nonnegative(f: RadialProfile) -> None:
    if np.min(f.values) < 0.0:
        raise ValueError("density profile has a negative sample")


def forward_mass_4d(f: RadialProfile, grid: Grid, kind: str = MASS_KIND_U4D) -> MassProfile:
    """Cumulative mass of a nonnegative 4D radial density on ``grid``."""
    _check_nonnegative(f)
    if kind not in (MASS_KIND_U4D, MASS_KIND_W4D):
        raise ValueError("4D forward transform produces U4D or W4D profiles")
    vals = f.interp(grid.radii)
    return MassProfile(
        coords=grid.nodes,
        values=_cumtrapz_transformed(vals, grid.nodes, 0.25),
        kind=kind,
    )


def forward_mass_2d(f: RadialProfile, grid: Grid) -> MassProfile:
    """Cumulative mass of a nonnegative 2D radial density on ``grid``."""
    _check_nonnegative(f)
    vals = f.interp(grid.radii)
    return MassProfile(
        coords=grid.nodes,
        values=_cumtrapz_transformed(vals, grid.nodes, 0.5),
        kind=MASS_KIND_M2D,
    )


def _backward_slopes(mass: MassProfile, scale: float) -> RadialProfile:
    dv = np.diff(mass.values)
    dc = np.diff(mass.coords)
    if np.min(dv) < 0.0:
        raise ValueError("mass profile must be nondecreasing")
    slopes = scale * dv / dc
    expo = 0.25 if mass.kind in (MASS_KIND_U4D, MASS_KIND_W4D) else 0.5
    r = mass.coords**expo
    vals = np.empty_like(mass.values)
    vals[1:] = slopes
    vals[0] = slopes[0]
    return RadialProfile(r=r, values=vals)


def density_from_mass_4d(mass: MassProfile) -> RadialProfile:
    """Density ``u(r) = 4 * dU/ds`` at ``s = r^4``, by backward slopes."""
    if mass.kind not in (MASS_KIND_U4D, MASS_KIND_W4D):
        raise ValueError("expected a 4D mass profile")
    return _backward_slopes(mass, 4.0)


def density_from_mass_2d(mass: MassProfile) -> RadialProfile:
    """Density ``u(r) = 2 * dM/drho`` at ``rho = r^2``, by backward slopes."""
    if mass.kind != MASS_KIND_M2D:
        raise ValueError("expected a 2D mass profile")
    return _backward_slopes(mass, 2.0)


@dataclass(frozen=True)
class PotentialProfile:
    """Reconstructed attractant ``v`` with its radial derivative.

    Normalized to zero mean over the 4-ball with the same trapezoid
    quadrature used to compute it, so the mean-zero check is exact by
    construction rather than by analytic identity.
    """

    r: np.ndarray
    v: np.ndarray
    v_r: np.ndarray
    normalization: str = "mean-zero over the ball"


def reconstruct_potential(W: MassProfile, w_mass: float | None = None) -> PotentialProfile:
    """Potential from the cumulative producer mass.

    Solves the radial elliptic balance ``(v_r r^3)_r = (mu - w) r^3`` in
    integrated form: ``v_r(r) = mu*r/4 - W(r^4)/r^3`` with
    ``mu = 2 * (total producer mass) / pi^2``, then integrates inward from
    the boundary and shifts to zero ball average.
    """
    if W.kind != MASS_KIND_W4D:
        raise ValueError("potential reconstruction expects a W4D mass profile")
    if w_mass is None:
        w_mass = SPHERE_AREA_4D * W.endpoint
    mu = 2.0 * w_mass / np.pi**2
    r = W.coords**0.25
    v_r = np.zeros_like(r)
    pos = r > 0.0
    v_r[pos] = mu * r[pos] / 4.0 - W.values[pos] / r[pos] ** 3
    # Inward antiderivative (v(1) = 0 before normalization), trapezoid in r.
    seg = 0.5 * (v_r[1:] + v_r[:-1]) * np.diff(r)
    v = np.empty_like(v_r)
    v[-1] = 0.0
    v[:-1] = -np.cumsum(seg[::-1])[::-1]
    # discrete ball average with the same quadrature weights, so the
    # mean-zero property holds exactly for the stored samples
    r3 = r**3
    v = v - np.trapezoid(v * r3, r) / np.trapezoid(r3, r)
    return PotentialProfile(r=r, v=v, v_r=v_r)
