"""Core domain types: parameter sets, grids, radial and cumulative-mass profiles.

Everything here is an immutable value object.  Parameter sets carry the
constants of the two blowup constructions (unit disk and unit 4-ball), grids
fix the transformed coordinate nodes, and the two profile types are the
common currency passed between the transform, solver and diagnostics layers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Geometry of the two domains (unit disk in R^2, unit ball in R^4).
DISK_AREA = math.pi
CIRCLE_LENGTH = 2.0 * math.pi
BALL_VOLUME_4D = math.pi**2 / 2.0
SPHERE_AREA_4D = 2.0 * math.pi**2

# Mass thresholds separating bounded evolution from collapse.
CRITICAL_MASS_2D = 8.0 * math.pi
CRITICAL_MASS_4D = 64.0 * math.pi**2


@dataclass(frozen=True)
class Params4D:
    """Constants of the 4D collapse construction.

    ``delta`` is the signal-producer decay rate, ``mass_m`` the prescribed
    cell mass (supercritical when above ``CRITICAL_MASS_4D``), ``kappa`` the
    margin parameter for the producer mass window, ``mu_star`` the constant
    bounding the spatial mean of the producer, and ``eps``/``ell``/``gamma``
    the profile constants.  The construction lives on ``t < t_star``.
    """

    delta: float
    mass_m: float
    kappa: float
    mu_star: float
    eps: float
    ell: float
    gamma: float

    @property
    def t_star(self) -> float:
        return self.eps / self.ell


@dataclass(frozen=True)
class Params2D:
    """Constants of the 2D (unit disk) collapse construction."""

    mass_m: float
    eps: float
    ell: float

    @property
    def t_star(self) -> float:
        return self.eps / self.ell


@dataclass(frozen=True)
class Violation:
    """A violated parameter constraint, with the (non-positive) slack."""

    name: str
    slack: float


def params4d_slacks(p: Params4D) -> list[tuple[str, float, bool]]:
    """Slacks of the five 4D parameter inequalities.

    Returns ``(name, slack, strict)`` triples; a constraint holds when its
    slack is positive (strict inequality) or nonnegative (non-strict).
    """
    disc = (p.mu_star * p.eps + 6.0 * p.ell) ** 2 - 4.0 * 32.0 * (p.gamma + 1.0) * p.ell
    return [
        ("ell >= delta", p.ell - p.delta, False),
        ("(mu_star*eps + 6*ell)^2 - 128*(gamma+1)*ell <= 0", -disc, False),
        ("2*gamma^2 - 3*ell >= 0", 2.0 * p.gamma**2 - 3.0 * p.ell, False),
        (
            "exp(eps) < (1+2*kappa)/(1+kappa)",
            (1.0 + 2.0 * p.kappa) / (1.0 + p.kappa) - math.exp(p.eps),
            True,
        ),
        (
            "exp((gamma+1)*eps)*(1+3*eps^3) < m/(64*pi^2)",
            p.mass_m / CRITICAL_MASS_4D
            - math.exp((p.gamma + 1.0) * p.eps) * (1.0 + 3.0 * p.eps**3),
            True,
        ),
    ]


def params2d_slacks(p: Params2D) -> list[tuple[str, float, bool]]:
    """Slacks of the two 2D parameter inequalities."""
    quad = (3.0 * p.ell + p.mass_m * p.eps / math.pi) ** 2 - 32.0 * p.ell
    return [
        (
            "exp(eps) < m/(8*pi)",
            p.mass_m / CRITICAL_MASS_2D - math.exp(p.eps),
            True,
        ),
        ("(3*ell + m*eps/pi)^2 - 32*ell <= 0", -quad, False),
    ]


def _violations(slacks: list[tuple[str, float, bool]]) -> list[Violation]:
    out = []
    for name, slack, strict in slacks:
        if slack < 0.0 or (strict and slack == 0.0):
            out.append(Violation(name=name, slack=slack))
    return out


def validate_params4d(p: Params4D) -> list[Violation]:
    """Return the violated 4D constraints (empty iff all five hold)."""
    return _violations(params4d_slacks(p))


def validate_params2d(p: Params2D) -> list[Violation]:
    """Return the violated 2D constraints (empty iff both hold)."""
    return _violations(params2d_slacks(p))


# Flat key=value serialization used inside run config files.
_PARAMS4D_KEYS = ("delta", "mass_m", "kappa", "mu_star", "eps", "ell", "gamma")
_PARAMS2D_KEYS = ("mass_m", "eps", "ell")


def serialize_params(p: Params4D | Params2D) -> str:
    keys = _PARAMS4D_KEYS if isinstance(p, Params4D) else _PARAMS2D_KEYS
    return "\n".join(f"{k}={getattr(p, k)!r}" for k in keys)


def parse_params4d(block: dict[str, str]) -> Params4D:
    return Params4D(**{k: float(block[k]) for k in _PARAMS4D_KEYS})


def parse_params2d(block: dict[str, str]) -> Params2D:
    return Params2D(**{k: float(block[k]) for k in _PARAMS2D_KEYS})


POLICY_RADIAL_4D = "radial-4d"  # s = r^4, nodes uniform in r
POLICY_RADIAL_2D = "radial-2d"  # rho = r^2, nodes uniform in r

_POLICY_EXPONENT = {POLICY_RADIAL_4D: 4, POLICY_RADIAL_2D: 2}


@dataclass(frozen=True)
class Grid:
    """Transformed-coordinate grid, uniform in physical radius.

    Nodes are ``(i/n)**4`` (4D) or ``(i/n)**2`` (2D) for ``i = 0..n``; the
    grading concentrates resolution at the origin where collapse happens.
    Reconstruction from ``(n, policy)`` is bit-identical across runs.
    """

    n: int
    policy: str
    nodes: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.policy not in _POLICY_EXPONENT:
            raise ValueError(f"unknown grid policy {self.policy!r}")
        if self.n < 1:
            raise ValueError("grid needs at least one interval")
        expo = _POLICY_EXPONENT[self.policy]
        nodes = (np.arange(self.n + 1) / self.n) ** expo
        if self.nodes is not None and not np.array_equal(self.nodes, nodes):
            raise ValueError("nodes inconsistent with (n, policy)")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def radial_4d(cls, n: int) -> "Grid":
        return cls(n=n, policy=POLICY_RADIAL_4D)

    @classmethod
    def radial_2d(cls, n: int) -> "Grid":
        return cls(n=n, policy=POLICY_RADIAL_2D)

    @property
    def radii(self) -> np.ndarray:
        r = np.arange(self.n + 1) / self.n
        r.setflags(write=False)
        return r


@dataclass(frozen=True)
class RadialProfile:
    """Piecewise-linear radial function on the unit ball/disk.

    Represents densities (nonnegative by convention) or reconstructed fields.
    """

    r: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ValueError("r and values must be 1D arrays of equal length")
        if not np.all(np.diff(r) > 0.0):
            raise ValueError("radii must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)

    def interp(self, r: np.ndarray) -> np.ndarray:
        return np.interp(r, self.r, self.values)


MASS_KIND_U4D = "U4D"
MASS_KIND_W4D = "W4D"
MASS_KIND_M2D = "M2D"
_MASS_KINDS = (MASS_KIND_U4D, MASS_KIND_W4D, MASS_KIND_M2D)

# Permitted round-off backlash when checking monotonicity of incoming values.
_MONOTONE_ATOL = 1e-12


@dataclass(frozen=True)
class MassProfile:
    """Cumulative mass in transformed coordinates, pinned to 0 at the origin.

    ``coords`` is ``s = r^4`` (kinds ``U4D``/``W4D``) or ``rho = r^2``
    (kind ``M2D``).  Values are nondecreasing; tiny round-off dips from
    upstream arithmetic are flattened on construction.
    """

    coords: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in _MASS_KINDS:
            raise ValueError(f"unknown mass profile kind {self.kind!r}")
        c = np.asarray(self.coords, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if c.ndim != 1 or c.shape != v.shape:
            raise ValueError("coords and values must be 1D arrays of equal length")
        if c[0] != 0.0:
            raise ValueError("mass profile must start at coordinate 0")
        if v[0] != 0.0:
            raise ValueError("mass profile must vanish at the origin")
        if not np.all(np.diff(c) > 0.0):
            raise ValueError("coords must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("mass profile values must be finite")
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.min(np.diff(v), initial=0.0) < -_MONOTONE_ATOL * scale:
            raise ValueError("mass profile values must be nondecreasing")
        v = np.maximum.accumulate(v)
        c.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "values", v)

    @property
    def endpoint(self) -> float:
        return float(self.values[-1])

    def interp(self, coords: np.ndarray) -> np.ndarray:
        return np.interp(coords, self.coords, self.values)
