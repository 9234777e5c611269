"""Batch front door: the five experiment commands and their CSV outputs.

Exit codes are a stable contract:

* ``0`` success / certificate pass
* ``1`` certificate fail (the run itself succeeded)
* ``2`` config or parameter error
* ``3`` solver step-size collapse
* ``4`` sweep bracket does not straddle
* ``5`` command precondition unmet (e.g. collapse report on a bounded run)

Every CSV starts with its header row; run metadata is appended as
``# key=value`` footer lines, and a plain-text summary mirrors each CSV.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .energetics import collapse_diagnostics, energy_report, invariant_audit
from .model import (
    CIRCLE_LENGTH,
    SPHERE_AREA_4D,
    Grid,
    MassProfile,
    Params2D,
    Params4D,
    RadialProfile,
    validate_params2d,
    validate_params4d,
)
from .solver import (
    TERM_BLOWUP,
    TERM_STEP_COLLAPSE,
    Trajectory,
    comparison_monitor,
    run_2d,
    run_4d,
)
from .subsolutions import (
    Subsolution2D,
    SubsolutionPair4D,
    build_initial_data_2d,
    build_initial_data_4d,
    certify_subsolution_2d,
    certify_subsolution_4d,
    residual_field_2d,
    residual_field_4d,
    select_parameters_2d,
    select_parameters_4d,
)
from .sweep import BracketError, run_sweep
from .transform import density_from_mass_2d, density_from_mass_4d

EXIT_OK = 0
EXIT_CERT_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_BRACKET = 4
EXIT_PRECONDITION = 5

_PARAM4D_KEYS = ("delta", "mass_m", "kappa", "mu_star", "eps", "ell", "gamma")


def _write_csv(path: Path, header: list[str], rows, footer: dict | None = None):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        if footer:
            for key, value in footer.items():
                fh.write(f"# {key}={value}\n")


def _write_summary(path: Path, lines: list[str]):
    path.write_text("\n".join(lines) + "\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return repr(x)
    return str(x)


# ---------------------------------------------------------------------------
# Parameter and initial-data construction from config entries


def _params_4d(cfg: RunConfig) -> Params4D:
    if all(cfg.has(k) for k in ("eps", "ell", "gamma", "mu_star")):
        p = Params4D(**{k: cfg.require_float(k) for k in _PARAM4D_KEYS})
        bad = validate_params4d(p)
        if bad:
            raise ConfigError(f"explicit 4D parameters violate {[v.name for v in bad]}")
        return p
    delta = cfg.get_float("delta", 1.0)
    kappa = cfg.get_float("kappa", 1.0)
    mass_m = cfg.require_float("mass_m")
    try:
        return select_parameters_4d(delta, kappa, mass_m)
    except ValueError as exc:
        raise ConfigError(f"4D parameter construction failed: {exc}") from exc


def _params_2d(cfg: RunConfig) -> Params2D:
    if all(cfg.has(k) for k in ("eps", "ell")):
        p = Params2D(
            mass_m=cfg.require_float("mass_m"),
            eps=cfg.require_float("eps"),
            ell=cfg.require_float("ell"),
        )
        bad = validate_params2d(p)
        if bad:
            raise ConfigError(f"explicit 2D parameters violate {[v.name for v in bad]}")
        return p
    try:
        return select_parameters_2d(cfg.require_float("mass_m"))
    except ValueError as exc:
        raise ConfigError(f"2D parameter construction failed: {exc}") from exc


def _bump_profile(grid_radii: np.ndarray, mass: float, dim: int) -> RadialProfile:
    from .transform import mass_2d, mass_4d

    shape = RadialProfile(r=grid_radii, values=(1.0 - grid_radii**2) ** 2)
    total = mass_4d(shape) if dim == 4 else mass_2d(shape)
    return RadialProfile(r=grid_radii, values=shape.values * (mass / total))


def _random_profile(grid_radii: np.ndarray, mass: float, dim: int, seed: int) -> RadialProfile:
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-0.4, 0.4, size=4)
    vals = np.ones_like(grid_radii)
    for k, c in enumerate(coeffs, start=1):
        vals = vals + c * np.cos(k * math.pi * grid_radii)
    vals = np.clip(vals, 0.05, None)
    prof = RadialProfile(r=grid_radii, values=vals)
    from .transform import mass_2d, mass_4d

    total = mass_4d(prof) if dim == 4 else mass_2d(prof)
    return RadialProfile(r=grid_radii, values=vals * (mass / total))


def _mobius_mass(grid: Grid, theta: float, endpoint: float, kind: str) -> MassProfile:
    s = grid.nodes
    return MassProfile(coords=s, values=(1.0 + theta) * s / (theta + s) * endpoint, kind=kind)


def _build_run(cfg: RunConfig, dim: int):
    """Initial data plus metadata for simulate/collapse/energy commands."""
    n = cfg.n
    grid = Grid.radial_4d(n) if dim == 4 else Grid.radial_2d(n)
    profile = cfg.get("profile", "bump")
    meta: dict[str, object] = {"profile": profile, "dimension": dim, "n": n}
    barrier = None
    if profile == "certified":
        if dim == 4:
            params = _params_4d(cfg)
            pair = SubsolutionPair4D(params)
            data = build_initial_data_4d(pair, grid)
            u0, w0 = data.U0, data.W0
            mass = params.mass_m
            delta = params.delta
            barrier = pair
            meta.update({k: getattr(params, k) for k in _PARAM4D_KEYS})
            meta.update({"theta_u": data.theta_u, "theta_w": data.theta_w, "c_w": data.c_w})
        else:
            params = _params_2d(cfg)
            sub = Subsolution2D(params)
            data = build_initial_data_2d(sub, grid)
            u0, w0 = data.M0, None
            mass = params.mass_m
            delta = None
            barrier = sub
            meta.update({"mass_m": params.mass_m, "eps": params.eps, "ell": params.ell})
            meta.update({"theta": data.theta})
    else:
        mass = cfg.require_float("mass_m")
        delta = cfg.get_float("delta", 1.0) if dim == 4 else None
        meta["mass_m"] = mass
        if dim == 4:
            meta["delta"] = delta
        if profile == "mobius":
            theta = cfg.get_float("theta", 0.05)
            meta["theta"] = theta
            if dim == 4:
                u0 = _mobius_mass(grid, theta, mass / SPHERE_AREA_4D, "U4D")
            else:
                u0 = _mobius_mass(grid, theta, mass / CIRCLE_LENGTH, "M2D")
        elif profile == "bump":
            u0 = _bump_profile(grid.radii, mass, dim)
        elif profile == "random":
            u0 = _random_profile(grid.radii, mass, dim, cfg.seed)
        else:
            raise ConfigError(f"unknown profile kind {profile!r}")
        if dim == 4:
            ratio = cfg.get_float("w_mass_ratio", 1.0 / delta)
            w_mass = mass * ratio
            meta["w_mass_ratio"] = ratio
            if isinstance(u0, MassProfile):
                w0 = _mobius_mass(grid, cfg.get_float("theta", 0.05),
                                  w_mass / SPHERE_AREA_4D, "W4D")
            else:
                w0 = RadialProfile(r=u0.r, values=u0.values * (w_mass / mass))
        else:
            w0 = None
    return grid, u0, w0, mass, delta, barrier, meta


def _run_trajectory(cfg: RunConfig, dim: int):
    grid, u0, w0, mass, delta, barrier, meta = _build_run(cfg, dim)
    kwargs = dict(
        mass_m=mass,
        grid=grid,
        t_end=cfg.get_float("t_end", 10.0),
        snapshot_interval=cfg.get_float("snapshot_interval"),
        dt_init=cfg.get_float("dt_init", 1e-6),
        dt_max=cfg.get_float("dt_max"),
        slope_threshold=cfg.get_float("slope_threshold", 1e8),
    )
    if cfg.has("value_threshold"):
        kwargs["value_threshold"] = cfg.get_float("value_threshold")
    if dim == 4:
        traj = run_4d(u0, w0, delta=delta, **kwargs)
    else:
        traj = run_2d(u0, **kwargs)
    return traj, barrier, meta


def _trajectory_rows(traj: Trajectory):
    coords = traj.grid.nodes
    for k in range(traj.n_snapshots):
        t = float(traj.times[k])
        if traj.dim == 4:
            u = density_from_mass_4d(MassProfile(coords=coords, values=traj.U[k], kind="U4D"))
            w = density_from_mass_4d(MassProfile(coords=coords, values=traj.W[k], kind="W4D"))
            for i in range(len(coords)):
                yield (t, coords[i], _fmt(float(traj.U[k][i])), _fmt(float(traj.W[k][i])),
                       _fmt(float(u.values[i])), _fmt(float(w.values[i])))
        else:
            u = density_from_mass_2d(MassProfile(coords=coords, values=traj.U[k], kind="M2D"))
            for i in range(len(coords)):
                yield (t, coords[i], _fmt(float(traj.U[k][i])), "",
                       _fmt(float(u.values[i])), "")


def _traj_footer(traj: Trajectory, meta: dict) -> dict:
    footer = dict(meta)
    footer.update({
        "termination": traj.termination,
        "t_final": traj.t_final,
        "final_max_slope": traj.final_max_slope,
        "final_origin_value": traj.final_origin_value,
        "mass_m": traj.mass_m,
    })
    if traj.delta is not None:
        footer["delta"] = traj.delta
    return footer


# ---------------------------------------------------------------------------
# Commands


def cmd_certify(cfg: RunConfig, out: Path) -> int:
    if cfg.mode not in ("certify4d", "certify2d"):
        raise ConfigError(f"certify got mode {cfg.mode!r}")
    n = cfg.n
    n_time = cfg.get_int("n_time", n)
    if cfg.mode == "certify4d":
        params = _params_4d(cfg)
        pair = SubsolutionPair4D(params)
        cert = certify_subsolution_4d(pair, grid_n=n, n_time=n_time)
        coord, times, res_u, res_w = residual_field_4d(pair)
        field_rows = [
            (times[j], coord[i], res_u[j, i], res_w[j, i])
            for j in range(len(times))
            for i in range(0, len(coord), max(1, len(coord) // 128))
        ]
        field_header = ["t", "coord", "residual_transport", "residual_production"]
        param_footer = {k: getattr(params, k) for k in _PARAM4D_KEYS}
    else:
        params = _params_2d(cfg)
        sub = Subsolution2D(params)
        cert = certify_subsolution_2d(sub, grid_n=n, n_time=n_time)
        coord, times, res = residual_field_2d(sub)
        field_rows = [
            (times[j], coord[i], res[j, i])
            for j in range(len(times))
            for i in range(0, len(coord), max(1, len(coord) // 128))
        ]
        field_header = ["t", "coord", "residual_transport"]
        param_footer = {"mass_m": params.mass_m, "eps": params.eps, "ell": params.ell}
    rows = [(c.name, c.value, cert.grid_n, "pass" if c.passed else "fail")
            for c in cert.checks]
    rows.append(("overall", "", cert.grid_n, cert.verdict))
    _write_csv(out / "certificate.csv",
               ["check_name", "max_residual_or_slack", "grid_n", "verdict"],
               rows, footer={"mode": cfg.mode, **param_footer})
    _write_csv(out / "certificate_field.csv", field_header, field_rows,
               footer={"mode": cfg.mode, **param_footer})
    _write_summary(out / "certificate_summary.txt", [
        f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.6e}" for c in cert.checks
    ] + [f"verdict: {cert.verdict}"])
    return EXIT_OK if cert.verdict == "pass" else EXIT_CERT_FAIL


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    if cfg.mode not in ("simulate4d", "simulate2d"):
        raise ConfigError(f"simulate got mode {cfg.mode!r}")
    dim = 4 if cfg.mode == "simulate4d" else 2
    traj, barrier, meta = _run_trajectory(cfg, dim)
    footer = _traj_footer(traj, meta)
    _write_csv(out / "trajectory.csv",
               ["t", "s", "U", "W", "u_reconstructed", "w_reconstructed"],
               _trajectory_rows(traj), footer=footer)
    audit = invariant_audit(traj)
    audit_rows = [
        (r.t, _fmt(r.u_mass_drift), _pass(r.u_mass_ok), _fmt(r.w_mass), _pass(r.w_mass_ok),
         _fmt(r.max_r3vr), _pass(r.r3vr_ok), _fmt(r.energy), _fmt(r.energy_increase),
         _pass(r.energy_ok))
        for r in audit.rows
    ]
    _write_csv(out / "audit.csv",
               ["t", "u_mass_drift", "u_mass_ok", "w_mass", "w_mass_ok",
                "max_r3vr", "r3vr_ok", "energy", "energy_increase", "energy_ok"],
               audit_rows,
               footer={"w_mass_bound": audit.w_mass_bound, "r3vr_bound": audit.r3vr_bound})
    _write_summary(out / "audit_summary.txt", [
        f"{'PASS' if r.u_mass_ok else 'FAIL'} mass pinning at t={r.t:.6g} "
        f"(drift {r.u_mass_drift:.2e})" for r in audit.rows
    ] + [f"overall: {'PASS' if audit.all_ok else 'FAIL'}"])
    summary = [
        f"termination: {traj.termination}",
        f"t_final: {traj.t_final}",
        f"final_max_slope: {traj.final_max_slope}",
        f"audit: {'PASS' if audit.all_ok else 'FAIL'}",
    ]
    if barrier is not None:
        monitor = comparison_monitor(traj, barrier)
        _write_csv(out / "comparison.csv", ["t", "max_violation"],
                   zip(monitor.times, monitor.violations),
                   footer={"max_violation": monitor.max_violation})
        summary.append(f"comparison_max_violation: {monitor.max_violation}")
    _write_summary(out / "trajectory_summary.txt", summary)
    if traj.termination == TERM_STEP_COLLAPSE:
        print(f"solver failed: {traj.termination} at t={traj.t_final}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _pass(ok: bool) -> str:
    return "pass" if ok else "fail"


def cmd_sweep(cfg: RunConfig, out: Path, threads: int = 1) -> int:
    if cfg.mode != "sweep":
        raise ConfigError(f"sweep got mode {cfg.mode!r}")
    dim = cfg.get_int("dimension", 2)
    result = run_sweep(
        dim,
        cfg.require_float("mass_lo"),
        cfg.require_float("mass_hi"),
        n=cfg.n,
        t_end=cfg.get_float("t_end", 20.0),
        theta=cfg.get_float("theta"),
        delta=cfg.get_float("delta", 1.0),
        w0_mass=cfg.get_float("w0_mass"),
        max_bisections=cfg.get_int("max_bisections", 12),
        threads=threads,
        value_node=cfg.get_int("value_node", 8),
        max_steps=cfg.get_int("max_steps", 900_000),
    )
    rows = [
        (i, p.mass, "blowup" if p.blowup else "bounded", p.t_final)
        for i, p in enumerate(result.probes)
    ]
    _write_csv(out / "sweep.csv", ["probe", "mass", "verdict", "t_final"], rows,
               footer={
                   "dimension": dim,
                   "bounded_max": result.bounded_max,
                   "blowup_min": result.blowup_min,
                   "estimate": result.estimate,
                   "theta": result.theta,
                   "t_end": result.t_end,
                   "n": result.n,
               })
    _write_summary(out / "sweep_summary.txt", [
        f"probes: {len(result.probes)}",
        f"bounded_max: {result.bounded_max}",
        f"blowup_min: {result.blowup_min}",
        f"estimate: {result.estimate}",
    ])
    return EXIT_OK


def cmd_collapse(cfg: RunConfig, out: Path) -> int:
    if cfg.mode != "collapse":
        raise ConfigError(f"collapse got mode {cfg.mode!r}")
    dim = cfg.get_int("dimension", 4)
    traj, _, meta = _run_trajectory(cfg, dim)
    if traj.termination == TERM_STEP_COLLAPSE:
        return EXIT_SOLVER
    if traj.termination != TERM_BLOWUP:
        print(f"no blowup: run terminated with {traj.termination!r}", file=sys.stderr)
        return EXIT_PRECONDITION
    report = collapse_diagnostics(traj)
    outer = {float(r): float(f) for r, f in zip(report.outer_r, report.outer_f)}
    rows = [
        (float(r), float(x), _fmt(outer.get(float(r))))
        for r, x in zip(report.radii, report.mass_in_ball)
    ]
    _write_csv(out / "collapse.csv", ["r", "mass_in_ball", "outer_density"], rows,
               footer={
                   "m_star": report.point_mass,
                   "r_cut": report.r_cut,
                   "detection_time": report.detection_time,
                   "total_mass": report.total_mass,
                   **meta,
               })
    _write_summary(out / "collapse_summary.txt", [
        f"m_star: {report.point_mass}",
        f"detection_time: {report.detection_time}",
        f"mass_in_ball(1): {report.mass_in_ball[-1]}",
    ])
    return EXIT_OK


def cmd_energy(cfg: RunConfig, out: Path) -> int:
    if cfg.mode != "energy":
        raise ConfigError(f"energy got mode {cfg.mode!r}")
    dim = cfg.get_int("dimension", 4)
    if dim != 4:
        raise ConfigError("the energy functional is defined for dimension=4 only")
    traj, _, meta = _run_trajectory(cfg, 4)
    if traj.termination == TERM_STEP_COLLAPSE:
        return EXIT_SOLVER
    report = energy_report(traj)
    rows = []
    for k, snap in enumerate(report.snapshots):
        if k == 0:
            d_val, res = "", ""
        else:
            d_val = _fmt(report.intervals[k - 1].value)
            res = _fmt(report.intervals[k - 1].residual)
        rows.append((snap.t, snap.total, snap.entropy, snap.coupling,
                     snap.laplacian_sq, snap.gradient_sq, d_val, res))
    _write_csv(out / "energy.csv",
               ["t", "energy", "entropy", "coupling", "laplacian_sq",
                "gradient_sq", "dissipation", "identity_residual"],
               rows, footer={**meta, "termination": traj.termination,
                             "max_residual": report.max_residual})
    energies = report.energies
    monotone = bool(np.all(np.diff(energies) <= 10.0 * max(report.max_residual, 1e-14)
                           * np.diff(traj.times) + 1e-10))
    _write_summary(out / "energy_summary.txt", [
        f"snapshots: {len(report.snapshots)}",
        f"max_identity_residual: {report.max_residual}",
        f"energy_monotone: {'PASS' if monotone else 'FAIL'}",
    ])
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="collapselab",
        description="Batch experiments for radial chemotactic collapse",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("certify", "simulate", "sweep", "collapse", "energy"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = Path(args.out) if args.out else Path(cfg.get("out", "."))
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "certify":
            return cmd_certify(cfg, out)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, threads=args.threads)
        if args.command == "collapse":
            return cmd_collapse(cfg, out)
        return cmd_energy(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BracketError as exc:
        print(f"bracket error: {exc}", file=sys.stderr)
        return EXIT_BRACKET


if __name__ == "__main__":
    sys.exit(main())
