"""The five plot kinds, rendered strictly from CSV content.

No physics is recomputed here except the analytic lower-barrier overlays,
which are rebuilt from the parameter block serialized in the trajectory
footer.  Inputs are opened read-only; captions are deterministic functions
of the spec and the CSV metadata.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvdata import Table, read_table
from .spec import PlotSpec

_FOOTER_CAPTION_KEYS = (
    "dimension", "profile", "n", "mass_m", "delta", "kappa", "eps", "ell",
    "gamma", "mu_star", "termination", "t_final", "m_star", "estimate",
    "bounded_max", "blowup_min", "theta", "t_end", "max_residual",
    "detection_time", "mode",
)


def _caption(spec: PlotSpec, tables: list[Table]) -> str:
    lines = [f"kind: {spec.kind}"]
    for t in tables:
        lines.append(f"input: {Path(t.path).name}")
        noted = {k: t.footer[k] for k in _FOOTER_CAPTION_KEYS if k in t.footer}
        if noted:
            lines.append("  " + " ".join(f"{k}={v}" for k, v in sorted(noted.items())))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Analytic overlays from serialized parameters


def _barrier_2d(rho, t, eps, ell):
    tau = eps - ell * t
    if tau <= 0.0:
        return None
    return 4.0 * math.exp(tau) * rho / (rho + tau**3)


def _barrier_4d(s, t, eps, ell, gamma):
    tau = eps - ell * t
    if tau <= 0.0:
        return None
    a = 32.0 * math.exp((gamma + 1.0) * tau)
    q = np.sqrt(s)
    return a * s * (q + 3.0 * tau**3) / (q + tau**3) ** 3


def _overlay(table: Table, coord, t):
    f = table.footer
    if "eps" not in f or "ell" not in f:
        return None
    eps, ell = float(f["eps"]), float(f["ell"])
    if f.get("dimension") == "4" and "gamma" in f:
        return _barrier_4d(coord, t, eps, ell, float(f["gamma"]))
    if f.get("dimension") == "2":
        return _barrier_2d(coord, t, eps, ell)
    return None


# ---------------------------------------------------------------------------
# Plot kinds


def _plot_trajectory(spec: PlotSpec, ax):
    table = read_table(spec.inputs[0])
    table.require(["t", "s", "U"])
    t = table.column("t")
    s = table.column("s")
    U = table.column("U")
    times = np.unique(t)
    cmap = plt.get_cmap("viridis")
    for i, tk in enumerate(times):
        mask = t == tk
        color = cmap(i / max(len(times) - 1, 1))
        ax.plot(s[mask], U[mask], color=color, lw=1.0, label=f"t={tk:.4g}")
        bar = _overlay(table, s[mask], float(tk))
        if bar is not None:
            ax.plot(s[mask], bar, color=color, lw=0.8, ls="--")
    ax.set_xlabel("transformed coordinate")
    ax.set_ylabel("cumulative mass")
    if len(times) <= 8:
        ax.legend(fontsize=7)
    return [table]


def _plot_energy(spec: PlotSpec, ax):
    table = read_table(spec.inputs[0])
    table.require(["t", "energy", "dissipation", "identity_residual"])
    t = table.column("t")
    ax.plot(t, table.column("energy"), "o-", ms=2.5, label="energy")
    ax2 = ax.twinx()
    ax2.plot(t, table.column("identity_residual"), "s--", ms=2, color="tab:red",
             label="identity residual")
    ax2.set_yscale("log")
    ax2.set_ylabel("identity residual")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(loc="upper right", fontsize=7)
    return [table]


def _plot_collapse(spec: PlotSpec, ax):
    table = read_table(spec.inputs[0])
    table.require(["r", "mass_in_ball"])
    r = table.column("r")
    xi = table.column("mass_in_ball")
    ax.plot(r, xi, lw=1.2, label="mass in ball")
    if "m_star" in table.footer:
        m_star = float(table.footer["m_star"])
        ax.axhline(m_star, color="tab:red", ls=":", lw=1.0,
                   label=f"point mass {m_star:.4g}")
    if "outer_density" in table.columns:
        dens = table.column("outer_density")
        good = np.isfinite(dens)
        if np.any(good):
            ax2 = ax.twinx()
            ax2.plot(r[good], dens[good], color="tab:green", lw=0.8,
                     label="outer density")
            ax2.set_yscale("log")
            ax2.set_ylabel("outer density")
    ax.set_xlabel("r")
    ax.set_ylabel("mass in ball")
    ax.legend(fontsize=7)
    return [table]


def _plot_sweep(spec: PlotSpec, ax):
    table = read_table(spec.inputs[0])
    table.require(["probe", "mass", "verdict"])
    mass = table.column("mass")
    verdict = table.column("verdict")
    bounded = np.array([v == "bounded" for v in verdict])
    ax.scatter(mass[bounded], np.zeros(np.sum(bounded)), marker="o",
               color="tab:blue", label="bounded")
    ax.scatter(mass[~bounded], np.ones(np.sum(~bounded)), marker="x",
               color="tab:red", label="blowup")
    for key, color in (("bounded_max", "tab:blue"), ("blowup_min", "tab:red"),
                       ("estimate", "black")):
        if key in table.footer:
            ax.axvline(float(table.footer[key]), color=color, ls=":",
                       lw=1.0, label=key)
    ax.set_xlabel("probe mass")
    ax.set_yticks([0, 1], ["bounded", "blowup"])
    ax.legend(fontsize=7)
    return [table]


def _plot_certificate_heatmap(spec: PlotSpec, ax):
    table = read_table(spec.inputs[0])
    table.require(["t", "coord", "residual_transport"])
    t = table.column("t")
    coord = table.column("coord")
    res = table.column("residual_transport")
    times = np.unique(t)
    coords = np.unique(coord)
    field = np.full((len(times), len(coords)), np.nan)
    t_idx = np.searchsorted(times, t)
    c_idx = np.searchsorted(coords, coord)
    field[t_idx, c_idx] = res
    mesh = ax.pcolormesh(coords, times, field, shading="nearest", cmap="magma")
    plt.colorbar(mesh, ax=ax, label="transport residual")
    ax.set_xlabel("transformed coordinate")
    ax.set_ylabel("t")
    return [table]


_RENDERERS = {
    "trajectory": _plot_trajectory,
    "energy": _plot_energy,
    "collapse": _plot_collapse,
    "sweep": _plot_sweep,
    "certificate-heatmap": _plot_certificate_heatmap,
}


def render(spec: PlotSpec) -> tuple[str, str]:
    """Render one spec; returns (image path, caption path)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=130)
    try:
        tables = _RENDERERS[spec.kind](spec, ax)
        if spec.logx:
            ax.set_xscale("log")
        if spec.logy:
            ax.set_yscale("log")
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        out = Path(spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    caption_path = out.with_suffix(out.suffix + ".caption.txt")
    caption_path.write_text(_caption(spec, tables))
    return str(out), str(caption_path)
