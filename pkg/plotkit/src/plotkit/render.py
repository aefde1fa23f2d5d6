"""Render junctionflow output files into PNG figures.

Consumes only the documented file formats (manifest.json, traces.csv,
snapshots/*.csv, eigenvalues.csv, sweep.csv + iters_T*.csv); never imports
the simulator.  Figures use fixed sizes and carry no timestamps, so repeated
renders of the same inputs are diffable.
"""

from __future__ import annotations

import glob
import json
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (6.0, 4.5)
DPI = 130

KINDS = ("snapshots", "energy", "eigs", "contraction")


class SchemaMismatch(Exception):
    """An input file is missing or its columns differ from the contract."""


@dataclass
class PlotJob:
    indir: str
    kinds: tuple[str, ...]
    outdir: str

    def __post_init__(self):
        if not os.path.isfile(os.path.join(self.indir, "manifest.json")):
            raise SchemaMismatch(
                f"{self.indir} has no manifest.json; refusing to guess"
            )
        bad = [k for k in self.kinds if k not in KINDS]
        if bad:
            raise SchemaMismatch(f"unknown plot kinds {bad}; known: {KINDS}")


def _read_csv(path: str, expected_header: str) -> np.ndarray:
    if not os.path.isfile(path):
        raise SchemaMismatch(f"missing input file {path}")
    with open(path) as f:
        header = f.readline().strip()
        if header != expected_header:
            raise SchemaMismatch(
                f"{path}: columns {header.split(',')} != "
                f"{expected_header.split(',')}"
            )
        rows = [line.split(",") for line in f if line.strip()]
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def _manifest(indir: str) -> dict:
    with open(os.path.join(indir, "manifest.json")) as f:
        return json.load(f)


def stationary_energy_reference(manifest: dict) -> float | None:
    """E* = 3 sigma(2 pi/3) when the manifest marks a stationary scenario."""
    cfg = manifest.get("config", {})
    if cfg.get("scenario", {}).get("kind") != "stationary":
        return None
    model = manifest.get("model", {})
    m = 2.0 * math.pi / 3.0
    kind = model.get("kind")
    if kind == "quadratic":
        return 3.0 * (m * m + float(model["c"]))
    if kind == "constant":
        return 3.0 * float(model["value"])
    if kind == "read_shockley":
        return 3.0 * float(model["A"]) * m * (float(model["B"]) - math.log(m))
    return None


def _render_snapshots(indir: str, outdir: str) -> str:
    paths = sorted(glob.glob(os.path.join(indir, "snapshots", "snap_*.csv")))
    if not paths:
        raise SchemaMismatch(f"no snapshots/snap_*.csv under {indir}")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    colors = ("tab:blue", "tab:orange", "tab:green")
    n_snap = len(paths)
    anchors = []
    for k, path in enumerate(paths):
        data = _read_csv(path, "curve,idx,x,y")
        alpha = 0.25 + 0.75 * (k / max(1, n_snap - 1)) if n_snap > 1 else 1.0
        for ci in range(3):
            rows = data[data[:, 0] == ci]
            ax.plot(rows[:, 2], rows[:, 3], color=colors[ci], alpha=alpha,
                    lw=1.0)
            if k == n_snap - 1:
                anchors.append(rows[-1, 2:4])
                ax.plot(rows[0, 2], rows[0, 3], "k.", ms=6)
    anchors = np.array(anchors)
    ax.plot(anchors[:, 0], anchors[:, 1], "ks", ms=5, mfc="none")
    radius = float(np.linalg.norm(anchors, axis=1).max())
    phi = np.linspace(0, 2 * np.pi, 256)
    ax.plot(radius * np.cos(phi), radius * np.sin(phi), "k--", lw=0.7)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("network snapshots (junction dot, anchors squares)")
    out = os.path.join(outdir, "snapshots.png")
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


def _render_energy(indir: str, outdir: str) -> str:
    data = _read_csv(os.path.join(indir, "traces.csv"),
                     "t,E,junction_speed,theta1,theta2,theta3")
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=FIGSIZE, sharex=True)
    ax1.plot(data[:, 0], data[:, 1], "tab:blue", lw=1.2)
    ref = stationary_energy_reference(_manifest(indir))
    if ref is not None:
        ax1.axhline(ref, color="tab:red", ls="--", lw=0.9,
                    label=f"E* = {ref:.6g}")
        ax1.legend(loc="best", fontsize=8)
    ax1.set_ylabel("total surface energy")
    ax2.plot(data[:, 0], data[:, 2], "tab:green", lw=1.2)
    ax2.set_ylabel("junction speed")
    ax2.set_xlabel("t")
    out = os.path.join(outdir, "energy.png")
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


def _render_eigs(indir: str, outdir: str) -> str:
    data = _read_csv(os.path.join(indir, "eigenvalues.csv"),
                     "c,lambda1,lambda2,lambda3,lambda4")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for k in range(1, 5):
        ax.plot(data[:, 0], data[:, k], lw=1.2, label=f"lambda{k}")
    ax.axhline(0.0, color="k", lw=0.6)
    mins = data[:, 1:].min(axis=1)
    sign_change = np.where((mins[:-1] < 0) & (mins[1:] >= 0))[0]
    if sign_change.size:
        i = sign_change[0]
        c0, c1 = data[i, 0], data[i + 1, 0]
        m0, m1 = mins[i], mins[i + 1]
        c_star = c0 - m0 * (c1 - c0) / (m1 - m0)
        ax.axvline(c_star, color="tab:red", ls=":", lw=1.0,
                   label=f"min lambda = 0 near c = {c_star:.3f}")
    ax.set_xscale("log")
    ax.set_xlabel("c")
    ax.set_ylabel("Hessian eigenvalues")
    ax.legend(loc="best", fontsize=8)
    out = os.path.join(outdir, "eigs.png")
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


def _render_contraction(indir: str, outdir: str) -> str:
    sweep_path = os.path.join(indir, "sweep.csv")
    sweep = _read_csv(sweep_path, "T,iterations,max_factor,converged")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=FIGSIZE)
    found_any = False
    for T in sweep[:, 0]:
        safe = format(T, "g").replace(".", "p").replace("-", "m")
        path = os.path.join(indir, f"iters_T{safe}.csv")
        if not os.path.isfile(path):
            continue
        found_any = True
        with open(path) as f:
            header = f.readline().strip()
            if header != "iter,distance,factor":
                raise SchemaMismatch(f"{path}: columns {header.split(',')}")
            rows = [line.strip().split(",") for line in f if line.strip()]
        its = [int(r[0]) for r in rows]
        dist = [float(r[1]) for r in rows]
        ax1.semilogy(its, dist, marker=".", lw=1.0, label=f"T={T:g}")
    if not found_any:
        plt.close(fig)
        raise SchemaMismatch(
            f"sweep.csv present but no matching iters_T*.csv under {indir}"
        )
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("iterate distance")
    ax1.legend(fontsize=8)
    ax2.plot(sweep[:, 0], sweep[:, 2], "o-", lw=1.0)
    ax2.axhline(1.0, color="k", lw=0.6, ls="--")
    ax2.axhline(0.5, color="tab:red", lw=0.6, ls=":")
    ax2.set_xlabel("horizon T")
    ax2.set_ylabel("max contraction factor")
    out = os.path.join(outdir, "contraction.png")
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


_RENDERERS = {
    "snapshots": _render_snapshots,
    "energy": _render_energy,
    "eigs": _render_eigs,
    "contraction": _render_contraction,
}


def render(job: PlotJob) -> list[str]:
    """One image per requested kind; read-only on the input directory."""
    os.makedirs(job.outdir, exist_ok=True)
    return [_RENDERERS[kind](job.indir, job.outdir) for kind in job.kinds]
