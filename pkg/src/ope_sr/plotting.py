"""Matplotlib figures written next to experiment reports."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def figure_path(report_path, suffix: str = "") -> Path:
    p = Path(report_path)
    return p.with_name(p.stem + suffix + ".png")


def plot_roundtrip(report, path) -> Path:
    """Heatmap of mean PSNR over (n, r), argmax per column outlined."""
    matrix = report.aggregates["mean_psnr"]
    rs = sorted(int(r) for r in matrix)
    ns = sorted({int(n) for r in matrix for n in matrix[r]})
    grid = np.full((len(ns), len(rs)), np.nan)
    for ci, r in enumerate(rs):
        for n, v in matrix[str(r)].items():
            grid[ns.index(int(n)), ci] = min(v, 99.0) if math.isfinite(v) else 99.0

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(1.1 + 0.8 * len(rs), 0.9 + 0.35 * len(ns)))
        im = ax.imshow(grid, cmap="viridis", aspect="auto")
        lo, hi = np.nanmin(grid), np.nanmax(grid)
        for ci, r in enumerate(rs):
            best = report.aggregates["argmax_n"].get(str(r))
            for ri, n in enumerate(ns):
                if np.isnan(grid[ri, ci]):
                    continue
                ax.text(ci, ri, f"{grid[ri, ci]:.2f}", ha="center", va="center",
                        color="k" if grid[ri, ci] > lo + 0.6 * (hi - lo) else "w",
                        fontweight="bold" if n == best else "normal", fontsize=7)
                if n == best:
                    ax.add_patch(plt.Rectangle((ci - 0.5, ri - 0.5), 1, 1, fill=False, ec="r", lw=1.5))
        ax.set_xticks(range(len(rs)), [f"x{r}" for r in rs])
        ax.set_yticks(range(len(ns)), [str(n) for n in ns])
        ax.set_xlabel("downscale factor r")
        ax.set_ylabel("max frequency n")
        ax.set_title("round-trip PSNR (dB)")
        fig.colorbar(im, ax=ax, shrink=0.8)
        return _save(fig, path)


def plot_bench(report, path) -> Path:
    items = report.items
    px = np.array([it["H"] * it["W"] for it in items], dtype=float)
    ms = np.array([it["time_ms"] for it in items])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.loglog(px, ms, "o-", label="measured")
        ax.loglog(px, ms[0] * px / px[0], "k--", lw=0.8, label="linear in pixels")
        for it, x, y in zip(items, px, ms):
            ax.annotate(f"x{it['scale']:g}", (x, y), textcoords="offset points", xytext=(4, -10), fontsize=7)
        ax.set_xlabel("output pixels")
        ax.set_ylabel("render time (ms)")
        ax.legend()
        return _save(fig, path)


def plot_ablation(report, path) -> Path:
    means = report.aggregates["mean_psnr"]
    modes = list(means)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 3))
        bars = ax.bar(modes, [means[m] for m in modes], color=["C0" if m == "full" else "C7" for m in modes])
        ax.bar_label(bars, fmt="%.2f", fontsize=7)
        ax.set_ylabel("mean PSNR (dB)")
        ax.set_title("patch-ensemble ablation")
        return _save(fig, path)


def plot_flip(report, path) -> Path:
    labels = [f"{it['variant']}/{it['axis']}" for it in report.items]
    devs = [max(it["max_abs_dev"], 1e-17) for it in report.items]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        ax.barh(labels, devs, color=["C2" if it["variant"] == "parity" else "C3" for it in report.items])
        ax.set_xscale("log")
        ax.axvline(report.params.get("tolerance", 1e-5), color="k", ls="--", lw=0.8)
        ax.set_xlabel("max |render(flip) - flip(render)|")
        return _save(fig, path)


def plot_ortho(report, path) -> Path:
    ns = [it["n"] for it in report.items]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.semilogy(ns, [max(it["max_offdiag"], 1e-18) for it in report.items], "o-", label="max |off-diagonal|")
        ax.semilogy(ns, [max(it["max_diag_dev"], 1e-18) for it in report.items], "s-", label="max |diagonal - 1|")
        ax.axhline(report.params["tolerance"], color="k", ls="--", lw=0.8)
        ax.set_xlabel("max frequency n")
        ax.legend()
        return _save(fig, path)


PLOTTERS = {
    "roundtrip": plot_roundtrip,
    "bench": plot_bench,
    "ablation": plot_ablation,
    "flip-check": plot_flip,
    "ortho-check": plot_ortho,
}


def plot_report(report, path):
    """Render the figure for ``report`` if its command has one."""
    plotter = PLOTTERS.get(report.command)
    if plotter is None or not report.items:
        return None
    return plotter(report, path)
