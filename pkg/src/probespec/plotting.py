"""Figure rendering for the command-line report path.

Kept separate so the numerical core never imports matplotlib; only the CLI
pulls these in, and only when plotting is enabled. The Agg backend writes
PNGs without any display.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_sweep_figure(result, peaks, oracle=None, path: str | Path = "sweep.png") -> None:
    """Decay curve with detected peaks and, if given, true transition lines."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(9, 4.5))
    centers = result.grid.centers
    ax.plot(centers, result.decay, lw=1.0, color="tab:blue", label="decay probability")
    if oracle is not None:
        for freq in oracle.transition_frequencies:
            ax.axvline(float(freq), color="tab:red", ls=":", lw=0.8, alpha=0.7)
        ax.plot([], [], color="tab:red", ls=":", lw=0.8, label="true transitions")
    if peaks:
        ax.plot(
            [p.omega_peak for p in peaks],
            [p.height for p in peaks],
            "v",
            color="tab:orange",
            ms=6,
            label="detected peaks",
        )
    ax.set_xlabel("probe frequency")
    ax.set_ylabel("decay probability")
    ax.set_xlim(result.grid.omega_min, result.grid.omega_max)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_predicted_figure(grid, predicted, path: str | Path = "predicted.png") -> None:
    """First-order predicted sweep, with clipped samples marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(9, 4.5))
    centers = grid.centers
    ax.plot(centers, predicted.values, lw=1.0, color="tab:green", label="predicted decay")
    if np.any(predicted.clipped):
        ax.plot(
            centers[predicted.clipped],
            predicted.values[predicted.clipped],
            "x",
            color="tab:red",
            ms=5,
            label="clipped (approximation overflow)",
        )
    ax.set_xlabel("probe frequency")
    ax.set_ylabel("predicted decay probability")
    ax.set_xlim(grid.omega_min, grid.omega_max)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bench_figure(slice_counts, errors, gate_ns, gate_counts, fit, path) -> None:
    """Two panels: Trotter error vs slice count, and gate count vs n with fit."""
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.loglog(slice_counts, errors, "o-", color="tab:blue")
    ax1.set_xlabel("slices L")
    ax1.set_ylabel("operator-norm error")
    ax1.set_title("product-formula convergence")
    ns = np.asarray(gate_ns, dtype=np.float64)
    ax2.plot(ns, gate_counts, "o", color="tab:orange", label="elementary gates")
    a, b, c0 = fit
    dense = np.linspace(ns[0], ns[-1], 200)
    ax2.plot(dense, a * dense**2 + b * dense + c0, "-", color="tab:gray",
             label=f"{a:.1f} n^2 + {b:.1f} n + {c0:.1f}")
    ax2.set_xlabel("system qubits n")
    ax2.set_ylabel("gate count")
    ax2.set_title("interaction-circuit size")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_refinement_figure(executed, path) -> None:
    """Stacked panels, one per refinement job sub-sweep."""
    plt = _pyplot()
    rows = max(len(executed), 1)
    fig, axes = plt.subplots(rows, 1, figsize=(9, 2.6 * rows), squeeze=False)
    for ax, (job, result, peaks) in zip(axes[:, 0], executed):
        ax.plot(result.grid.centers, result.decay, lw=0.9, color="tab:blue")
        if peaks:
            ax.plot([p.omega_peak for p in peaks], [p.height for p in peaks],
                    "v", color="tab:orange", ms=5)
        ax.set_ylabel("decay")
        ax.set_title(
            f"rung {job.rung}: c={job.c:g}, tau={job.tau:g}, m={job.m}", fontsize=8
        )
    axes[-1, 0].set_xlabel("probe frequency")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
