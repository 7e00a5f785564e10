"""Matplotlib figure rendering for the CLI report paths.

Importing this module selects the non-interactive Agg backend; every
function writes a figure file next to the delimited output it illustrates.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

from .compare import SweepResult  # noqa: E402
from .dynamics import Trajectory  # noqa: E402

__all__ = ["save_trajectory_figure", "save_comparison_figure", "save_sweep_figure"]

_DPI = 150


def save_trajectory_figure(traj: Trajectory, path: str | Path, title: str = "") -> None:
    """Angle and angular velocity against dimensionless time, two panels."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True, constrained_layout=True)
    ax1.plot(traj.tau, traj.theta, lw=0.8)
    ax1.set_ylabel(r"$\theta$ (rad)")
    if title:
        ax1.set_title(title)
    ax2.plot(traj.tau, traj.theta_dot, lw=0.8, color="tab:red")
    ax2.set_ylabel(r"$\dot\theta$")
    ax2.set_xlabel(r"$\tau$")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_comparison_figure(
    tau: np.ndarray,
    numeric: np.ndarray,
    curves: dict[str, np.ndarray],
    path: str | Path,
    title: str = "",
) -> None:
    """Overlay of numeric and asymptotic angular velocities over one period."""
    fig, ax = plt.subplots(figsize=(8, 5), constrained_layout=True)
    ax.plot(tau, numeric, "k-", lw=1.5, label="numeric")
    for label, values in curves.items():
        ax.plot(tau, values, "--", lw=1.2, label=label)
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\dot\theta$")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_sweep_figure(result: SweepResult, path: str | Path, log_x: bool = False) -> None:
    """Absolute and relative deviation against damping, one panel each."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5), constrained_layout=True)
    methods = sorted({r.method for r in result})
    for method in methods:
        rows = [r for r in result if r.method == method and r.status == "ok"]
        betas = [r.beta for r in rows]
        ax1.plot(betas, [r.max_abs_err for r in rows], "o-", ms=3, label=method)
        ax2.plot(betas, [r.rel_err for r in rows], "o-", ms=3, label=method)
    for ax, ylabel in ((ax1, "max abs deviation"), (ax2, "relative deviation")):
        ax.set_xlabel(r"$\beta$")
        ax.set_ylabel(ylabel)
        ax.set_yscale("log")
        if log_x:
            ax.set_xscale("log")
        ax.grid(True, alpha=0.3, which="both")
        ax.legend()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
