"""Headless rendering of experiment tables to PNG files.

This module exists purely for the report path of the CLI, so it forces
the Agg backend and writes files with fixed metadata; rendering the same
tables twice yields byte-identical images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_METADATA = {"Software": "abgsem"}


def _save(fig, path) -> None:
    fig.savefig(path, dpi=144, metadata=_METADATA)
    plt.close(fig)


def render_outage_cdf(fixed, adaptive, path) -> None:
    """Step CDFs of both schemes with the quality target marked."""
    fig, ax = plt.subplots(figsize=(5.4, 3.8))
    ax.step(fixed.values, fixed.cdf, where="post",
            label=f"fixed power (outage {fixed.outage:.4f})")
    ax.step(adaptive.values, adaptive.cdf, where="post",
            label=f"adaptive power (outage {adaptive.outage:.4f})")
    ax.axvline(fixed.threshold, color="k", linestyle=":", linewidth=1.0,
               label=f"target {fixed.threshold:g}")
    ax.set_xlabel("metric value")
    ax.set_ylabel("empirical CDF")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_ee_sweep(rows, xlabel, path) -> None:
    """Optimal power and efficiency against the sweep variable."""
    arr = np.asarray(rows, dtype=float)
    fig, (ax_p, ax_e) = plt.subplots(2, 1, figsize=(5.4, 5.2), sharex=True)
    ax_p.plot(arr[:, 0], arr[:, 1], marker=".", color="tab:blue")
    ax_p.set_ylabel("optimal power (W)")
    ax_p.grid(True, alpha=0.4)
    ax_e.plot(arr[:, 0], arr[:, 2], marker=".", color="tab:green")
    ax_e.set_ylabel("energy efficiency (1/W)")
    ax_e.set_xlabel(xlabel)
    ax_e.grid(True, alpha=0.4)
    fig.tight_layout()
    _save(fig, path)


def render_maxmin_sweep(rows, path) -> None:
    """Worst-user level under bisection and equal split versus budget."""
    arr = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(5.4, 3.8))
    ax.plot(arr[:, 0], arr[:, 1], marker=".", label="max-min allocation")
    ax.plot(arr[:, 0], arr[:, 2], marker=".", label="equal split")
    ax.set_xlabel("total power budget (W)")
    ax.set_ylabel("worst-user metric")
    ax.grid(True, alpha=0.4)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
