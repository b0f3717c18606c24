"""Figure rendering for saved run records.

Renders gap and consensus trajectories to PNG files plus a fitted-rate
summary CSV next to them. Kept out of the experiment harness so headless
runs never import matplotlib.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ValidationError  # noqa: E402
from .harness import fit_geometric_rate  # noqa: E402


def _semilogy_panel(ax, records, field, ylabel):
    palette = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    colors = {}
    for rec in records:
        if not rec.rows:
            continue
        x = rec.series("cum_rounds")
        y = rec.series(field)
        mask = np.isfinite(y) & (y > 0)
        if not mask.any():
            continue
        if rec.algorithm not in colors:
            colors[rec.algorithm] = palette[len(colors) % len(palette)]
        label = rec.algorithm if rec.master_seed == min(
            r.master_seed for r in records if r.algorithm == rec.algorithm) else None
        ax.semilogy(x[mask], y[mask], color=colors[rec.algorithm], alpha=0.8,
                    label=label)
    ax.set_xlabel("communication rounds")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    if colors:
        ax.legend()


def render_report(records, out_dir=".", stem="report"):
    """Write <stem>_gap.png, <stem>_consensus.png and <stem>_rates.csv.

    Returns the dict of written paths. Records without positive data for a
    panel are skipped there; rate rows show empty cells when a fit is not
    possible (short or flat-to-zero series).
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _semilogy_panel(ax, records, "gap", "objective gap")
    fig.tight_layout()
    paths["gap"] = os.path.join(out_dir, stem + "_gap.png")
    fig.savefig(paths["gap"], dpi=130)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _semilogy_panel(ax, records, "consensus", "consensus error")
    fig.tight_layout()
    paths["consensus"] = os.path.join(out_dir, stem + "_consensus.png")
    fig.savefig(paths["consensus"], dpi=130)
    plt.close(fig)

    paths["rates"] = os.path.join(out_dir, stem + "_rates.csv")
    with open(paths["rates"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "seed", "status", "rate", "r_squared"])
        for rec in records:
            gaps = rec.series("gap")
            gaps = gaps[np.isfinite(gaps)]
            try:
                rate, r2 = fit_geometric_rate(gaps)
                w.writerow([rec.algorithm, rec.master_seed, rec.status,
                            repr(rate), repr(r2)])
            except ValidationError:
                w.writerow([rec.algorithm, rec.master_seed, rec.status, "", ""])
    return paths
