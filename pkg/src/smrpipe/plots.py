"""SVG plot emission for reports and ablation sweeps.

All output is static SVG written with deterministic metadata (fixed hash
salt, no creation date), so repeated runs produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "smrpipe"

from .evaluation import PrCurve

_SAVE_OPTS = {"format": "svg", "metadata": {"Date": None}}


def save_pr_curves(curves: dict[str, PrCurve], path: str | Path, title: str = "") -> None:
    """Overlay one or more precision-recall curves."""
    fig, ax = plt.subplots(figsize=(5, 4))
    for name, curve in curves.items():
        ax.plot(
            [p.recall for p in curve.points],
            [p.precision for p in curve.points],
            label=name,
            linewidth=1.5,
        )
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def save_auc_bars(
    rows: list[tuple[str, float, float]], path: str | Path, title: str = ""
) -> None:
    """Stacked bars: baseline PR AUC with the filtered delta on top.

    ``rows`` holds (label, baseline_auc, filtered_auc); positive deltas are
    green, degradations red.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(rows))
    for x, (label, base, filt) in zip(xs, rows):
        delta = filt - base
        ax.bar(x, base, color="#4878a8", width=0.6)
        ax.bar(
            x,
            abs(delta),
            bottom=min(base, filt),
            color="#2ca02c" if delta >= 0 else "#d62728",
            width=0.6,
        )
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r[0] for r in rows], fontsize=8)
    ax.set_ylabel("PR AUC")
    ax.set_ylim(0, 1.05)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
