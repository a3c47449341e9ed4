"""Figures for benchmark reports.

Uses the non-interactive Agg backend; figures are only ever written to disk.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import REFERENCE_MS, BenchResult  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def plot_bench(results: Sequence[BenchResult], path: Union[str, Path], reference: bool = True) -> Path:
    """Bar chart of time per 1,000 conversions (log scale), measured vs reference timings."""
    path = Path(path)
    order = sorted(results, key=lambda r: r.per_op)
    labels = [r.backend_id for r in order]
    measured = [r.per_op for r in order]  # us per op == ms per 1,000 ops
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        xs = range(len(labels))
        width = 0.38 if reference else 0.6
        ax.bar([x - width / 2 if reference else x for x in xs], measured, width, label="measured", color="#3b6ea8")
        if reference:
            ref = [REFERENCE_MS.get(b, float("nan")) for b in labels]
            ax.bar([x + width / 2 for x in xs], ref, width, label="reference", color="#c9c9c9")
        ax.set_yscale("log")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, rotation=20)
        ax.set_ylabel("ms per 1,000 conversions")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path
