"""Figures written next to the delimited outputs of the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .classifier import SweepRow  # noqa: E402
from .detector import SpamVerdict  # noqa: E402
from .features import DegreeDistribution, powerlaw_fit  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "legend.frameon": False,
    "svg.hashsalt": "linkspam",
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_degree_distributions(
    dists: Mapping[str, DegreeDistribution], path: str | Path, title: str = "Degree distribution"
) -> Path:
    """Log-log P(K) per named group with its least-squares power-law line."""
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name, dist in dists.items():
            ks = np.array([k for k, p in dist.histogram.items() if k >= 1 and p > 0], dtype=float)
            if ks.size == 0:
                continue
            ps = np.array([dist.histogram[int(k)] for k in ks])
            (pts,) = ax.loglog(ks, ps, "o", ms=4, label=name)
            fit = powerlaw_fit(dist)
            if not fit.degenerate:
                # least-squares intercept of the log-log fit
                c = np.mean(np.log(ps) + fit.exponent * np.log(ks))
                grid = np.geomspace(ks.min(), ks.max(), 50)
                ax.loglog(grid, np.exp(c) * grid ** -fit.exponent, "-", color=pts.get_color(), lw=1,
                          label=f"{name} fit: gamma={fit.exponent:.2f}, rms={fit.deviation:.3f}")
        ax.set_xlabel("degree K")
        ax.set_ylabel("P(K)")
        ax.set_title(title)
        ax.legend(fontsize=8)
        return _save(fig, path)


def plot_intersections(verdicts: Mapping[str, SpamVerdict], threshold: int, path: str | Path) -> Path:
    path = Path(path)
    sizes = np.array([v.intersection_size for v in verdicts.values()], dtype=int)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if sizes.size:
            bins = np.arange(sizes.max() + 2) - 0.5
            ax.hist(sizes, bins=bins, log=True, color="0.4")
            # floor below one so single-domain bars stay visible on the log axis
            ax.set_ylim(bottom=0.5)
        ax.axvline(threshold - 0.5, color="C3", ls="--", label=f"threshold = {threshold}")
        ax.set_xlabel("|IN ∩ OUT| (domains)")
        ax.set_ylabel("domains")
        ax.legend()
        return _save(fig, path)


def plot_sweep(rows: Sequence[SweepRow], path: str | Path) -> Path:
    """TPR, FPR and F1 against cost ratio."""
    path = Path(path)
    ratios = [r.cost_ratio for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name in ("tpr", "fpr", "f1"):
            vals = [np.nan if getattr(r.metrics, name) is None else getattr(r.metrics, name) for r in rows]
            ax.plot(ratios, vals, "o-", label=name.upper())
        ax.set_xlabel("cost ratio")
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
        return _save(fig, path)
