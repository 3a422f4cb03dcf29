"""Matplotlib rendering for the report path.

Figures are saved as SVG next to the delimited outputs. Rendering is
byte-deterministic: the Agg backend, a fixed hash salt for element ids, and
no creation date in the metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams.update({
    "svg.hashsalt": "contact-complexity",
    "figure.figsize": (6.0, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
})

_REFERENCE_STYLE = dict(color="red", linestyle="--", linewidth=1.0)


def save_figure(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def attribute_histograms_figure(histograms):
    """One panel per raw attribute; histograms maps name -> (edges, counts)."""
    names = list(histograms)
    fig, axes = plt.subplots(1, len(names), figsize=(3.2 * len(names), 3.0))
    if len(names) == 1:
        axes = [axes]
    for ax, name in zip(axes, names):
        edges, counts = histograms[name]
        ax.stairs(counts, edges, fill=True, alpha=0.7)
        ax.set_xlabel(name)
        ax.set_ylabel("contacts")
    fig.tight_layout()
    return fig


def weighted_sum_figure(sum_histograms, selected_weight: float):
    """Distribution of the weighted attribute sum at each candidate weight."""
    weights = list(sum_histograms)
    fig, axes = plt.subplots(1, len(weights), figsize=(3.0 * len(weights), 3.0))
    if len(weights) == 1:
        axes = [axes]
    for ax, w in zip(axes, weights):
        edges, counts = sum_histograms[w]
        ax.stairs(counts, edges, fill=True, alpha=0.7)
        tag = " (selected)" if w == selected_weight else ""
        ax.set_xlabel(f"weighted sum, w={w:g}{tag}")
    fig.tight_layout()
    return fig


def binned_curve_figure(curve):
    """Per-bin label probabilities against bin centers; empty bins are gaps."""
    fig, ax = plt.subplots()
    centers = curve.centers()
    for label, color in (("low", "tab:blue"), ("normal", "tab:red"), ("high", "tab:green")):
        ax.plot(centers, curve.probabilities[label], marker="o", markersize=3,
                color=color, label=label)
    ax.set_xlabel("complexity score bin")
    ax.set_ylabel("label probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    return fig


def dual_curve_figure(curve, title: str = ""):
    """Fitted dual-transformation curve with the identity reference line."""
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    ax.plot([0, 1], [0, 1], color="tab:blue", linestyle="--", linewidth=1.0,
            label="identical distributions")
    ax.plot(curve.x, curve.fx, color="tab:green", linewidth=1.5,
            label=f"auc={curve.auc:.3f}")
    ax.set_xlabel("benchmark score")
    ax.set_ylabel("matched target score")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return fig


def group_report_figure(rows):
    """Horizontal bars of per-group auc with the 0.5 reference dashed in red."""
    fig, ax = plt.subplots(figsize=(6.0, 0.5 * len(rows) + 1.5))
    names = [r.name for r in rows]
    aucs = [r.auc for r in rows]
    ax.barh(np.arange(len(rows)), aucs, color="tab:green", alpha=0.8)
    ax.axvline(0.5, **_REFERENCE_STYLE)
    ax.set_yticks(np.arange(len(rows)), names)
    ax.invert_yaxis()
    ax.set_xlabel("complexity auc (dashed: 0.5 reference)")
    fig.tight_layout()
    return fig
