"""Matplotlib rendering of projection scatter plots and the sweep overview grid."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

DPI = 110

# tab20 gives 20 distinguishable categorical colors; category order is the
# deterministic sorted order of the values present, cycling on overflow
_CAT_CMAP = matplotlib.colormaps["tab20"]

_RATING_COLORS = {
    1: "#c62828",
    2: "#ef6c00",
    3: "#f9a825",
    4: "#9e9d24",
    5: "#2e7d32",
}


def _category_colors(values: List[str]) -> Dict[str, tuple]:
    cats = sorted(set(values))
    return {cat: _CAT_CMAP(i % 20) for i, cat in enumerate(cats)}


def _draw_scatter(ax, points: List[dict], color_field: str, legend: bool, point_size: float) -> None:
    colors = _category_colors([str(p[color_field]) for p in points])
    for cat in sorted(colors):
        xs = [p["x"] for p in points if str(p[color_field]) == cat]
        ys = [p["y"] for p in points if str(p[color_field]) == cat]
        ax.scatter(xs, ys, s=point_size, color=colors[cat], label=cat, alpha=0.8, linewidths=0)
    ax.set_xticks([])
    ax.set_yticks([])
    if legend and len(colors) <= 24:
        ax.legend(loc="upper right", fontsize=6, markerscale=1.2, frameon=False)


def render_points_figure(
    points: List[dict],
    path: Path,
    title: str,
    color_field: str = "lesson",
    split_by_group: bool = False,
) -> None:
    """Scatter of exported plot points, colored by a categorical field.

    split_by_group renders one panel per outcome group (the groups were
    projected in independent coordinate frames, so overlaying them would be
    misleading).
    """
    if split_by_group:
        groups = sorted({p["group"] for p in points})
        fig, axes = plt.subplots(1, max(len(groups), 1), figsize=(5.2 * max(len(groups), 1), 5.0))
        if len(groups) <= 1:
            axes = [axes]
        for ax, grp in zip(axes, groups):
            _draw_scatter(ax, [p for p in points if p["group"] == grp], color_field, True, 14)
            ax.set_title(f"{title} [{grp}]", fontsize=9)
    else:
        fig, ax = plt.subplots(figsize=(5.2, 5.0))
        _draw_scatter(ax, points, color_field, True, 14)
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_gallery_figure(
    cells: List[dict],
    n_rows: int,
    n_cols: int,
    path: Path,
    color_field: str = "lesson",
) -> None:
    """Thumbnail grid of every sweep cell, border-colored by its rating.

    cells are row-major dicts: {label, points or None, rating, error}.
    Errored cells render their message instead of a plot.
    """
    fig, axes = plt.subplots(
        n_rows, n_cols, figsize=(1.9 * n_cols, 2.1 * n_rows), squeeze=False
    )
    for idx, cell in enumerate(cells):
        ax = axes[idx // n_cols][idx % n_cols]
        if cell.get("error"):
            ax.text(0.5, 0.5, "error", ha="center", va="center", fontsize=7, color="#c62828")
            ax.set_xticks([])
            ax.set_yticks([])
        elif cell.get("points"):
            # low alpha keeps overplotted thumbnails readable
            colors = _category_colors([str(p[color_field]) for p in cell["points"]])
            xs = [p["x"] for p in cell["points"]]
            ys = [p["y"] for p in cell["points"]]
            cs = [colors[str(p[color_field])] for p in cell["points"]]
            ax.scatter(xs, ys, s=3, c=cs, alpha=0.55, linewidths=0)
            ax.set_xticks([])
            ax.set_yticks([])
        else:
            ax.axis("off")
        ax.set_title(cell["label"], fontsize=7)
        border = _RATING_COLORS.get(cell.get("rating"), "#b0bec5")
        for spine in ax.spines.values():
            spine.set_color(border)
            spine.set_linewidth(2.0 if cell.get("rating") else 0.8)
    for idx in range(len(cells), n_rows * n_cols):
        axes[idx // n_cols][idx % n_cols].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_kl_trace(trace: List[float], path: Path, title: str = "KL divergence") -> None:
    """Convergence curve for a single projection run."""
    fig, ax = plt.subplots(figsize=(4.6, 3.0))
    ax.plot([10 * (i + 1) for i in range(len(trace))], trace, lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("KL(P || Q)")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
