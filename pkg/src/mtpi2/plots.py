"""Matplotlib figures written alongside the delimited report outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .engine import DecisionTable, DiffEntry
from .simulate import Comparison, OCReport

ACTION_COLORS = {"E": "#2c7fb8", "S": "#41ab5d", "D": "#fe9929", "U": "#d7301f"}
_ACTION_LEVEL = {"E": 0, "S": 1, "D": 2, "U": 3}


def _draw_grid(ax, table: DecisionTable, title: str) -> None:
    max_n = table.params.max_n
    grid = np.full((max_n + 1, max_n), np.nan)
    for (x, n), cell in table.cells.items():
        grid[x, n - 1] = _ACTION_LEVEL[cell.decision]
    cmap = matplotlib.colors.ListedColormap([ACTION_COLORS[a] for a in "ESDU"])
    ax.imshow(grid, cmap=cmap, vmin=-0.5, vmax=3.5, aspect="auto", origin="upper")
    for (x, n), cell in table.cells.items():
        ax.text(n - 1, x, cell.decision, ha="center", va="center", fontsize=7, color="black")
    ax.set_xticks(range(max_n), [str(n) for n in range(1, max_n + 1)], fontsize=7)
    ax.set_yticks(range(max_n + 1), [str(x) for x in range(max_n + 1)], fontsize=7)
    ax.set_xlabel("patients treated (n)")
    ax.set_ylabel("DLTs observed (x)")
    ax.set_title(title)


def decision_table_figure(
    tables: list[DecisionTable], path: str, dpi: int = 150
) -> None:
    """Color-coded decision grid, one panel per design variant."""
    fig, axes = plt.subplots(
        1, len(tables), figsize=(1.5 + 0.45 * tables[0].params.max_n * len(tables), 5.0)
    )
    if len(tables) == 1:
        axes = [axes]
    for ax, table in zip(axes, tables):
        _draw_grid(ax, table, f"{table.params.variant} (p_T={table.params.p_t})")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def diff_figure(entries: list[DiffEntry], path: str, dpi: int = 150) -> None:
    """Counts per change class plus boxplots of the empirical gap x/n - p_T."""
    fig, (ax_counts, ax_gaps) = plt.subplots(1, 2, figsize=(9, 4))
    classes = sorted({f"{e.from_decision}->{e.to_decision}" for e in entries})
    counts = [sum(1 for e in entries if f"{e.from_decision}->{e.to_decision}" == c) for c in classes]
    colors = [ACTION_COLORS[c.split("->")[1]] for c in classes]
    ax_counts.bar(classes, counts, color=colors)
    ax_counts.set_ylabel("changed cells")
    ax_counts.set_title("decision changes by class")

    gap_sets = [
        [e.empirical_gap for e in entries if f"{e.from_decision}->{e.to_decision}" == c]
        for c in classes
    ]
    if gap_sets:
        ax_gaps.boxplot(gap_sets, tick_labels=classes)
    ax_gaps.axhline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax_gaps.set_ylabel("x/n - p_T")
    ax_gaps.set_title("empirical gap of changed cells")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def selection_figure(reports: list[OCReport], path: str, dpi: int = 150) -> None:
    """Per-dose selection frequency bars, one panel per scenario."""
    scenarios = sorted({r.scenario for r in reports})
    designs = sorted({r.design for r in reports})
    ncols = min(5, len(scenarios))
    nrows = (len(scenarios) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.6 * nrows), squeeze=False)
    by_key = {(r.scenario, r.design): r for r in reports}
    width = 0.8 / len(designs)
    for i, label in enumerate(scenarios):
        ax = axes[i // ncols][i % ncols]
        doses = np.arange(1, len(by_key[(label, designs[0])].selection_freq) + 1)
        for j, design in enumerate(designs):
            r = by_key[(label, design)]
            ax.bar(doses + (j - (len(designs) - 1) / 2) * width,
                   r.selection_freq, width=width, label=design)
            if r.true_mtd is not None:
                ax.axvline(r.true_mtd, color="gray", linestyle=":", linewidth=0.8)
        ax.set_title(label, fontsize=9)
        ax.set_ylim(0, 1)
        ax.set_xticks(doses)
    for k in range(len(scenarios), nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    axes[0][0].legend(fontsize=7)
    fig.supxlabel("dose")
    fig.supylabel("selection frequency")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def comparison_figure(comparison: Comparison, path: str, dpi: int = 150) -> None:
    """Reliability and safety delta boxplots grouped by target p_T."""
    fig, (ax_rel, ax_saf) = plt.subplots(1, 2, figsize=(9, 4))
    p_ts = sorted({row.p_t for row in comparison.rows})
    for ax, metric, title in (
        (ax_rel, "reliability_delta", "reliability"),
        (ax_saf, "safety_delta", "safety"),
    ):
        groups = [
            [getattr(row, metric) for row in comparison.rows if row.p_t == pt] for pt in p_ts
        ]
        ax.boxplot(groups, tick_labels=[f"p_T={pt:g}" for pt in p_ts])
        ax.axhline(0.0, color="gray", linewidth=0.8, linestyle="--")
        a = comparison.rows[0].design_a if comparison.rows else "A"
        b = comparison.rows[0].design_b if comparison.rows else "B"
        ax.set_title(f"{title}: {a} - {b}")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
