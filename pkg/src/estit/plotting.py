"""Figures for reports: BT model trees and soundness sweep summaries.

Rendering uses the non-interactive Agg backend and always writes to a file.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .btmodel import BTModel, Situation, format_value  # noqa: E402

_STYLE = {"font.size": 9, "axes.spines.top": False, "axes.spines.right": False, "savefig.dpi": 120}


def tree_layout(model: BTModel) -> Dict[str, Tuple[float, float]]:
    """Leaves spread evenly on the x axis, inner moments centred over their children, depth down."""
    pos: Dict[str, Tuple[float, float]] = {}
    next_x = [0.0]

    def place(mo: str, d: int) -> float:
        kids = model.children[mo]
        if not kids:
            x = next_x[0]
            next_x[0] += 1.0
        else:
            xs = [place(c, d + 1) for c in kids]
            x = sum(xs) / len(xs)
        pos[mo] = (x, -float(d))
        return x

    for r in model.roots:
        place(r, 0)
    return pos


def plot_tree(model: BTModel, path, title: str = "", highlight: Iterable[Situation] = ()) -> Path:
    """Draw the moment tree, leaf values and choice cells.

    Situations in ``highlight`` get a red ring on their moment and their history
    label in red (used to mark falsifying situations).
    """
    pos = tree_layout(model)
    marked = set(highlight)
    bad_moments = {s.moment for s in marked}
    bad_histories = {s.history for s in marked}
    leaf_of = {h: chain[-1] for h, chain in model.history_chain.items()}
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.8 * len(model.histories) + 2), 1.4 * _height(pos) + 1.5))
        for mo, par in model.parent.items():
            if par is not None:
                (x0, y0), (x1, y1) = pos[par], pos[mo]
                ax.plot([x0, x1], [y0, y1], color="0.55", lw=1, zorder=1)
        for mo, (x, y) in pos.items():
            ring = "tab:red" if mo in bad_moments else "black"
            ax.scatter([x], [y], s=60, facecolor="white", edgecolor=ring, zorder=3, lw=1.5)
            if model.children[mo]:
                ax.annotate(mo, (x, y), xytext=(6, 4), textcoords="offset points", fontsize=8)
            _draw_cells(ax, model, mo, pos)
        values = model.values("objective")
        for h in model.histories:
            x, y = pos[leaf_of[h]]
            color = "tab:red" if h in bad_histories else "0.2"
            ax.annotate(f"{h}\n{format_value(values[h])}", (x, y), xytext=(0, -22), textcoords="offset points",
                        ha="center", fontsize=8, color=color)
        ax.set_axis_off()
        if title:
            ax.set_title(title)
        fig.tight_layout()
        out = Path(path)
        fig.savefig(out)
        plt.close(fig)
    return out


def _height(pos) -> float:
    ys = [y for _, y in pos.values()]
    return max(ys) - min(ys) + 1


def _draw_cells(ax, model: BTModel, mo: str, pos) -> None:
    """Label each nontrivial choice cell under its moment, one line per agent."""
    x, y = pos[mo]
    lines = []
    for a in model.agents:
        acts = model.actions(a, mo)
        if len(acts) > 1:
            lines.append(f"{a}: " + " ".join(act.name for act in acts))
    if lines:
        ax.annotate("\n".join(lines), (x, y), xytext=(-6, -6), textcoords="offset points",
                    ha="right", va="top", fontsize=7, color="tab:blue")


def plot_sweep(report, path, title: Optional[str] = None) -> Path:
    """Bar chart of instances tested and falsified per schema."""
    names = list(report.per_schema)
    tested = [report.per_schema[n][0] for n in names]
    falsified = [report.per_schema[n][1] for n in names]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(max(6.0, 0.32 * len(names) + 2), 3.6))
        xs = range(len(names))
        ax.bar(xs, tested, color="0.8", label="instances")
        ax.bar(xs, falsified, color="tab:red", label="falsified")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(names, rotation=70, ha="right", fontsize=7)
        ax.set_ylabel("count")
        ax.legend(frameon=False)
        ax.set_title(title or f"{report.mode} mode, {report.models_tested} models")
        fig.tight_layout()
        out = Path(path)
        fig.savefig(out)
        plt.close(fig)
    return out
