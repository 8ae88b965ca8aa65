"""Matplotlib renderings of skeletons, written next to the reports.

Small graphs get a circular layout with one curved arrow per edge; larger
ones collapse parallel edges with multiplicity labels.  Tower graphs are
laid out level by level.  Everything renders through the Agg backend, so
no display is needed.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from .construct import TowerGraph
from .kgraph import KGraph

_COLORS = ("tab:blue", "tab:red", "tab:green", "tab:purple", "tab:orange")
_STYLES = ("-", "--", ":", "-.")


def _edge_look(color: int):
    return (_COLORS[(color - 1) % len(_COLORS)],
            _STYLES[(color - 1) % len(_STYLES)])


def _draw(ax, pos, graph: KGraph, collapse: bool):
    for v, (x, y) in pos.items():
        ax.plot([x], [y], "ko", markersize=4, zorder=3)
        if len(pos) <= 40:
            ax.annotate(v, (x, y), textcoords="offset points",
                        xytext=(4, 4), fontsize=7)
    groups: dict = {}
    for e in graph.skeleton.edges:
        groups.setdefault((e.color, e.src, e.rng), []).append(e.eid)
    for (color, src, rng), eids in sorted(groups.items()):
        col, style = _edge_look(color)
        n = 1 if collapse else len(eids)
        for t in range(n):
            rad = 0.12 + 0.12 * t
            if src == rng:
                x, y = pos[src]
                loop = 0.18 + 0.1 * t
                circ = plt.Circle((x, y + loop / 2), loop / 2, fill=False,
                                  color=col, linestyle=style, linewidth=1)
                ax.add_patch(circ)
            else:
                patch = FancyArrowPatch(
                    pos[src], pos[rng], connectionstyle=f"arc3,rad={rad}",
                    arrowstyle="-|>", mutation_scale=8, color=col,
                    linestyle=style, linewidth=1, zorder=2)
                ax.add_patch(patch)
        if collapse and len(eids) > 1:
            mx = (pos[src][0] + pos[rng][0]) / 2
            my = (pos[src][1] + pos[rng][1]) / 2
            ax.annotate(f"x{len(eids)}", (mx, my), fontsize=7, color=col)
    ax.set_aspect("equal")
    ax.axis("off")


def save_skeleton_figure(graph: KGraph, path: str, title: str = "") -> str:
    vs = list(graph.vertices)
    n = len(vs)
    pos = {}
    for i, v in enumerate(vs):
        a = 2 * math.pi * i / max(1, n)
        pos[v] = (math.cos(a), math.sin(a))
    fig, ax = plt.subplots(figsize=(5, 5))
    _draw(ax, pos, graph, collapse=len(graph.skeleton.edges) > 200)
    if title:
        ax.set_title(title, fontsize=9)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def save_tower_figure(tower_graph: TowerGraph, path: str,
                      title: str = "") -> str:
    graph = tower_graph.graph
    by_level: dict = {}
    for v in graph.vertices:
        by_level.setdefault(tower_graph.level_of_vertex[v], []).append(v)
    pos = {}
    for lvl, vs in sorted(by_level.items()):
        for i, v in enumerate(sorted(vs)):
            x = i - (len(vs) - 1) / 2
            pos[v] = (x, -1.5 * lvl)
    fig, ax = plt.subplots(figsize=(6, 1.5 + 1.2 * len(by_level)))
    _draw(ax, pos, graph, collapse=len(graph.skeleton.edges) > 200)
    if title:
        ax.set_title(title, fontsize=9)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path
