"""DOT output for skeletons.

Colors 1..k are drawn with distinct edge styles: solid, dashed, dotted,
then numbered labels.  Parallel edges (same endpoints and color) can be
collapsed into a single arrow with a multiplicity label, mirroring the
usual drawing convention for multigraphs.
"""

from __future__ import annotations

from .kgraph import KGraph

_STYLES = ("solid", "dashed", "dotted")


def _style(color: int) -> str:
    if color <= len(_STYLES):
        return f"style={_STYLES[color - 1]}"
    return f'style=solid, label="c{color}"'


def export_dot(graph: KGraph, name: str = "skeleton",
               collapse_parallel: bool = False) -> str:
    lines = [f"digraph \"{name}\" {{", "  node [shape=circle];",
             "  layout=circo;"]
    for v in graph.vertices:
        lines.append(f'  "{v}";')
    if collapse_parallel:
        groups: dict = {}
        for e in graph.skeleton.edges:
            groups.setdefault((e.color, e.src, e.rng), []).append(e.eid)
        for (color, src, rng), eids in sorted(groups.items()):
            style = _style(color)
            mult = f', label="x{len(eids)}"' if len(eids) > 1 else ""
            lines.append(f'  "{src}" -> "{rng}" [{style}{mult}];')
    else:
        for e in graph.skeleton.edges:
            lines.append(f'  "{e.src}" -> "{e.rng}" '
                         f'[{_style(e.color)}, tooltip="{e.eid}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
