"""Line-oriented text formats for graphs, coverings, and towers.

One file holds any number of declarations; names resolve within the file:

    kgraph <name> rank=<k>
    vertex <vid>
    edge <color> <eid> src=<vid> rng=<vid>
    square <e> <f> -> <f'> <e'>          # means e*f = f'*e', color e < color f

    covering <name> base=<graph> total=<graph> m=<int>
    pv <total-vid> -> <base-vid>
    pe <total-eid> -> <base-eid>
    perm <total-eid> : <img_1> ... <img_m>   # omitted perms are identities

    tower <name>
    level <covering-name>
    level components base=<g1,g2,...> total=<h1,...>
    block <i> <j> m=<int> cover=<covering-name>

Tokens are whitespace separated; ``#`` starts a comment.  Lines beginning
``#:`` are pragmas: they survive parse/render round trips and carry family
metadata for files emitted by the zoo (``#: meta <json>``).

Parse errors carry line and column; rendering is canonical (sorted
vertices, edges and squares), so render(parse(x)) is a fixed point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .covering import (CoveringSystem, MatrixCoveringSystem, Tower,
                       make_covering_system, validate_matrix_system,
                       validate_tower)
from .errors import ParseError
from .kgraph import KGraph, Skeleton, validate_kgraph


@dataclass
class GraphDecl:
    name: str
    rank: int
    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)     # (color, eid, src, rng)
    squares: list = field(default_factory=list)   # (e, f, f2, e2)

    def build(self, **opts) -> KGraph:
        skel = Skeleton.build(self.rank, self.vertices,
                              [(e, c, s, r) for (c, e, s, r) in self.edges])
        squares = {(e, f): (f2, e2) for (e, f, f2, e2) in self.squares}
        return validate_kgraph(skel, squares, **opts)


@dataclass
class CoveringDecl:
    name: str
    base: str
    total: str
    m: int
    pv: list = field(default_factory=list)
    pe: list = field(default_factory=list)
    perms: dict = field(default_factory=dict)


@dataclass
class TowerDecl:
    name: str
    levels: list = field(default_factory=list)
    # level entries: ("scalar", covering_name)
    #             or ("matrix", base_names, total_names, [(i, j, m, cover)])


@dataclass
class Document:
    pragmas: list = field(default_factory=list)
    graphs: dict = field(default_factory=dict)
    coverings: dict = field(default_factory=dict)
    towers: dict = field(default_factory=dict)
    order: list = field(default_factory=list)   # (kind, name) in file order

    def meta(self) -> dict:
        for p in self.pragmas:
            if p and p[0] == "meta":
                return json.loads(" ".join(p[1:]))
        return {}


def _tokens(line):
    if "#" in line:
        line = line.split("#", 1)[0]
    return line.split()


def parse(text: str) -> Document:
    doc = Document()
    current = None        # active declaration
    current_level = None  # active matrix level of a tower
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#:"):
            doc.pragmas.append(stripped[2:].split())
            continue
        toks = _tokens(raw)
        if not toks:
            continue
        head = toks[0]
        try:
            if head == "kgraph":
                name = toks[1]
                rank = _kv(toks[2:], "rank", ln, int)
                _fresh(doc, name, ln)
                current = GraphDecl(name=name, rank=rank)
                current_level = None
                doc.graphs[name] = current
                doc.order.append(("kgraph", name))
            elif head == "covering":
                name = toks[1]
                current = CoveringDecl(
                    name=name, base=_kv(toks[2:], "base", ln),
                    total=_kv(toks[2:], "total", ln),
                    m=_kv(toks[2:], "m", ln, int))
                _fresh(doc, name, ln)
                current_level = None
                doc.coverings[name] = current
                doc.order.append(("covering", name))
            elif head == "tower":
                name = toks[1]
                _fresh(doc, name, ln)
                current = TowerDecl(name=name)
                current_level = None
                doc.towers[name] = current
                doc.order.append(("tower", name))
            elif head == "vertex":
                _want(current, GraphDecl, head, ln)
                current.vertices.append(toks[1])
            elif head == "edge":
                _want(current, GraphDecl, head, ln)
                color = int(toks[1])
                eid = toks[2]
                src = _kv(toks[3:], "src", ln)
                rng = _kv(toks[3:], "rng", ln)
                current.edges.append((color, eid, src, rng))
            elif head == "square":
                _want(current, GraphDecl, head, ln)
                if len(toks) != 6 or toks[3] != "->":
                    raise ParseError("square needs: square <e> <f> -> "
                                     "<f'> <e'>", ln)
                current.squares.append((toks[1], toks[2], toks[4], toks[5]))
            elif head == "pv":
                _want(current, CoveringDecl, head, ln)
                if len(toks) != 4 or toks[2] != "->":
                    raise ParseError("pv needs: pv <total> -> <base>", ln)
                current.pv.append((toks[1], toks[3]))
            elif head == "pe":
                _want(current, CoveringDecl, head, ln)
                if len(toks) != 4 or toks[2] != "->":
                    raise ParseError("pe needs: pe <total> -> <base>", ln)
                current.pe.append((toks[1], toks[3]))
            elif head == "perm":
                _want(current, CoveringDecl, head, ln)
                if len(toks) < 4 or toks[2] != ":":
                    raise ParseError("perm needs: perm <edge> : <images>", ln)
                current.perms[toks[1]] = tuple(int(x) for x in toks[3:])
            elif head == "level":
                _want(current, TowerDecl, head, ln)
                if len(toks) >= 2 and toks[1] == "components":
                    bases = _kv(toks[2:], "base", ln).split(",")
                    totals = _kv(toks[2:], "total", ln).split(",")
                    current_level = ("matrix", bases, totals, [])
                    current.levels.append(current_level)
                elif len(toks) == 2:
                    current.levels.append(("scalar", toks[1]))
                    current_level = None
                else:
                    raise ParseError("level needs a covering name or "
                                     "'components'", ln)
            elif head == "block":
                if current_level is None or current_level[0] != "matrix":
                    raise ParseError("block outside a components level", ln)
                i, j = int(toks[1]), int(toks[2])
                m = _kv(toks[3:], "m", ln, int)
                cov = _kv(toks[3:], "cover", ln)
                current_level[3].append((i, j, m, cov))
            else:
                raise ParseError(f"unknown directive {head!r}", ln)
        except ParseError:
            raise
        except (IndexError, ValueError) as exc:
            raise ParseError(f"malformed {head!r} line ({exc})", ln) from exc
    _check_references(doc)
    return doc


def _fresh(doc, name, ln):
    if name in doc.graphs or name in doc.coverings or name in doc.towers:
        raise ParseError(f"duplicate declaration name {name!r}", ln)


def _want(current, cls, head, ln):
    if not isinstance(current, cls):
        raise ParseError(f"{head!r} outside a {cls.__name__[:-4].lower()} "
                         "declaration", ln)


def _kv(toks, key, ln, cast=str):
    for t in toks:
        if t.startswith(key + "="):
            try:
                return cast(t[len(key) + 1:])
            except ValueError as exc:
                raise ParseError(f"bad value for {key}: {exc}", ln) from exc
    raise ParseError(f"missing {key}=...", ln)


def _check_references(doc: Document):
    for cov in doc.coverings.values():
        for g in (cov.base, cov.total):
            if g not in doc.graphs:
                raise ParseError(
                    f"covering {cov.name!r} references unknown graph {g!r}", 0)
    for tw in doc.towers.values():
        for lev in tw.levels:
            if lev[0] == "scalar":
                if lev[1] not in doc.coverings:
                    raise ParseError(f"tower {tw.name!r} references unknown "
                                     f"covering {lev[1]!r}", 0)
            else:
                for g in lev[1] + lev[2]:
                    if g not in doc.graphs:
                        raise ParseError(
                            f"tower {tw.name!r} references unknown graph "
                            f"{g!r}", 0)
                for (_, _, _, cov) in lev[3]:
                    if cov not in doc.coverings:
                        raise ParseError(
                            f"tower {tw.name!r} references unknown covering "
                            f"{cov!r}", 0)


# ---------------------------------------------------------------------------
# Building validated objects from a document
# ---------------------------------------------------------------------------

class Builder:
    """Resolve a parsed document into validated objects, with caching."""

    def __init__(self, doc: Document, require_no_sources=False):
        self.doc = doc
        self.opts = {"require_no_sources": require_no_sources}
        self._graphs: dict = {}
        self._systems: dict = {}

    def graph(self, name: str) -> KGraph:
        if name not in self._graphs:
            self._graphs[name] = self.doc.graphs[name].build(**self.opts)
        return self._graphs[name]

    def covering_system(self, name: str) -> CoveringSystem:
        if name not in self._systems:
            decl = self.doc.coverings[name]
            self._systems[name] = make_covering_system(
                self.graph(decl.base), self.graph(decl.total),
                dict(decl.pv), dict(decl.pe), m=decl.m,
                edge_perms=decl.perms)
        return self._systems[name]

    def tower(self, name: str) -> Tower:
        decl = self.doc.towers[name]
        systems = []
        for lev in decl.levels:
            if lev[0] == "scalar":
                systems.append(self.covering_system(lev[1]))
            else:
                _, bases, totals, blocks = lev
                base_graphs = tuple(self.graph(g) for g in bases)
                total_graphs = tuple(self.graph(g) for g in totals)
                mult = [[0] * len(bases) for _ in totals]
                block_map = {}
                for (i, j, m, cov) in blocks:
                    mult[i - 1][j - 1] = m
                    block_map[(i, j)] = self.covering_system(cov)
                systems.append(validate_matrix_system(
                    base_graphs, total_graphs, mult, block_map))
        return validate_tower(systems, meta=self.doc.meta())


# ---------------------------------------------------------------------------
# Rendering (canonical form)
# ---------------------------------------------------------------------------

def render(doc: Document) -> str:
    out = []
    for p in doc.pragmas:
        out.append("#: " + " ".join(p))
    for kind, name in doc.order:
        if out:
            out.append("")
        if kind == "kgraph":
            d = doc.graphs[name]
            out.append(f"kgraph {d.name} rank={d.rank}")
            for v in sorted(d.vertices):
                out.append(f"vertex {v}")
            for (c, e, s, r) in sorted(d.edges):
                out.append(f"edge {c} {e} src={s} rng={r}")
            for (e, f, f2, e2) in sorted(d.squares):
                out.append(f"square {e} {f} -> {f2} {e2}")
        elif kind == "covering":
            d = doc.coverings[name]
            out.append(f"covering {d.name} base={d.base} total={d.total} "
                       f"m={d.m}")
            for (a, b) in sorted(d.pv):
                out.append(f"pv {a} -> {b}")
            for (a, b) in sorted(d.pe):
                out.append(f"pe {a} -> {b}")
            for e in sorted(d.perms):
                imgs = " ".join(str(x) for x in d.perms[e])
                out.append(f"perm {e} : {imgs}")
        else:
            d = doc.towers[name]
            out.append(f"tower {d.name}")
            for lev in d.levels:
                if lev[0] == "scalar":
                    out.append(f"level {lev[1]}")
                else:
                    _, bases, totals, blocks = lev
                    out.append(f"level components base={','.join(bases)} "
                               f"total={','.join(totals)}")
                    for (i, j, m, cov) in sorted(blocks):
                        out.append(f"block {i} {j} m={m} cover={cov}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Declaring existing objects (the zoo's output path)
# ---------------------------------------------------------------------------

def graph_decl(name: str, graph: KGraph) -> GraphDecl:
    return GraphDecl(
        name=name, rank=graph.rank, vertices=list(graph.vertices),
        edges=[(e.color, e.eid, e.src, e.rng) for e in graph.skeleton.edges],
        squares=[(e, f, f2, e2)
                 for (e, f), (f2, e2) in sorted(graph.squares.items())])


def covering_decl(name: str, cs: CoveringSystem, base_name: str,
                  total_name: str) -> CoveringDecl:
    perms = {}
    for eid, p in sorted(cs.cocycle.edge_perms.items()):
        if any(p[i] != i + 1 for i in range(len(p))):
            perms[eid] = p
    return CoveringDecl(name=name, base=base_name, total=total_name, m=cs.m,
                        pv=sorted(cs.covering.vertex_map.items()),
                        pe=sorted(cs.covering.edge_map.items()),
                        perms=perms)


def document_for_graph(name: str, graph: KGraph, meta: dict | None = None) -> Document:
    doc = Document()
    if meta:
        doc.pragmas.append(["meta", json.dumps(meta, sort_keys=True)])
    doc.graphs[name] = graph_decl(name, graph)
    doc.order.append(("kgraph", name))
    return doc


def document_for_covering(name: str, cs: CoveringSystem,
                          meta: dict | None = None) -> Document:
    doc = Document()
    if meta:
        doc.pragmas.append(["meta", json.dumps(meta, sort_keys=True)])
    doc.graphs[f"{name}-base"] = graph_decl(f"{name}-base", cs.base)
    doc.graphs[f"{name}-total"] = graph_decl(f"{name}-total", cs.total)
    doc.coverings[name] = covering_decl(name, cs, f"{name}-base",
                                        f"{name}-total")
    doc.order = [("kgraph", f"{name}-base"), ("kgraph", f"{name}-total"),
                 ("covering", name)]
    return doc


def document_for_tower(name: str, tower: Tower) -> Document:
    doc = Document()
    meta = {k: v for k, v in tower.meta.items()
            if isinstance(v, (str, int, float, bool, list, dict))}
    if meta:
        doc.pragmas.append(["meta", json.dumps(meta, sort_keys=True)])
    graph_names: dict = {}

    def declare_graph(g: KGraph, label: str) -> str:
        if id(g) not in graph_names:
            graph_names[id(g)] = label
            doc.graphs[label] = graph_decl(label, g)
            doc.order.append(("kgraph", label))
        return graph_names[id(g)]

    tw = TowerDecl(name=name)
    for n, cs in enumerate(tower.systems, start=1):
        if isinstance(cs, MatrixCoveringSystem):
            bases = [declare_graph(g, f"{name}-L{n}c{j + 1}")
                     for j, g in enumerate(cs.base_components)]
            totals = [declare_graph(g, f"{name}-L{n + 1}c{i + 1}")
                      for i, g in enumerate(cs.total_components)]
            blocks = []
            for (i, j), block in sorted(cs.blocks.items()):
                cname = f"{name}-p{n}-{i}-{j}"
                doc.coverings[cname] = covering_decl(
                    cname, block, bases[j - 1], totals[i - 1])
                doc.order.append(("covering", cname))
                blocks.append((i, j, block.m, cname))
            tw.levels.append(("matrix", bases, totals, blocks))
        else:
            bname = declare_graph(cs.base, f"{name}-L{n}")
            tname = declare_graph(cs.total, f"{name}-L{n + 1}")
            cname = f"{name}-p{n}"
            doc.coverings[cname] = covering_decl(cname, cs, bname, tname)
            doc.order.append(("covering", cname))
            tw.levels.append(("scalar", cname))
    doc.towers[name] = tw
    doc.order.append(("tower", name))
    return doc
