"""Build the (k+1)-graph of a covering system, and truncated tower graphs.

Given (base, total, p, m, s) of rank k, the output graph contains disjoint
copies of base and total in the first k colors, plus m parallel edges of
the new color k+1 from each total vertex down to the base vertex it covers.
The mixed squares are forced by unique path lifting together with the
cocycle:

    e(r(b), l) * j(b)  =  i(p(b)) * e(s(b), s(b)^{-1} l)

for every total edge b and fiber index l.  The constructed data is pushed
through full (k+1)-graph validation, hexagon included; a failure there
indicates a construction bug and surfaces as InternalConstructionError.

Identifier scheme: "i:" prefixes the base copy, "j:" the total copy, and
the new edges are "e:<vertex>:<l>" (matrix systems insert the base
component index to keep ids unique).  Tower graphs use level prefixes
"<n>:" instead and keep every level's data in one graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from .covering import (MatrixCoveringSystem, Tower, perm_apply,
                       perm_inverse)
from .errors import ChainBreak, InternalConstructionError, KgError
from .kgraph import KGraph, Skeleton, validate_kgraph


@dataclass(frozen=True)
class CoverGraph:
    """The (k+1)-graph of one covering system, with its embeddings."""

    graph: KGraph
    base_vertex: dict       # base vertex id   -> new id
    base_edge: dict         # base edge id     -> new id
    total_vertex: dict      # total vertex id  -> new id
    total_edge: dict        # total edge id    -> new id
    connecting: dict        # (total vertex id, l) -> new edge id

    @property
    def rank(self):
        return self.graph.rank


def _cover_data(cs, base_name, total_name, conn_name):
    """Vertices, edges and squares of the cover construction, with caller
    supplied naming for the two copies and the connecting edges."""
    if isinstance(cs, MatrixCoveringSystem):
        bases = cs.base_components
        totals = cs.total_components
        block_list = [(i, j, cs.blocks[(i + 1, j + 1)])
                      for i in range(len(totals))
                      for j in range(len(bases))
                      if cs.multiplicities[i][j] != 0]
    else:
        bases = (cs.base,)
        totals = (cs.total,)
        block_list = [(0, 0, cs)]

    k = bases[0].rank
    vertices = []
    edges = []
    squares = {}
    base_vertex, base_edge = {}, {}
    total_vertex, total_edge = {}, {}
    connecting = {}

    for g in bases:
        for v in g.vertices:
            base_vertex[v] = base_name(v)
            vertices.append(base_vertex[v])
        for e in g.skeleton.edges:
            base_edge[e.eid] = base_name(e.eid)
            edges.append((base_edge[e.eid], e.color,
                          base_name(e.src), base_name(e.rng)))
        for (e1, f1), (f2, e2) in g.squares.items():
            squares[(base_name(e1), base_name(f1))] = \
                (base_name(f2), base_name(e2))
    for g in totals:
        for v in g.vertices:
            total_vertex[v] = total_name(v)
            vertices.append(total_vertex[v])
        for e in g.skeleton.edges:
            total_edge[e.eid] = total_name(e.eid)
            edges.append((total_edge[e.eid], e.color,
                          total_name(e.src), total_name(e.rng)))
        for (e1, f1), (f2, e2) in g.squares.items():
            squares[(total_name(e1), total_name(f1))] = \
                (total_name(f2), total_name(e2))

    multi_block = isinstance(cs, MatrixCoveringSystem)
    for i, j, block in block_list:
        m = block.m
        tag = (str(j + 1) if multi_block else None)
        for w in block.total.vertices:
            for l in range(1, m + 1):
                name = conn_name(w, l, tag)
                connecting[(w, l) if not multi_block else (w, j + 1, l)] = name
                edges.append((name, k + 1, total_vertex[w],
                              base_vertex[block.covering.vmap(w)]))
        # mixed squares from property (5):
        #   i(p(b)) * e(s(b), s(b)^{-1} l) = e(r(b), l) * j(b)
        for b in block.total.skeleton.edges:
            sperm_inv = perm_inverse(block.cocycle.of_edge(b.eid))
            pb = block.covering.emap(b.eid)
            for l in range(1, m + 1):
                l_src = perm_apply(sperm_inv, l)
                key_s = (b.src, l_src) if not multi_block else (b.src, j + 1, l_src)
                key_r = (b.rng, l) if not multi_block else (b.rng, j + 1, l)
                squares[(base_edge[pb], connecting[key_s])] = \
                    (connecting[key_r], total_edge[b.eid])
    return k, vertices, edges, squares, base_vertex, base_edge, \
        total_vertex, total_edge, connecting


def build_cover(cs) -> CoverGraph:
    """The (k+1)-graph of a covering system or matrix of covering systems."""
    multi = isinstance(cs, MatrixCoveringSystem)

    def base_name(x):
        return f"i:{x}"

    def total_name(x):
        return f"j:{x}"

    def conn_name(w, l, tag):
        return f"e:{w}:{l}" if tag is None else f"e:{w}:b{tag}:{l}"

    k, vertices, edges, squares, bv, be, tv, te, conn = \
        _cover_data(cs, base_name, total_name, conn_name)
    try:
        skel = Skeleton.build(k + 1, vertices, edges, trusted=True)
        graph = validate_kgraph(skel, squares)
    except KgError as exc:
        raise InternalConstructionError(
            f"constructed cover failed validation: {exc}",
            witness=exc.witness) from exc
    return CoverGraph(graph=graph, base_vertex=bv, base_edge=be,
                      total_vertex=tv, total_edge=te, connecting=conn)


@dataclass(frozen=True)
class TowerGraph:
    """A truncated tower as one validated (k+1)-graph.

    ``level_of_vertex`` and ``level_of_edge`` record levels (connecting
    edges belong to the lower level of their pair); ``embeddings[n]`` maps
    original level-n identifiers into the big graph.  ``cumulative``
    holds the products m_1 * ... * m_{n-1} per level for scalar towers and
    the corresponding matrix products for matrix towers.
    """

    graph: KGraph
    levels: int
    level_of_vertex: dict
    level_of_edge: dict
    embeddings: dict
    connecting: dict
    cumulative: tuple

    @property
    def rank(self):
        return self.graph.rank


def build_tower(tower: Tower, levels: int) -> TowerGraph:
    """Truncate the tower at the given number of levels (>= 2) and build the
    single (k+1)-graph containing every level and all connecting edges."""
    if levels < 2:
        raise ChainBreak("a tower graph needs at least 2 levels")
    if levels > tower.length + 1:
        raise ChainBreak(
            f"tower has {tower.length} covering systems, cannot take "
            f"{levels} levels", witness=levels)
    k = tower.rank
    vertices = []
    edges = []
    squares = {}
    level_of_vertex = {}
    level_of_edge = {}
    embeddings = {n: {} for n in range(1, levels + 1)}
    connecting = {}

    def level_name(n):
        return lambda x: f"{n}:{x}"

    def conn_name_for(n):
        def conn_name(w, l, tag):
            mid = "" if tag is None else f"b{tag}:"
            return f"e:{n + 1}:{mid}{w}:{l}"
        return conn_name

    for n in range(1, levels):
        cs = tower.systems[n - 1]
        _, vs, es, sqs, bv, be, tv, te, conn = _cover_data(
            cs, level_name(n), level_name(n + 1), conn_name_for(n))
        for nid in list(bv.values()) + list(tv.values()):
            lvl = n if nid.startswith(f"{n}:") else n + 1
            if nid in level_of_vertex:
                if level_of_vertex[nid] != lvl and lvl == n:
                    raise ChainBreak(
                        f"shared level {n} disagrees on vertex {nid}",
                        witness=nid)
            else:
                level_of_vertex[nid] = lvl
                vertices.append(nid)
        for item in es:
            eid = item[0]
            if eid in level_of_edge:
                continue
            if item[1] == k + 1:
                level_of_edge[eid] = n
            else:
                level_of_edge[eid] = n if eid.startswith(f"{n}:") else n + 1
            edges.append(item)
        for key, val in sqs.items():
            if key in squares and squares[key] != val:
                raise ChainBreak(
                    f"levels disagree on square {key}", witness=key)
            squares[key] = val
        for orig, nid in bv.items():
            embeddings[n][orig] = nid
        for orig, nid in tv.items():
            embeddings[n + 1][orig] = nid
        for orig, nid in be.items():
            embeddings[n][orig] = nid
        for orig, nid in te.items():
            embeddings[n + 1][orig] = nid
        for key, name in conn.items():
            connecting[(n,) + (key if isinstance(key, tuple) else (key,))] = name

    cumulative = _cumulative_multiplicities(tower, levels)
    try:
        skel = Skeleton.build(k + 1, vertices, edges, trusted=True)
        graph = validate_kgraph(skel, squares)
    except KgError as exc:
        raise InternalConstructionError(
            f"constructed tower graph failed validation: {exc}",
            witness=exc.witness) from exc
    return TowerGraph(graph=graph, levels=levels,
                      level_of_vertex=level_of_vertex,
                      level_of_edge=level_of_edge,
                      embeddings=embeddings, connecting=connecting,
                      cumulative=cumulative)


def _cumulative_multiplicities(tower: Tower, levels: int):
    """m_1 ... m_{n-1} per level; matrix levels multiply the multiplicity
    matrices (entry (i, j) counts degree-(n-1)e_{k+1} paths between the
    components)."""
    out = []
    scalar = all(not isinstance(cs, MatrixCoveringSystem)
                 for cs in tower.systems[:levels - 1])
    if scalar:
        acc = 1
        out.append(1)
        for cs in tower.systems[:levels - 1]:
            acc *= cs.m
            out.append(acc)
        return tuple(out)
    # matrix case: row vector products
    from .intmat import IntMatrix

    def mat_of(cs):
        if isinstance(cs, MatrixCoveringSystem):
            return IntMatrix.from_rows(cs.multiplicities)
        return IntMatrix.from_rows([[cs.m]])

    acc = None
    first = mat_of(tower.systems[0])
    acc = IntMatrix.identity(first.ncols)
    out.append(acc)
    for cs in tower.systems[:levels - 1]:
        acc = mat_of(cs) * acc
        out.append(acc)
    return tuple(out)
