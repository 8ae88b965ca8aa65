"""Finite k-graphs presented by colored skeletons and factorization squares.

A rank-k graph is stored as its skeleton (vertices plus k color classes of
edges) together with the table of factorization squares e*f = f'*e' for
color pairs i < j.  Validation checks that the table is defined on exactly
the composable pairs, preserves ranges and sources, is bijective, and
satisfies the associativity condition on triples of three distinct colors
(vacuous for rank at most 2); this is precisely what makes the data a
k-graph, and the opposite-orientation tables are materialized as inverses.

Paths are kept in a color-ascending normal form: reading from the range,
all color-1 edges come first, then color-2, and so on.  Composition
normalizes by rewriting adjacent out-of-order pairs through the square
table; each rewrite removes one color inversion, and uniqueness of
factorizations makes the result independent of the rewrite order.

Degrees are plain tuples of k nonnegative integers, compared and added
componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import (DegreeOutOfRange, HasSource, HexagonViolation,
                     MissingSquare, NotBijective, NotComposable,
                     RangeSourceBroken, SkeletonError)


class Edge(NamedTuple):
    eid: str
    color: int          # 1-based
    src: str
    rng: str


def deg_zero(k):
    return (0,) * k


def deg_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def deg_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def deg_le(a, b):
    return all(x <= y for x, y in zip(a, b))


def unit_degree(k, color):
    return tuple(1 if i == color - 1 else 0 for i in range(k))


@dataclass(frozen=True)
class Skeleton:
    """Vertices and colored edges, before any square data."""

    rank: int
    vertices: tuple
    edges: tuple

    @staticmethod
    def build(rank, vertices, edges, trusted: bool = False) -> "Skeleton":
        """``trusted`` skips well-formedness checks; reserved for data
        derived from already validated graphs (products, unions, covers)."""
        if rank < 1:
            raise SkeletonError("rank must be positive")
        vertices = tuple(sorted(vertices))
        if not vertices:
            raise SkeletonError("empty vertex set")
        if trusted:
            out = [e if type(e) is Edge else Edge(*e) for e in edges]
            out.sort(key=lambda e: (e.color, e.eid))
            return Skeleton(rank=rank, vertices=vertices, edges=tuple(out))
        if len(set(vertices)) != len(vertices):
            raise SkeletonError("duplicate vertex identifier")
        vset = set(vertices)
        out = []
        seen = set()
        for e in edges:
            e = Edge(str(e[0]), int(e[1]), str(e[2]), str(e[3]))
            if e.eid in seen:
                raise SkeletonError(f"duplicate edge identifier {e.eid!r}")
            seen.add(e.eid)
            if not 1 <= e.color <= rank:
                raise SkeletonError(f"edge {e.eid!r} has color {e.color} "
                                    f"outside 1..{rank}")
            if e.src not in vset or e.rng not in vset:
                raise SkeletonError(f"edge {e.eid!r} has undeclared endpoint")
            out.append(e)
        out.sort(key=lambda e: (e.color, e.eid))
        return Skeleton(rank=rank, vertices=vertices, edges=tuple(out))


@dataclass(frozen=True)
class LocalConvexityReport:
    holds: bool
    witness: tuple | None = None


class KGraph:
    """A validated k-graph.  Build through :func:`validate_kgraph`."""

    __slots__ = ("skeleton", "squares", "_sq", "_edges", "_in", "_out",
                 "local_convexity", "validated")

    def __init__(self, skeleton, squares, sq_all, edges, in_map, out_map,
                 local_convexity):
        object.__setattr__(self, "skeleton", skeleton)
        object.__setattr__(self, "squares", squares)
        object.__setattr__(self, "_sq", sq_all)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_in", in_map)
        object.__setattr__(self, "_out", out_map)
        object.__setattr__(self, "local_convexity", local_convexity)
        object.__setattr__(self, "validated", True)

    def __setattr__(self, *a):
        raise AttributeError("KGraph is immutable")

    @property
    def rank(self) -> int:
        return self.skeleton.rank

    @property
    def vertices(self) -> tuple:
        return self.skeleton.vertices

    @property
    def edge_list(self) -> tuple:
        return self.skeleton.edges

    def edge(self, eid: str) -> Edge:
        return self._edges[eid]

    def has_edge(self, eid: str) -> bool:
        return eid in self._edges

    def edges_of_color(self, color: int):
        return tuple(e for e in self.skeleton.edges if e.color == color)

    def in_edges(self, v: str, color: int):
        """Edges of the given color with range v."""
        return self._in.get((v, color), ())

    def out_edges(self, v: str, color: int):
        """Edges of the given color with source v."""
        return self._out.get((v, color), ())

    def square(self, eid: str, fid: str):
        """(f', e') with e*f = f'*e', for any ordered pair of distinct
        colors; raises KeyError for non-composable pairs."""
        return self._sq[(eid, fid)]

    def has_no_sources(self) -> bool:
        return all(self._in.get((v, c))
                   for v in self.vertices for c in range(1, self.rank + 1))

    def source_vertices(self):
        """(vertex, color) pairs violating the no-sources condition."""
        return [(v, c) for v in self.vertices
                for c in range(1, self.rank + 1)
                if not self._in.get((v, c))]

    def adjacency(self, color: int):
        """Vertex connectivity matrix M(v, w) = #{edges: range v, source w},
        rows and columns in sorted vertex order."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        m = [[0] * n for _ in range(n)]
        for e in self.edges_of_color(color):
            m[idx[e.rng]][idx[e.src]] += 1
        return m

    def __repr__(self):
        counts = [len(self.edges_of_color(c)) for c in range(1, self.rank + 1)]
        return (f"KGraph(rank={self.rank}, vertices={len(self.vertices)}, "
                f"edges={counts})")


def validate_kgraph(skeleton: Skeleton, squares: dict, *,
                    require_no_sources: bool = False,
                    check_local_convexity: bool = False) -> KGraph:
    """Check the square table and return the validated graph.

    ``squares`` maps (eid, fid) with color(eid) < color(fid) and
    s(eid) = r(fid) to (f'id, e'id) with e*f = f'*e'.
    """
    edges = {e.eid: e for e in skeleton.edges}
    in_map: dict = {}
    out_map: dict = {}
    for e in skeleton.edges:
        in_map.setdefault((e.rng, e.color), []).append(e)
        out_map.setdefault((e.src, e.color), []).append(e)
    in_map = {k: tuple(v) for k, v in in_map.items()}
    out_map = {k: tuple(v) for k, v in out_map.items()}

    sq_all: dict = {}
    k = skeleton.rank
    by_color = {c: [e for e in skeleton.edges if e.color == c]
                for c in range(1, k + 1)}

    by_pair: dict = {}
    for key, val in squares.items():
        e = edges.get(key[0])
        f = edges.get(key[1])
        if e is None or f is None:
            raise MissingSquare(f"square references unknown edge {key}",
                                witness=key)
        if e.color >= f.color:
            raise RangeSourceBroken(
                f"square key {key} must pair a lower color with a higher one",
                witness=key)
        by_pair.setdefault((e.color, f.color), []).append((e, f, key, val))

    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            # composable pairs are counted, not materialized; every table
            # key is checked composable and key count must match, and the
            # injective value map must hit every reverse-orientation pair
            forward_count = sum(len(in_map.get((e.src, j), ()))
                                for e in by_color[i])
            reverse_count = sum(len(in_map.get((f.src, i), ()))
                                for f in by_color[j])
            table = by_pair.get((i, j), [])
            if len(table) < forward_count:
                missing = _find_missing_square(by_color[i], in_map, j,
                                               {t[2] for t in table})
                raise MissingSquare(
                    f"no square for composable pair {missing}",
                    witness=missing)
            seen_values = {}
            for e, f, key, val in table:
                if e.src != f.rng:
                    raise RangeSourceBroken(
                        f"square declared on non-composable pair {key}",
                        witness=key)
                fp = edges.get(val[0])
                ep = edges.get(val[1])
                if fp is None or ep is None:
                    raise MissingSquare(
                        f"square value references unknown edge {val}",
                        witness=(key, val))
                if fp.color != j or ep.color != i:
                    raise RangeSourceBroken(
                        f"square value {val} has wrong colors",
                        witness=(key, val))
                if fp.src != ep.rng:
                    raise RangeSourceBroken(
                        f"square value {val} is not composable",
                        witness=(key, val))
                if fp.rng != e.rng or ep.src != f.src:
                    raise RangeSourceBroken(
                        f"square {key} -> {val} breaks range or source",
                        witness=(key, val))
                if val in seen_values:
                    raise NotBijective(
                        f"two squares share the value {val}",
                        witness=(seen_values[val], key))
                seen_values[val] = key
                sq_all[key] = val
                sq_all[val] = key
            if len(table) > forward_count:
                # some key duplicates or pairs a non-composable couple; the
                # composability loop above caught non-composable ones, so a
                # surplus here means duplicated keys in the input mapping
                raise RangeSourceBroken(
                    f"square table for colors ({i},{j}) has "
                    f"{len(table)} entries for {forward_count} pairs",
                    witness=(i, j))
            if len(seen_values) != reverse_count:
                raise NotBijective(
                    f"square table for colors ({i},{j}) is not onto: "
                    f"{len(seen_values)} values, {reverse_count} pairs expected",
                    witness=(i, j))

    if k >= 3:
        _check_hexagon(skeleton, edges, in_map, sq_all)

    lc_report = None
    if check_local_convexity:
        lc_report = _local_convexity(skeleton, in_map)

    graph = KGraph(skeleton, dict(squares), sq_all, edges, in_map, out_map,
                   lc_report)
    if require_no_sources:
        bad = graph.source_vertices()
        if bad:
            raise HasSource(f"vertex/color pairs without incoming edges: "
                            f"{bad[:3]}{'...' if len(bad) > 3 else ''}",
                            witness=bad)
    return graph


def _find_missing_square(color_edges, in_map, j, keys):
    for e in color_edges:
        for f in in_map.get((e.src, j), ()):
            if (e.eid, f.eid) not in keys:
                return (e.eid, f.eid)
    return None


def _local_convexity(skeleton, in_map) -> LocalConvexityReport:
    k = skeleton.rank
    for e in skeleton.edges:
        for j in range(1, k + 1):
            if j == e.color:
                continue
            i, jj = min(e.color, j), max(e.color, j)
            for f in in_map.get((e.rng, j), ()):
                if e.color < j:
                    a, b = e, f
                else:
                    a, b = f, e
                # need extensions a a' and b b' of degree e_i + e_jj
                if not in_map.get((a.src, jj), ()):
                    return LocalConvexityReport(False, (a.eid, b.eid))
                if not in_map.get((b.src, i), ()):
                    return LocalConvexityReport(False, (a.eid, b.eid))
    return LocalConvexityReport(True)


def _check_hexagon(skeleton, edges, in_map, sq):
    """Associativity of the squares over every ordered triple of distinct
    colors: both rewriting orders of e*f*g must agree."""
    k = skeleton.rank
    colors = range(1, k + 1)
    by_color = {c: [e for e in skeleton.edges if e.color == c] for c in colors}
    for h in colors:
        for i in colors:
            if i == h:
                continue
            for j in colors:
                if j == h or j == i:
                    continue
                for e in by_color[h]:
                    for f in in_map.get((e.src, i), ()):
                        for g in in_map.get((f.src, j), ()):
                            lhs = _hex_lhs(sq, e, f, g, edges)
                            rhs = _hex_rhs(sq, e, f, g, edges)
                            if lhs != rhs:
                                raise HexagonViolation(
                                    "square table is not associative on "
                                    f"({e.eid}, {f.eid}, {g.eid})",
                                    witness=(e.eid, f.eid, g.eid))


def _hex_lhs(sq, e, f, g, edges):
    f1, e1 = sq[(e.eid, f.eid)]
    g1, e2 = sq[(e1, g.eid)]
    g2, f2 = sq[(f1, g1)]
    return (g2, f2, e2)


def _hex_rhs(sq, e, f, g, edges):
    g3, f3 = sq[(f.eid, g.eid)]
    g4, e3 = sq[(e.eid, g3)]
    f4, e4 = sq[(e3, f3)]
    return (g4, f4, e4)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------

class Path:
    """A morphism in normal form: color-ascending edge list from the range.

    Degree-0 paths are bare vertices.  Equality is normal-form equality on
    the same graph.
    """

    __slots__ = ("graph", "rng", "edges")

    def __init__(self, graph: KGraph, rng: str, edges: tuple):
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "rng", rng)
        object.__setattr__(self, "edges", tuple(edges))

    def __setattr__(self, *a):
        raise AttributeError("Path is immutable")

    @property
    def degree(self):
        d = [0] * self.graph.rank
        for eid in self.edges:
            d[self.graph.edge(eid).color - 1] += 1
        return tuple(d)

    @property
    def range(self) -> str:
        return self.rng

    @property
    def source(self) -> str:
        if not self.edges:
            return self.rng
        return self.graph.edge(self.edges[-1]).src

    def __eq__(self, other):
        return (isinstance(other, Path) and self.graph is other.graph
                and self.rng == other.rng and self.edges == other.edges)

    def __hash__(self):
        return hash((id(self.graph), self.rng, self.edges))

    def __repr__(self):
        if not self.edges:
            return f"Path({self.rng})"
        return f"Path({'*'.join(self.edges)})"


def vertex_path(graph: KGraph, v: str) -> Path:
    if v not in set(graph.vertices):
        raise NotComposable(f"unknown vertex {v!r}")
    return Path(graph, v, ())


def path_from_edges(graph: KGraph, eids, order_check: bool = True) -> Path:
    """Normalize a composable edge list into a Path."""
    lst = [graph.edge(e) for e in eids]
    if not lst:
        raise NotComposable("empty edge list needs vertex_path")
    if order_check:
        for a, b in zip(lst, lst[1:]):
            if a.src != b.rng:
                raise NotComposable(
                    f"edges {a.eid} and {b.eid} are not composable",
                    witness=(a.eid, b.eid))
    norm = _normalize(graph, lst)
    return Path(graph, norm[0].rng, tuple(e.eid for e in norm))


def _normalize(graph: KGraph, lst):
    lst = list(lst)
    # bubble out-of-order adjacent pairs; each swap removes one inversion
    t = 0
    while t < len(lst) - 1:
        a, b = lst[t], lst[t + 1]
        if a.color > b.color:
            fp, ep = graph.square(a.eid, b.eid)
            lst[t] = graph.edge(fp)
            lst[t + 1] = graph.edge(ep)
            t = max(0, t - 1)
        else:
            t += 1
    return lst


def compose(p: Path, q: Path) -> Path:
    """Concatenate and renormalize; range of q must be the source of p."""
    if p.graph is not q.graph:
        raise NotComposable("paths live on different graphs")
    if p.source != q.range:
        raise NotComposable(f"source {p.source!r} != range {q.range!r}",
                            witness=(p.source, q.range))
    if not p.edges:
        return q
    if not q.edges:
        return p
    edges = [p.graph.edge(e) for e in p.edges + q.edges]
    norm = _normalize(p.graph, edges)
    return Path(p.graph, norm[0].rng, tuple(e.eid for e in norm))


def factorize(p: Path, m) -> tuple:
    """The unique (head, tail) with compose(head, tail) = p and
    degree(head) = m."""
    d = p.degree
    k = p.graph.rank
    if len(m) != k or any(x < 0 for x in m) or not deg_le(m, d):
        raise DegreeOutOfRange(f"degree {m} not within {d}", witness=(m, d))
    graph = p.graph
    working = [graph.edge(e) for e in p.edges]
    head = []
    for color in range(1, k + 1):
        for _ in range(m[color - 1]):
            pos = next(t for t, e in enumerate(working) if e.color == color)
            # pull the edge to the front through inverse squares
            while pos > 0:
                a, e = working[pos - 1], working[pos]
                ep, ap = graph.square(a.eid, e.eid)
                working[pos - 1] = graph.edge(ep)
                working[pos] = graph.edge(ap)
                pos -= 1
            head.append(working.pop(0))
    if head:
        head_path = Path(graph, head[0].rng, tuple(e.eid for e in head))
    else:
        head_path = Path(graph, p.rng, ())
    if working:
        tail_path = Path(graph, working[0].rng, tuple(e.eid for e in working))
    else:
        tail_path = Path(graph, head_path.source, ())
    return head_path, tail_path


def enumerate_paths(graph: KGraph, v: str, degree):
    """All paths with range v of the given degree, in normal form."""
    k = graph.rank
    out = []

    def extend(prefix, current, remaining, color):
        while color <= k and remaining[color - 1] == 0:
            color += 1
        if color > k:
            out.append(Path(graph, v, tuple(e.eid for e in prefix)))
            return
        for e in graph.in_edges(current, color):
            nxt = list(remaining)
            nxt[color - 1] -= 1
            extend(prefix + [e], e.src, nxt, color)

    extend([], v, list(degree), 1)
    return out


def disjoint_union(graphs) -> KGraph:
    """One KGraph holding several components; identifier spaces must already
    be disjoint (the builders namespace their output)."""
    graphs = list(graphs)
    ranks = {g.rank for g in graphs}
    if len(ranks) != 1:
        raise SkeletonError(f"components of mixed rank {sorted(ranks)}")
    vertices = [v for g in graphs for v in g.vertices]
    edges = [e for g in graphs for e in g.skeleton.edges]
    squares = {}
    for g in graphs:
        squares.update(g.squares)
    skel = Skeleton.build(next(iter(ranks)), vertices, edges)
    return validate_kgraph(skel, squares)


# ---------------------------------------------------------------------------
# Cartesian products
# ---------------------------------------------------------------------------

def product_graph(a: KGraph, b: KGraph) -> KGraph:
    """The (k+k')-graph on vertex pairs; colors of ``a`` come first.

    Mixed squares commute formally: (e,w)(v,f) = (v',f)(e,w') with the
    obvious endpoints.
    """
    ka, kb = a.rank, b.rank

    def pv(u, w):
        return f"{u}|{w}"

    def pe_a(e, w):
        return f"h:{e}|{w}"

    def pe_b(u, f):
        return f"t:{u}|{f}"

    # id caches keep the hot loops off the string formatter
    vv = {(u, w): pv(u, w) for u in a.vertices for w in b.vertices}
    ea = {(e.eid, w): pe_a(e.eid, w)
          for e in a.skeleton.edges for w in b.vertices}
    eb = {(u, f.eid): pe_b(u, f.eid)
          for u in a.vertices for f in b.skeleton.edges}
    vertices = list(vv.values())
    edges = []
    for e in a.skeleton.edges:
        for w in b.vertices:
            edges.append((ea[(e.eid, w)], e.color, vv[(e.src, w)],
                          vv[(e.rng, w)]))
    for u in a.vertices:
        for f in b.skeleton.edges:
            edges.append((eb[(u, f.eid)], ka + f.color,
                          vv[(u, f.src)], vv[(u, f.rng)]))
    squares = {}
    # squares inside the a-colors, one copy per b-vertex
    for (e1, f1), (f2, e2) in a.squares.items():
        for w in b.vertices:
            squares[(ea[(e1, w)], ea[(f1, w)])] = (ea[(f2, w)], ea[(e2, w)])
    # squares inside the b-colors, one copy per a-vertex
    for (e1, f1), (f2, e2) in b.squares.items():
        for u in a.vertices:
            squares[(eb[(u, e1)], eb[(u, f1)])] = (eb[(u, f2)], eb[(u, e2)])
    # mixed squares: (e, r(f)) * (s(e), f)  =  (r(e), f) * (e, s(f))
    for e in a.skeleton.edges:
        for f in b.skeleton.edges:
            squares[(ea[(e.eid, f.rng)], eb[(e.src, f.eid)])] = (
                eb[(e.rng, f.eid)], ea[(e.eid, f.src)])
    skel = Skeleton.build(ka + kb, vertices, edges, trusted=True)
    return validate_kgraph(skel, squares)
