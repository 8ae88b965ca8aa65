"""Coverings p : total -> base, permutation cocycles, and covering systems.

A covering is specified on the skeleton only: a vertex map and color
preserving edge maps.  Validation checks that ranges, sources and squares
are preserved and that the maps restrict to bijections on incoming and on
outgoing edges of every color at every vertex of the total graph; the
functor on all paths is then induced, and unique path lifting follows.

Permutations of {1..m} are stored in one-line notation (the image list of
1..m).  Composition is "apply the right factor first": (phi*psi)(l) =
phi(psi(l)), and the cocycle value of a path multiplies edge values from
the range end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (AnchorMismatch, BadPermutation, ChainBreak,
                     ComponentMismatch, DegreeBroken, LocalInjectivityFail,
                     NotSurjective, SquareIncompatible, SquareRelationFail,
                     WrongRank, ZeroRowOrColumn)
from .kgraph import KGraph, Path


# --- permutation helpers (one-line notation, 1-based values) --------------

def perm_identity(m):
    return tuple(range(1, m + 1))

def perm_apply(p, l):
    return p[l - 1]

def perm_compose(p, q):
    """(p*q)(l) = p(q(l))."""
    return tuple(p[q[l - 1] - 1] for l in range(1, len(p) + 1))

def perm_inverse(p):
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v - 1] = i + 1
    return tuple(inv)

def perm_is_valid(p, m):
    return len(p) == m and sorted(p) == list(range(1, m + 1))


@dataclass(frozen=True)
class Covering:
    """A validated covering of ``base`` by ``total``."""

    base: KGraph
    total: KGraph
    vertex_map: dict
    edge_map: dict
    fiber_profile: tuple = ()   # sorted (base vertex, fiber size) pairs

    def vmap(self, v):
        return self.vertex_map[v]

    def emap(self, e):
        return self.edge_map[e]

    def is_nfold(self):
        """The constant fiber size, or None when fibers vary."""
        sizes = {s for _, s in self.fiber_profile}
        return sizes.pop() if len(sizes) == 1 else None


def validate_covering(base: KGraph, total: KGraph, vertex_map: dict,
                      edge_map: dict) -> Covering:
    """Check the covering axioms on the skeleton data."""
    if base.rank != total.rank:
        raise WrongRank(f"ranks differ: base {base.rank}, total {total.rank}")
    base_vs = set(base.vertices)
    for v in total.vertices:
        if vertex_map.get(v) not in base_vs:
            raise NotSurjective(f"vertex {v!r} has no valid image",
                                witness=v)
    hit = set(vertex_map[v] for v in total.vertices)
    if hit != base_vs:
        missing = sorted(base_vs - hit)
        raise NotSurjective(f"base vertices not covered: {missing}",
                            witness=missing)

    for e in total.skeleton.edges:
        img_id = edge_map.get(e.eid)
        if img_id is None or not base.has_edge(img_id):
            raise DegreeBroken(f"edge {e.eid!r} has no valid image",
                               witness=e.eid)
        img = base.edge(img_id)
        if img.color != e.color:
            raise DegreeBroken(
                f"edge {e.eid!r} changes color under the covering",
                witness=(e.eid, img_id))
        if vertex_map[e.rng] != img.rng or vertex_map[e.src] != img.src:
            raise LocalInjectivityFail(
                f"edge {e.eid!r} does not intertwine range/source",
                witness=(e.eid, img_id))

    # local bijectivity on in- and out-edges, per vertex and color: one
    # pass over the edges gathers the image multisets, and the base-side
    # sets are cached per (base vertex, color) since fibers share them
    img_in: dict = {}
    img_out: dict = {}
    for e in total.skeleton.edges:
        img = edge_map[e.eid]
        img_in.setdefault((e.rng, e.color), []).append(img)
        img_out.setdefault((e.src, e.color), []).append(img)
    base_sets: dict = {}
    for v in total.vertices:
        bv = vertex_map[v]
        for c in range(1, total.rank + 1):
            key = (bv, c)
            if key not in base_sets:
                base_sets[key] = (
                    frozenset(e.eid for e in base.in_edges(bv, c)),
                    frozenset(e.eid for e in base.out_edges(bv, c)))
            want_in, want_out = base_sets[key]
            for direction, images, want in (
                    ("in", img_in.get((v, c), ()), want_in),
                    ("out", img_out.get((v, c), ()), want_out)):
                if len(images) != len(want) or set(images) != want:
                    raise LocalInjectivityFail(
                        f"{direction}-edges of color {c} at {v!r} do not map "
                        f"bijectively onto those at {bv!r}",
                        witness=(v, c, direction))

    # square compatibility: p applied entrywise matches the base square
    base_sq = base._sq
    em = edge_map
    for (e1, f1), (f2, e2) in total.squares.items():
        if base_sq.get((em[e1], em[f1])) != (em[f2], em[e2]):
            raise SquareIncompatible(
                f"square ({e1},{f1}) does not match the base square",
                witness=(e1, f1))

    fibers: dict = {}
    for v in total.vertices:
        fibers.setdefault(vertex_map[v], 0)
        fibers[vertex_map[v]] += 1
    profile = tuple(sorted(fibers.items()))
    return Covering(base=base, total=total, vertex_map=dict(vertex_map),
                    edge_map=dict(edge_map), fiber_profile=profile)


@dataclass(frozen=True)
class Cocycle:
    """A functor from the total graph to permutations of {1..m}, stored on
    edges; the square relation makes the extension to paths well defined."""

    m: int
    edge_perms: dict

    def of_edge(self, eid):
        return self.edge_perms[eid]

    def of_path(self, path: Path):
        p = perm_identity(self.m)
        for eid in path.edges:
            p = perm_compose(p, self.edge_perms[eid])
        return p


def validate_cocycle(total: KGraph, m: int, edge_perms: dict) -> Cocycle:
    """Check permutation validity and the square relation
    s(e)s(f) = s(f')s(e') for every factorization square."""
    if m < 1:
        raise BadPermutation(f"multiplicity must be positive, got {m}")
    if m == 1:
        for eid, p in edge_perms.items():
            if tuple(p) != (1,):
                raise BadPermutation(
                    f"value for edge {eid!r} is not a permutation of 1..1",
                    witness=(eid, tuple(p)))
        return Cocycle(m=1, edge_perms={e.eid: (1,)
                                        for e in total.skeleton.edges})
    perms = {}
    ident = perm_identity(m)
    for e in total.skeleton.edges:
        p = tuple(edge_perms.get(e.eid, ident))
        if not perm_is_valid(p, m):
            raise BadPermutation(
                f"value for edge {e.eid!r} is not a permutation of 1..{m}",
                witness=(e.eid, p))
        perms[e.eid] = p
    for (e1, f1), (f2, e2) in total.squares.items():
        lhs = perm_compose(perms[e1], perms[f1])
        rhs = perm_compose(perms[f2], perms[e2])
        if lhs != rhs:
            raise SquareRelationFail(
                f"cocycle breaks on square {e1}*{f1} = {f2}*{e2}",
                witness=(e1, f1))
    return Cocycle(m=m, edge_perms=perms)


def trivial_cocycle(total: KGraph) -> Cocycle:
    return Cocycle(m=1, edge_perms={e.eid: (1,) for e in total.skeleton.edges})


def lift_path(c: Covering, path: Path, anchor: str, mode: str = "by_source") -> Path:
    """The unique lift of a base path with prescribed source or range."""
    if path.graph is not c.base:
        raise AnchorMismatch("path does not live on the base graph")
    if mode not in ("by_source", "by_range"):
        raise ValueError(f"unknown mode {mode!r}")
    want = path.source if mode == "by_source" else path.range
    if c.vertex_map.get(anchor) != want:
        raise AnchorMismatch(
            f"anchor {anchor!r} sits over {c.vertex_map.get(anchor)!r}, "
            f"need {want!r}", witness=anchor)
    base_edges = [c.base.edge(e) for e in path.edges]
    lifted = []
    if mode == "by_source":
        at = anchor
        for e in reversed(base_edges):
            cand = [f for f in c.total.out_edges(at, e.color)
                    if c.edge_map[f.eid] == e.eid]
            assert len(cand) == 1, "local bijectivity guarantees uniqueness"
            lifted.append(cand[0])
            at = cand[0].rng
        lifted.reverse()
        rng = at if not lifted else lifted[0].rng
    else:
        at = anchor
        for e in base_edges:
            cand = [f for f in c.total.in_edges(at, e.color)
                    if c.edge_map[f.eid] == e.eid]
            assert len(cand) == 1, "local bijectivity guarantees uniqueness"
            lifted.append(cand[0])
            at = cand[0].src
        rng = anchor
    return Path(c.total, rng, tuple(f.eid for f in lifted))


@dataclass(frozen=True)
class CoveringSystem:
    """(base, total, p, m, s): the data the rank-raising construction eats."""

    base: KGraph
    total: KGraph
    covering: Covering
    m: int
    cocycle: Cocycle

    @property
    def rank(self):
        return self.base.rank


def make_covering_system(base: KGraph, total: KGraph, vertex_map, edge_map,
                         m: int = 1, edge_perms: dict | None = None) -> CoveringSystem:
    cov = validate_covering(base, total, vertex_map, edge_map)
    coc = validate_cocycle(total, m, edge_perms or {})
    return CoveringSystem(base=base, total=total, covering=cov, m=m, cocycle=coc)


@dataclass(frozen=True)
class MatrixCoveringSystem:
    """Componentwise covering data between disjoint unions.

    ``base_components`` and ``total_components`` are tuples of KGraphs with
    pairwise disjoint identifier spaces; ``multiplicities[i][j]`` couples
    total component i with base component j, and ``blocks[(i, j)]`` holds a
    CoveringSystem exactly for the nonzero entries.
    """

    base_components: tuple
    total_components: tuple
    multiplicities: tuple
    blocks: dict

    @property
    def rank(self):
        return self.base_components[0].rank


def validate_matrix_system(base_components, total_components, multiplicities,
                           blocks) -> MatrixCoveringSystem:
    base_components = tuple(base_components)
    total_components = tuple(total_components)
    multiplicities = tuple(tuple(int(x) for x in row) for row in multiplicities)
    ci, cj = len(total_components), len(base_components)
    if len(multiplicities) != ci or any(len(r) != cj for r in multiplicities):
        raise ComponentMismatch("multiplicity matrix shape mismatch")
    for i, row in enumerate(multiplicities):
        if all(x == 0 for x in row):
            raise ZeroRowOrColumn(f"multiplicity row {i + 1} is zero",
                                  witness=("row", i + 1))
    for j in range(cj):
        if all(row[j] == 0 for row in multiplicities):
            raise ZeroRowOrColumn(f"multiplicity column {j + 1} is zero",
                                  witness=("col", j + 1))
    ranks = {g.rank for g in base_components} | {g.rank for g in total_components}
    if len(ranks) != 1:
        raise WrongRank(f"components of mixed rank {sorted(ranks)}")
    _check_disjoint(base_components)
    _check_disjoint(total_components)
    for i in range(ci):
        for j in range(cj):
            mij = multiplicities[i][j]
            cs = blocks.get((i + 1, j + 1))
            if mij == 0:
                if cs is not None:
                    raise ComponentMismatch(
                        f"block ({i + 1},{j + 1}) declared but multiplicity is 0")
                continue
            if cs is None:
                raise ComponentMismatch(
                    f"missing covering system for block ({i + 1},{j + 1})")
            if cs.base is not base_components[j] or \
                    cs.total is not total_components[i]:
                raise ComponentMismatch(
                    f"block ({i + 1},{j + 1}) does not connect the declared "
                    "components")
            if cs.m != mij:
                raise ComponentMismatch(
                    f"block ({i + 1},{j + 1}) multiplicity {cs.m} != matrix "
                    f"entry {mij}")
    return MatrixCoveringSystem(base_components=base_components,
                                total_components=total_components,
                                multiplicities=multiplicities,
                                blocks=dict(blocks))


def _check_disjoint(components):
    seen_v: set = set()
    seen_e: set = set()
    for g in components:
        for v in g.vertices:
            if v in seen_v:
                raise ComponentMismatch(f"vertex id {v!r} re-used across "
                                        "components", witness=v)
            seen_v.add(v)
        for e in g.skeleton.edges:
            if e.eid in seen_e:
                raise ComponentMismatch(f"edge id {e.eid!r} re-used across "
                                        "components", witness=e.eid)
            seen_e.add(e.eid)


@dataclass(frozen=True)
class Tower:
    """A chained list of covering systems; level n's total is level (n+1)'s
    base (componentwise for matrix levels).  Levels are 1-indexed.

    ``meta`` carries optional family facts attached by the constructors
    (continuation rules, product factorizations, subgroup chains); analysis
    code may use them but never requires them.
    """

    systems: tuple
    meta: dict = field(default_factory=dict)

    @property
    def length(self):
        return len(self.systems)

    @property
    def rank(self):
        return self.systems[0].rank

    def level_graphs(self):
        """The k-graphs at levels 1..N (N = number of systems + 1), with
        matrix levels returned as component tuples."""
        out = []
        for n, cs in enumerate(self.systems):
            if isinstance(cs, MatrixCoveringSystem):
                if n == 0:
                    out.append(cs.base_components)
                out.append(cs.total_components)
            else:
                if n == 0:
                    out.append((cs.base,))
                out.append((cs.total,))
        return out


def validate_tower(systems, meta: dict | None = None) -> Tower:
    systems = tuple(systems)
    if not systems:
        raise ChainBreak("a tower needs at least one covering system")
    ranks = {cs.rank for cs in systems}
    if len(ranks) != 1:
        raise WrongRank(f"tower levels of mixed rank {sorted(ranks)}")
    for n in range(len(systems) - 1):
        a, b = systems[n], systems[n + 1]
        a_tot = a.total_components if isinstance(a, MatrixCoveringSystem) \
            else (a.total,)
        b_base = b.base_components if isinstance(b, MatrixCoveringSystem) \
            else (b.base,)
        if len(a_tot) != len(b_base) or any(x is not y and
                                            x.skeleton != y.skeleton
                                            for x, y in zip(a_tot, b_base)):
            raise ChainBreak(
                f"level {n + 1} total does not match level {n + 2} base",
                witness=n + 1)
    return Tower(systems=systems, meta=dict(meta or {}))
