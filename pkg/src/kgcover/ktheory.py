"""K-theory of 1-graph and 2-graph algebras, and of covering towers.

For a 1-graph with vertex matrix A (A(v,w) counts edges with range v and
source w, parallel edges with multiplicity):

    K0 = coker(1 - A^t),   K1 = ker(1 - A^t),

with the class of the vertex projection sum landing on the all-ones vector.
For a 2-graph with coordinate matrices M1, M2 the complex

    0 <- ZV <-d1- ZV + ZV <-d2- ZV <- 0,
    d1 = (1 - M1^t, 1 - M2^t),   d2 = (M2^t - 1; 1 - M1^t),

gives K0 = coker(d1) + ker(d2) and K1 = ker(d1)/Im(d2).  The same complex
is the rank-2 case of the exterior-algebra complex computed by
:func:`koszul_homology`; for rank >= 3 only that homology is emitted,
flagged non-conclusive, and tower levels of rank <= 2 are the supported
route to rank-3 invariants.

A covering with multiplicity m induces m * p^* on vertex modules, where
p^*(delta_v) sums the fiber over v.  The exact intertwining
(1 - B^t) (m p^*) = (m p^*) (1 - A^t) is verified on every processed
covering (its failure would mean an invalid covering slipped through, and
is treated as fatal), and the induced maps descend to cokernels, restrict
to kernels, and pass to the subquotient blockwise.

For 2-graph towers that are not translation quotients the block-diagonal
K0 splitting is an assumption rather than a theorem; reports carry a flag
saying so (see ``K0_SPLITTING_NOTE``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .abgroups import (CokerContext, FgAbGroup, FgAbMap, KernelContext,
                       SubquotientContext, tensor_orders)
from .covering import MatrixCoveringSystem, Tower
from .errors import (HasSource, InternalConstructionError, NotWellDefined,
                     RankTooHigh, TorsionHypothesisFail, WrongRank)
from .intmat import IntMatrix, block_diag
from .kgraph import KGraph, disjoint_union
from .limits import DirectSystem, LimitClassification, classify


K0_SPLITTING_NOTE = (
    "the block-diagonal action on coker(d1) + ker(d2) is verified for "
    "translation-quotient towers; for other 2-graph towers it is an "
    "assumption recorded here")


# ---------------------------------------------------------------------------
# Adjacency data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdjacencyData:
    """Per-color vertex connectivity matrices in sorted vertex order."""

    vertex_order: tuple
    matrices: tuple  # IntMatrix per color, 1-based color c at index c-1

    @staticmethod
    def of(graph: KGraph) -> "AdjacencyData":
        mats = tuple(IntMatrix.from_rows(graph.adjacency(c))
                     for c in range(1, graph.rank + 1))
        return AdjacencyData(vertex_order=tuple(graph.vertices), matrices=mats)

    def one_minus_mt(self, color: int) -> IntMatrix:
        m = self.matrices[color - 1]
        return IntMatrix.identity(m.nrows) - m.transpose()


def _require_no_sources(graph: KGraph):
    bad = graph.source_vertices()
    if bad:
        raise HasSource(
            f"K-theory needs no sources; missing in-edges at {bad[:3]}",
            witness=bad)


# ---------------------------------------------------------------------------
# Graded pairs and maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedKPair:
    """(K0, K1) with an optional unit class (ambient K0 coordinates)."""

    k0: FgAbGroup
    k1: FgAbGroup
    unit_class: tuple | None
    provenance: str
    contexts: dict = field(default_factory=dict, compare=False)

    def invariants(self):
        return (self.k0.invariants(), self.k1.invariants())

    def describe(self):
        return f"(K0 = {self.k0.describe()}, K1 = {self.k1.describe()})"

    def unit_coords(self):
        """Canonical coordinates of the unit class, or None."""
        if self.unit_class is None:
            return None
        return self.k0.canonical().coords(self.unit_class)


@dataclass(frozen=True)
class GradedKMap:
    k0: FgAbMap
    k1: FgAbMap
    multiplicity: int = 1

    def canonical(self):
        return (self.k0.canonical_matrix(), self.k1.canonical_matrix())


# ---------------------------------------------------------------------------
# 1-graphs
# ---------------------------------------------------------------------------

def ktheory_1graph(graph: KGraph) -> GradedKPair:
    if graph.rank != 1:
        raise WrongRank(f"expected a 1-graph, got rank {graph.rank}")
    _require_no_sources(graph)
    adj = AdjacencyData.of(graph)
    rel = adj.one_minus_mt(1)
    coker = CokerContext(rel)
    kernel = KernelContext(rel)
    k0 = coker.group()
    k1 = kernel.group()
    unit = (1,) * k0.ambient
    return GradedKPair(k0=k0, k1=k1, unit_class=unit, provenance="engine",
                       contexts={"kind": "rank1", "adjacency": adj,
                                 "coker": coker, "kernel": kernel})


# ---------------------------------------------------------------------------
# 2-graphs
# ---------------------------------------------------------------------------

def complex_2graph(adj: AdjacencyData):
    """(d1, d2) for the two-term complex of a 2-graph."""
    a1 = adj.one_minus_mt(1)
    a2 = adj.one_minus_mt(2)
    d1 = a1.hstack(a2)
    d2 = (-a2).vstack(a1)
    if not (d1 * d2).is_zero():
        raise InternalConstructionError(
            "d1*d2 != 0: coordinate matrices do not commute")
    return d1, d2


def ktheory_2graph(graph: KGraph) -> GradedKPair:
    if graph.rank != 2:
        raise WrongRank(f"expected a 2-graph, got rank {graph.rank}")
    _require_no_sources(graph)
    adj = AdjacencyData.of(graph)
    d1, d2 = complex_2graph(adj)
    coker = CokerContext(d1)
    kernel = KernelContext(d2)
    subq = SubquotientContext(zmatrix=d1, bmatrix=d2)
    k0 = coker.group().direct_sum(kernel.group())
    k1 = subq.group()
    n = len(adj.vertex_order)
    unit = (1,) * n + (0,) * kernel.rank
    return GradedKPair(k0=k0, k1=k1, unit_class=unit, provenance="engine",
                       contexts={"kind": "rank2", "adjacency": adj,
                                 "coker": coker, "kernel": kernel,
                                 "subquotient": subq})


# ---------------------------------------------------------------------------
# The exterior-algebra complex for general rank
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KoszulComplex:
    """Terms D_a of rank C(k, a) * |V| and differentials d_a : D_a -> D_{a-1}.

    Basis order: size-a color subsets in lexicographic order, each holding a
    block of vertex coordinates in sorted order.
    """

    rank: int
    nvertices: int
    differentials: tuple  # d_1 ... d_k

    def term_rank(self, a: int) -> int:
        from math import comb
        return comb(self.rank, a) * self.nvertices


def koszul_complex(graph: KGraph) -> KoszulComplex:
    _require_no_sources(graph)
    adj = AdjacencyData.of(graph)
    k = graph.rank
    n = len(adj.vertex_order)
    blocks = {c: adj.one_minus_mt(c) for c in range(1, k + 1)}
    diffs = []
    for a in range(1, k + 1):
        rows_subsets = list(combinations(range(1, k + 1), a - 1))
        cols_subsets = list(combinations(range(1, k + 1), a))
        row_index = {s: t for t, s in enumerate(rows_subsets)}
        mat = [[0] * (len(cols_subsets) * n)
               for _ in range(len(rows_subsets) * n)]
        for ci, s in enumerate(cols_subsets):
            for j, color in enumerate(s):
                target = tuple(x for x in s if x != color)
                sign = 1 if j % 2 == 0 else -1
                ri = row_index[target]
                b = blocks[color]
                for u in range(n):
                    row = mat[ri * n + u]
                    brow = b.rows[u]
                    for v in range(n):
                        if brow[v]:
                            row[ci * n + v] += sign * brow[v]
        diffs.append(IntMatrix.from_rows(mat, ncols=len(cols_subsets) * n))
    for a in range(1, k):
        if not (diffs[a - 1] * diffs[a]).is_zero():
            raise InternalConstructionError(
                f"d_{a} * d_{a + 1} != 0 in the exterior complex")
    return KoszulComplex(rank=k, nvertices=n, differentials=tuple(diffs))


def koszul_homology(graph: KGraph):
    """Homology groups H_0..H_k of the exterior complex.

    Returns (groups, conclusive): for rank <= 2 the groups determine the
    K-theory; for rank >= 3 they are only the first page of a spectral
    sequence and ``conclusive`` is False.
    """
    cx = koszul_complex(graph)
    k = cx.rank
    groups = []
    for a in range(0, k + 1):
        if a == 0:
            groups.append(FgAbGroup(cx.term_rank(0), cx.differentials[0]))
        elif a < k:
            groups.append(SubquotientContext(
                zmatrix=cx.differentials[a - 1],
                bmatrix=cx.differentials[a]).group())
        else:
            groups.append(KernelContext(cx.differentials[k - 1]).group())
    return groups, (k <= 2)


# ---------------------------------------------------------------------------
# Induced maps of covering systems
# ---------------------------------------------------------------------------

def pullback_matrix(base_order, total_order, pairs, multiplier=1) -> IntMatrix:
    """The matrix of m * p^*: Z(base) -> Z(total) from (total vertex,
    base vertex, m) triples; rows follow total_order, columns base_order."""
    bidx = {v: i for i, v in enumerate(base_order)}
    tidx = {v: i for i, v in enumerate(total_order)}
    rows = [[0] * len(base_order) for _ in total_order]
    for tv, bv, m in pairs:
        rows[tidx[tv]][bidx[bv]] += m * multiplier
    return IntMatrix.from_rows(rows, ncols=len(base_order))


def _level_graph(level) -> KGraph:
    """A covering-system side as one graph (union for matrix systems)."""
    if isinstance(level, tuple):
        return disjoint_union(level) if len(level) > 1 else level[0]
    return level


def _pullback_pairs(cs):
    """(total vertex, base vertex, multiplicity) triples of a system."""
    if isinstance(cs, MatrixCoveringSystem):
        pairs = []
        for (i, j), block in cs.blocks.items():
            m = cs.multiplicities[i - 1][j - 1]
            for w in block.total.vertices:
                pairs.append((w, block.covering.vmap(w), m))
        return pairs
    return [(w, cs.covering.vmap(w), cs.m) for w in cs.total.vertices]


def _system_side_graphs(cs):
    if isinstance(cs, MatrixCoveringSystem):
        return (_level_graph(cs.base_components),
                _level_graph(cs.total_components))
    return cs.base, cs.total


def _mat_times_pullback(mat: IntMatrix, pairs, base_order, total_order):
    """mat * F for the pullback matrix F, exploiting one entry per F-row."""
    bidx = {v: i for i, v in enumerate(base_order)}
    tidx = {v: i for i, v in enumerate(total_order)}
    out = [[0] * len(base_order) for _ in range(mat.nrows)]
    for tv, bv, m in pairs:
        u, v = tidx[tv], bidx[bv]
        col = mat.col(u)
        for i in range(mat.nrows):
            if col[i]:
                out[i][v] += m * col[i]
    return IntMatrix.from_rows(out, ncols=len(base_order))


def _pullback_times_mat(pairs, mat: IntMatrix, base_order, total_order):
    """F * mat: row for total vertex u is m times mat's row over p(u)."""
    bidx = {v: i for i, v in enumerate(base_order)}
    rows = [[0] * mat.ncols for _ in total_order]
    tidx = {v: i for i, v in enumerate(total_order)}
    for tv, bv, m in pairs:
        src_row = mat.rows[bidx[bv]]
        dst = rows[tidx[tv]]
        for j, x in enumerate(src_row):
            if x:
                dst[j] += m * x
    return IntMatrix.from_rows(rows, ncols=mat.ncols)


def _check_intertwining(pairs, adj_base: AdjacencyData,
                        adj_total: AdjacencyData):
    for c in range(1, len(adj_base.matrices) + 1):
        lhs = _mat_times_pullback(adj_total.one_minus_mt(c), pairs,
                                  adj_base.vertex_order,
                                  adj_total.vertex_order)
        rhs = _pullback_times_mat(pairs, adj_base.one_minus_mt(c),
                                  adj_base.vertex_order,
                                  adj_total.vertex_order)
        if lhs != rhs:
            raise NotWellDefined(
                "(1 - B^t) (m p*) != (m p*) (1 - A^t) for color "
                f"{c}: the covering data is inconsistent", witness=c)


def induced_kmap(cs, base_pair: GradedKPair | None = None,
                 total_pair: GradedKPair | None = None) -> GradedKMap:
    """The induced map on K-theory of a (matrix of) covering system(s).

    K-theory pairs of the two sides are computed when not supplied; passing
    them avoids recomputation inside towers.
    """
    pairs = _pullback_pairs(cs)
    rank = cs.rank
    if base_pair is None or total_pair is None:
        base, total = _system_side_graphs(cs)
        compute = ktheory_1graph if rank == 1 else ktheory_2graph
        base_pair = base_pair or compute(base)
        total_pair = total_pair or compute(total)
    adj_b = base_pair.contexts["adjacency"]
    adj_t = total_pair.contexts["adjacency"]
    f = pullback_matrix(adj_b.vertex_order, adj_t.vertex_order, pairs)
    _check_intertwining(pairs, adj_b, adj_t)
    m_rec = cs.m if not isinstance(cs, MatrixCoveringSystem) else 0
    if rank == 1:
        # the verified intertwining is exactly the certificate identity
        k0 = FgAbMap.trusted(base_pair.k0, total_pair.k0, f, certificate=f)
        k1 = base_pair.contexts["kernel"].induce(
            f, total_pair.contexts["kernel"])
        return GradedKMap(k0=k0, k1=k1, multiplicity=m_rec)
    if rank == 2:
        ker_map = base_pair.contexts["kernel"].induce(
            f, total_pair.contexts["kernel"])
        ff = block_diag(f, f)
        # per-color intertwining stacks to d1^total * (f + f) = f * d1^base;
        # the combined relation matrix only has the coker block, so (f + f)
        # is the whole certificate
        k0 = FgAbMap.trusted(base_pair.k0, total_pair.k0,
                             block_diag(f, ker_map.matrix), certificate=ff)
        k1 = base_pair.contexts["subquotient"].induce(
            ff, total_pair.contexts["subquotient"])
        return GradedKMap(k0=k0, k1=k1, multiplicity=m_rec)
    raise RankTooHigh(f"induced K-maps implemented for rank <= 2, got {rank}")


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TowerKTheory:
    levels: tuple            # GradedKPair per level
    maps: tuple              # GradedKMap per covering system
    k0: LimitClassification
    k1: LimitClassification
    notes: tuple = ()


def ktheory_tower(tower: Tower, levels: int | None = None,
                  continuation=None, window: int = 3) -> TowerKTheory:
    """Per-level K-theory, induced maps, and limit classifications.

    ``continuation`` is None, "repeat-last", "periodic" (the declared
    maps cycle forever), explicit tail maps ("geometric", k0_matrix,
    k1_matrix), or "none"; when None the tower's own family metadata may
    supply a rule, while "none" suppresses that and keeps the system
    truncation-only.
    """
    n_levels = tower.length + 1 if levels is None else levels
    if n_levels < 2 or n_levels > tower.length + 1:
        raise WrongRank(f"levels must lie in 2..{tower.length + 1}")
    if tower.rank > 2:
        raise RankTooHigh(
            f"tower levels have rank {tower.rank}; K-groups are computed "
            "for levels of rank <= 2")
    if continuation is None:
        continuation = tower.meta.get("continuation")
    elif continuation == "none":
        continuation = None

    graphs = [_level_graph(g) for g in tower.level_graphs()][:n_levels]
    compute = ktheory_1graph if tower.rank == 1 else ktheory_2graph
    pairs = [compute(g) for g in graphs]
    kmaps = [induced_kmap(cs, pairs[i], pairs[i + 1])
             for i, cs in enumerate(tower.systems[:n_levels - 1])]

    cont0 = cont1 = None
    if continuation in ("repeat-last", "periodic"):
        cont0 = cont1 = (continuation,)
    elif isinstance(continuation, tuple) and continuation and \
            continuation[0] == "geometric":
        cont0 = ("geometric", continuation[1])
        cont1 = ("geometric", continuation[2])

    ds0 = DirectSystem(groups=tuple(p.k0 for p in pairs),
                       maps=tuple(m.k0 for m in kmaps),
                       continuation=cont0,
                       distinguished=pairs[0].unit_class)
    ds1 = DirectSystem(groups=tuple(p.k1 for p in pairs),
                       maps=tuple(m.k1 for m in kmaps),
                       continuation=cont1)
    notes = []
    if tower.rank == 2 and not tower.meta.get("translation_quotient"):
        notes.append(K0_SPLITTING_NOTE)
    return TowerKTheory(levels=tuple(pairs), maps=tuple(kmaps),
                        k0=classify(ds0, window=window),
                        k1=classify(ds1, window=window),
                        notes=tuple(notes))


# ---------------------------------------------------------------------------
# Kunneth formula
# ---------------------------------------------------------------------------

def _torsion_free_graded(pair: GradedKPair) -> bool:
    return pair.k0.is_free() and pair.k1.is_free()


def _orders_of(group: FgAbGroup):
    """Generator orders in canonical() ordering, so that coordinates from
    unit_coords() and canonical_matrix() line up with them."""
    return group.canonical().orders


def _graded_tor_vanishes(a: GradedKPair, b: GradedKPair) -> bool:
    """All pairwise torsion products Tor(Z/c, Z/d) = Z/gcd(c, d) vanish."""
    from math import gcd
    ta = a.k0.torsion + a.k1.torsion
    tb = b.k0.torsion + b.k1.torsion
    return all(gcd(c, d) == 1 for c in ta for d in tb)


def kunneth(a: GradedKPair, b: GradedKPair) -> GradedKPair:
    """Graded tensor product; one factor must have torsion-free K-theory,
    except that two torsion sides with coprime torsion are also accepted
    since every correction term Tor(Z/c, Z/d) vanishes then.

    K0 = a0 x b0 + a1 x b1, K1 = a0 x b1 + a1 x b0, in canonical
    presentations; the unit lands at unit x unit in the first summand.
    """
    if not (_torsion_free_graded(a) or _torsion_free_graded(b)):
        if not _graded_tor_vanishes(a, b):
            sides = []
            for name, p in (("left", a), ("right", b)):
                for deg, g in (("K0", p.k0), ("K1", p.k1)):
                    if not g.is_free():
                        sides.append(f"{name} {deg}")
            raise TorsionHypothesisFail(
                f"both factors carry torsion ({', '.join(sides)}) and the "
                "correction terms do not vanish", witness=sides)
    oa0, oa1 = _orders_of(a.k0), _orders_of(a.k1)
    ob0, ob1 = _orders_of(b.k0), _orders_of(b.k1)
    k0_orders = tensor_orders(oa0, ob0) + tensor_orders(oa1, ob1)
    k1_orders = tensor_orders(oa0, ob1) + tensor_orders(oa1, ob0)
    k0 = FgAbGroup.from_orders(k0_orders)
    k1 = FgAbGroup.from_orders(k1_orders)
    unit = None
    if a.unit_class is not None and b.unit_class is not None:
        ua = a.unit_coords()
        ub = b.unit_coords()
        outer = [x * y for x in ua for y in ub]
        unit = tuple(outer) + (0,) * (len(k0_orders) - len(outer))
    return GradedKPair(k0=k0, k1=k1, unit_class=unit, provenance="kunneth",
                       contexts={"kind": "canonical",
                                 "k0_orders": k0_orders,
                                 "k1_orders": k1_orders})


def _kronecker(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append([x * y for x in ra for y in rb])
    return IntMatrix.from_rows(rows, ncols=a.ncols * b.ncols)


def kmap_kunneth(f: GradedKMap, g: GradedKMap,
                 source: GradedKPair, target: GradedKPair) -> GradedKMap:
    """The graded tensor of two K-maps, between Kunneth pairs built from the
    same factor pairs (``source`` / ``target`` from :func:`kunneth`)."""
    for pair in (source, target):
        if pair.contexts.get("kind") != "canonical":
            raise TorsionHypothesisFail(
                "kmap_kunneth needs pairs produced by kunneth()")
    f0, _, _ = f.k0.canonical_matrix()
    f1, _, _ = f.k1.canonical_matrix()
    g0, _, _ = g.k0.canonical_matrix()
    g1, _, _ = g.k1.canonical_matrix()
    k0_mat = block_diag(_kronecker(f0, g0), _kronecker(f1, g1))
    k1_mat = block_diag(_kronecker(f0, g1), _kronecker(f1, g0))
    return GradedKMap(k0=FgAbMap(source.k0, target.k0, k0_mat),
                      k1=FgAbMap(source.k1, target.k1, k1_mat),
                      multiplicity=f.multiplicity * g.multiplicity)
