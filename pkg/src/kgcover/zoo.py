"""Constructors for the graph, covering, and tower families of the examples.

Everything returned here passes full validation.  Vertex identifiers are
zero padded so that lexicographic order equals numeric order; matrices and
reports downstream depend on that.

Families:

* ``make_dn(n)``      ring of n vertices with edges both ways round;
* ``make_ln(m)``      simple cycle, edge f_i running from vertex i+1 to i;
* ``make_bn(n)``      bouquet of n loops;
* ``make_tk(k)``      one vertex, one loop per color, commuting squares;
* ``delta_quotient``  translation 2-graph (or k-graph) of Z^k modulo a
                      finite-index subgroup, with coset bookkeeping;
* towers: ``dn_tower``, ``bd_tower``, ``pn_tower``, ``delta_tower`` and the
  matrix tower ``ir_tower`` whose multiplicity matrices multiply out
  continued-fraction convergents.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .covering import (CoveringSystem, Tower, make_covering_system,
                       validate_matrix_system, validate_tower)
from .errors import SingularBasis, UnknownFamily, WrongRank
from .intmat import IntMatrix, column_echelon, solve_many
from .kgraph import KGraph, Skeleton, product_graph, validate_kgraph


# ---------------------------------------------------------------------------
# Small graphs
# ---------------------------------------------------------------------------

def _pad(i, n):
    return f"{i:0{max(1, len(str(n - 1)))}d}"


def make_dn(n: int, tag: str = "") -> KGraph:
    """Ring of n vertices; x_i runs v_{i+1} -> v_i and y_i runs v_i -> v_{i+1}
    (ranges first: r(x_i) = v_i, s(x_i) = v_{i+1})."""
    vid = lambda i: f"{tag}v{_pad(i % n, n)}"
    vs = sorted({vid(i) for i in range(n)})
    es = []
    for i in range(n):
        es.append((f"{tag}x{_pad(i, n)}", 1, vid(i + 1), vid(i)))
        es.append((f"{tag}y{_pad(i, n)}", 1, vid(i), vid(i + 1)))
    return validate_kgraph(Skeleton.build(1, vs, es), {},
                           require_no_sources=True)


def make_ln(m: int, tag: str = "") -> KGraph:
    """Simple cycle with m vertices; f_i is directed from vertex i+1 to
    vertex i, so r(f_i) = v_i and s(f_i) = v_{i+1}."""
    pads = [_pad(i, m) for i in range(m)]
    vids = [f"{tag}v{p}" for p in pads]
    es = [(f"{tag}f{pads[i]}", 1, vids[(i + 1) % m], vids[i])
          for i in range(m)]
    return validate_kgraph(Skeleton.build(1, list(vids), es), {},
                           require_no_sources=True)


def make_bn(n: int, tag: str = "") -> KGraph:
    """Bouquet of n loops at a single vertex."""
    es = [(f"{tag}l{_pad(i, n)}", 1, f"{tag}w", f"{tag}w") for i in range(n)]
    return validate_kgraph(Skeleton.build(1, [f"{tag}w"], es), {},
                           require_no_sources=True)


def make_tk(k: int, tag: str = "") -> KGraph:
    """One vertex, one loop per color, all squares commuting."""
    v = f"{tag}v"
    es = [(f"{tag}c{c}", c, v, v) for c in range(1, k + 1)]
    squares = {(f"{tag}c{i}", f"{tag}c{j}"): (f"{tag}c{j}", f"{tag}c{i}")
               for i in range(1, k + 1) for j in range(i + 1, k + 1)}
    return validate_kgraph(Skeleton.build(k, [v], es), squares,
                           require_no_sources=True)


# ---------------------------------------------------------------------------
# Translation quotients Delta_k / H
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaQuotientData:
    """The quotient graph plus the coset bookkeeping needed for its maps."""

    graph: KGraph
    k: int
    basis: IntMatrix          # columns generate H
    hnf: IntMatrix            # lower-triangular column form of the basis
    order: int
    tag: str

    def reduce(self, g):
        """Canonical coset representative inside the fundamental box."""
        g = list(g)
        for i in range(self.k):
            q = g[i] // self.hnf.entry(i, i)
            if q:
                for r in range(self.k):
                    g[r] -= q * self.hnf.entry(r, i)
        return tuple(g)

    def vertex_id(self, g):
        g = self.reduce(g)
        return self.tag + "g" + ",".join(
            _pad(x, self.hnf.entry(i, i)) for i, x in enumerate(g))

    def edge_id(self, color, g):
        return f"{self.tag}c{color}:" + self.vertex_id(g)[len(self.tag):]

    def representatives(self):
        boxes = [self.hnf.entry(i, i) for i in range(self.k)]
        reps = [()]
        for b in boxes:
            reps = [r + (x,) for r in reps for x in range(b)]
        return reps


def delta_quotient(k: int, basis, tag: str = "") -> DeltaQuotientData:
    """The k-graph of Z^k translations modulo the column span of ``basis``."""
    if not isinstance(basis, IntMatrix):
        basis = IntMatrix.from_rows(basis)
    if basis.shape != (k, k):
        raise WrongRank(f"basis must be {k}x{k}")
    det = basis.det()
    if det == 0:
        raise SingularBasis("subgroup basis is singular", witness=basis)
    ech = column_echelon(basis)
    hnf = ech.H
    for i in range(k):
        if hnf.entry(i, i) <= 0:
            raise SingularBasis("echelon form is degenerate", witness=basis)
    data = DeltaQuotientData(graph=None, k=k, basis=basis, hnf=hnf,
                             order=abs(det), tag=tag)
    reps = data.representatives()
    unit = lambda c: tuple(1 if t == c - 1 else 0 for t in range(k))
    vs = [data.vertex_id(g) for g in reps]
    es = []
    for g in reps:
        for c in range(1, k + 1):
            shifted = tuple(x + u for x, u in zip(g, unit(c)))
            es.append((data.edge_id(c, g), c,
                       data.vertex_id(shifted), data.vertex_id(g)))
    squares = {}
    for g in reps:
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                gi = tuple(x + u for x, u in zip(g, unit(i)))
                gj = tuple(x + u for x, u in zip(g, unit(j)))
                squares[(data.edge_id(i, g), data.edge_id(j, gi))] = (
                    data.edge_id(j, g), data.edge_id(i, gj))
    graph = validate_kgraph(Skeleton.build(k, vs, es), squares,
                            require_no_sources=True)
    return DeltaQuotientData(graph=graph, k=k, basis=basis, hnf=hnf,
                             order=abs(det), tag=tag)


def delta_quotient_covering(base: DeltaQuotientData,
                            total: DeltaQuotientData) -> CoveringSystem:
    """The canonical covering Delta_k/H' -> Delta_k/H for H' inside H."""
    if solve_many(base.basis, total.basis) is None:
        raise SingularBasis("total subgroup is not contained in the base one",
                            witness=(base.basis, total.basis))
    vmap = {}
    emap = {}
    for g in total.representatives():
        vmap[total.vertex_id(g)] = base.vertex_id(g)
        for c in range(1, total.k + 1):
            emap[total.edge_id(c, g)] = base.edge_id(c, g)
    return make_covering_system(base.graph, total.graph, vmap, emap, m=1)


def psi_vector(data: DeltaQuotientData, h) -> tuple:
    """The cycle class of a subgroup element as an ambient K1 vector.

    For h in H pick the degree-h+ and degree-h- paths from the class of 0
    and count edges by range: the result lives in ZG + ZG (blue block then
    red block, vertices in sorted order) and lies in ker(d1).
    """
    if data.k != 2:
        raise WrongRank("cycle classes implemented for rank 2")
    order = {v: i for i, v in enumerate(data.graph.vertices)}
    n = len(order)
    vec = [0] * (2 * n)

    def walk(start, target, sign):
        # a monotone staircase path from `start` of degree `target`
        g = tuple(start)
        for c in (1, 2):
            for _ in range(target[c - 1]):
                # edge of color c with range g: contributes its range
                block = 0 if c == 1 else 1
                vec[block * n + order[data.vertex_id(g)]] += sign
                g = tuple(x + (1 if t == c - 1 else 0)
                          for t, x in enumerate(g))
        return g

    hp = tuple(max(x, 0) for x in h)
    hm = tuple(max(-x, 0) for x in h)
    walk((0, 0), hp, +1)
    walk((0, 0), hm, -1)
    return tuple(vec)


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------

def _ring_covering(big: KGraph, small: KGraph, nbig: int, nsmall: int,
                   big_tag: str, small_tag: str, kind: str) -> CoveringSystem:
    """index-mod covering for the ring families (D_n and L_m)."""
    vmap = {}
    emap = {}
    for i in range(nbig):
        vmap[f"{big_tag}v{_pad(i, nbig)}"] = f"{small_tag}v{_pad(i % nsmall, nsmall)}"
        if kind == "dn":
            emap[f"{big_tag}x{_pad(i, nbig)}"] = f"{small_tag}x{_pad(i % nsmall, nsmall)}"
            emap[f"{big_tag}y{_pad(i, nbig)}"] = f"{small_tag}y{_pad(i % nsmall, nsmall)}"
        else:
            emap[f"{big_tag}f{_pad(i, nbig)}"] = f"{small_tag}f{_pad(i % nsmall, nsmall)}"
    return make_covering_system(small, big, vmap, emap, m=1)


def dn_tower(factors, base: int = 6, repeats: bool = True) -> Tower:
    """Levels D_base, D_{base*f1}, ...; one covering system per factor."""
    sizes = [base]
    for f in factors:
        sizes.append(sizes[-1] * int(f))
    graphs = [make_dn(s, tag=f"L{n + 1}:") for n, s in enumerate(sizes)]
    systems = []
    for n in range(len(factors)):
        systems.append(_ring_covering(graphs[n + 1], graphs[n],
                                      sizes[n + 1], sizes[n],
                                      f"L{n + 2}:", f"L{n + 1}:", "dn"))
    meta = {"family": "dn-tower", "base": base, "factors": list(factors),
            "cycle_lengths": sizes}
    if repeats:
        # the declared factor list cycles forever
        meta["continuation"] = "periodic"
        meta["factors_repeat"] = True
    return validate_tower(systems, meta)


def bd_tower(factors, repeats: bool = True) -> Tower:
    """Levels L_1, L_{f1}, L_{f1 f2}, ...: growing simple cycles."""
    sizes = [1]
    for f in factors:
        sizes.append(sizes[-1] * int(f))
    graphs = [make_ln(s, tag=f"L{n + 1}:") for n, s in enumerate(sizes)]
    systems = []
    for n in range(len(factors)):
        systems.append(_ring_covering(graphs[n + 1], graphs[n],
                                      sizes[n + 1], sizes[n],
                                      f"L{n + 2}:", f"L{n + 1}:", "ln"))
    meta = {"family": "bd-tower", "factors": list(factors),
            "cycle_lengths": sizes}
    if repeats:
        # the declared factor list cycles forever
        meta["continuation"] = "periodic"
        meta["factors_repeat"] = True
    return validate_tower(systems, meta)


def product_covering_system(a: CoveringSystem, b: CoveringSystem,
                            base: KGraph | None = None,
                            total: KGraph | None = None) -> CoveringSystem:
    """The product covering with multiplicity m*m' and the paired cocycle
    (j, j') -> j + (j'-1)m under f(j, j') = j + (j'-1)m."""
    base = base if base is not None else product_graph(a.base, b.base)
    total = total if total is not None else product_graph(a.total, b.total)
    ka = a.base.rank
    m, mp = a.m, b.m

    def fidx(j, jp):
        return j + (jp - 1) * m

    trivial = (m * mp == 1)
    vmap, emap, perms = {}, {}, {}
    for u in a.total.vertices:
        pu = a.covering.vmap(u)
        for w in b.total.vertices:
            vmap[f"{u}|{w}"] = f"{pu}|{b.covering.vmap(w)}"
    for e in a.total.skeleton.edges:
        pe = a.covering.emap(e.eid)
        se = a.cocycle.of_edge(e.eid)
        for w in b.total.vertices:
            eid = f"h:{e.eid}|{w}"
            emap[eid] = f"h:{pe}|{b.covering.vmap(w)}"
            if not trivial:
                perm = [0] * (m * mp)
                for j in range(1, m + 1):
                    for jp in range(1, mp + 1):
                        perm[fidx(j, jp) - 1] = fidx(se[j - 1], jp)
                perms[eid] = tuple(perm)
    for u in a.total.vertices:
        pu = a.covering.vmap(u)
        for f in b.total.skeleton.edges:
            eid = f"t:{u}|{f.eid}"
            emap[eid] = f"t:{pu}|{b.covering.emap(f.eid)}"
            if not trivial:
                sf = b.cocycle.of_edge(f.eid)
                perm = [0] * (m * mp)
                for j in range(1, m + 1):
                    for jp in range(1, mp + 1):
                        perm[fidx(j, jp) - 1] = fidx(j, sf[jp - 1])
                perms[eid] = tuple(perm)
    return make_covering_system(base, total, vmap, emap, m=m * mp,
                                edge_perms=perms)


def pn_tower(n: int, levels: int) -> Tower:
    """Levels L_{(n-1)^m} x B_n with the (n-1)-fold cycle covering paired
    with the identity on the bouquet."""
    if n < 2:
        raise UnknownFamily("pn-tower needs n >= 2")
    cycles = []
    bouquets = []
    products = []
    for mlev in range(1, levels + 1):
        tag = f"P{mlev}:"
        cycles.append(make_ln((n - 1) ** mlev, tag=tag))
        bouquets.append(make_bn(n, tag=tag))
        products.append(product_graph(cycles[-1], bouquets[-1]))
    systems = []
    factor_systems = []
    for mlev in range(1, levels):
        big, small = cycles[mlev], cycles[mlev - 1]
        csl = _ring_covering(big, small, (n - 1) ** (mlev + 1),
                             (n - 1) ** mlev, f"P{mlev + 1}:", f"P{mlev}:",
                             "ln")
        vmapb = {f"P{mlev + 1}:w": f"P{mlev}:w"}
        emapb = {f"P{mlev + 1}:l{_pad(i, n)}": f"P{mlev}:l{_pad(i, n)}"
                 for i in range(n)}
        csb = make_covering_system(bouquets[mlev - 1], bouquets[mlev],
                                   vmapb, emapb, m=1)
        factor_systems.append((csl, csb))
        systems.append(product_covering_system(
            csl, csb, base=products[mlev - 1], total=products[mlev]))
    meta = {"family": "pn-tower", "n": n,
            "cycle_lengths": [(n - 1) ** m for m in range(1, levels + 1)],
            "constant_aperiodic_factor": ("bouquet", n),
            "continuation": "repeat-last"}
    return validate_tower(systems, meta)


def delta_tower(bases, generator: IntMatrix | None = None,
                repeats: bool | None = None) -> Tower:
    """Levels Delta_2/H_n for a nested chain of subgroup bases (columns).

    ``generator`` marks a chain of the form B_{n+1} = M B_n; it switches on
    the geometric continuation used by the analysis passes.
    """
    bases = [b if isinstance(b, IntMatrix) else IntMatrix.from_rows(b)
             for b in bases]
    datas = [delta_quotient(2, b, tag=f"L{n + 1}:")
             for n, b in enumerate(bases)]
    systems = []
    for nlev in range(len(bases) - 1):
        systems.append(delta_quotient_covering(datas[nlev], datas[nlev + 1]))
    meta = {"family": "delta-tower", "translation_quotient": True,
            "bases": [b.tolist() for b in bases],
            "quotient_data": tuple(datas)}
    if generator is not None:
        if not isinstance(generator, IntMatrix):
            generator = IntMatrix.from_rows(generator)
        meta["generator"] = generator.tolist()
        if repeats is None:
            repeats = True
    if repeats:
        meta["continuation"] = "repeat-last"
    return validate_tower(systems, meta)


def delta_power_tower(generator, levels: int) -> Tower:
    """delta_tower for H_n = M^n Z^2."""
    m = generator if isinstance(generator, IntMatrix) \
        else IntMatrix.from_rows(generator)
    bases = []
    acc = m
    for _ in range(levels):
        bases.append(acc)
        acc = m * acc
    return delta_tower(bases, generator=m)


def ir_tower(cf_terms, levels: int) -> Tower:
    """The matrix tower of two one-loop components per level whose
    multiplicity matrices multiply out continued-fraction convergents.

    The n-th matrix is the product of the n convergent factors
    phi_j = [[a_j, 1], [1, 0]] for j in the n-th consecutive block, with the
    first two levels relabelled so that the single zero entry sits in
    block (1, 2); all entries are positive from the second matrix on.
    """
    cf_terms = [int(a) for a in cf_terms]
    if any(a < 1 for a in cf_terms):
        raise UnknownFamily("continued-fraction terms must be >= 1")
    need = levels * (levels - 1) // 2
    if len(cf_terms) < need:
        # extend periodically; the declared terms repeat
        reps = (need - len(cf_terms)) // len(cf_terms) + 1
        cf_terms = (cf_terms * (reps + 1))[:need]
    phis = [IntMatrix.from_rows([[a, 1], [1, 0]]) for a in cf_terms]
    swap = IntMatrix.from_rows([[0, 1], [1, 0]])
    mats = []
    t = 0
    for n in range(1, levels):
        block = phis[t:t + n]
        t += n
        acc = IntMatrix.identity(2)
        for p in block:
            acc = acc * p
        mats.append(acc)
    if mats:
        mats[0] = swap * mats[0]          # zero entry moves to (1, 2)
        if len(mats) > 1:
            mats[1] = mats[1] * swap      # compensate the relabelling

    comps = [[make_tk(1, tag=f"L{n}c{i}:") for i in (1, 2)]
             for n in range(1, levels + 1)]
    systems = []
    for n in range(1, levels):
        mult = mats[n - 1]
        blocks = {}
        for i in (1, 2):
            for j in (1, 2):
                mij = mult.entry(i - 1, j - 1)
                if mij == 0:
                    continue
                basec = comps[n - 1][j - 1]
                totc = comps[n][i - 1]
                vmap = {f"L{n + 1}c{i}:v": f"L{n}c{j}:v"}
                emap = {f"L{n + 1}c{i}:c1": f"L{n}c{j}:c1"}
                perm = tuple(list(range(2, mij + 1)) + [1])
                blocks[(i, j)] = make_covering_system(
                    basec, totc, vmap, emap, m=mij,
                    edge_perms={f"L{n + 1}c{i}:c1": perm})
        systems.append(validate_matrix_system(
            comps[n - 1], comps[n], mult.tolist(), blocks))
    meta = {"family": "ir-tower", "cf_terms": cf_terms,
            "multiplicity_matrices": [m.tolist() for m in mats],
            "continuation": "repeat-last"}
    return validate_tower(systems, meta)


# ---------------------------------------------------------------------------
# Subgroup chain checks
# ---------------------------------------------------------------------------

def subgroup_chain_check(bases, generator: IntMatrix | None = None) -> dict:
    """Nestedness (exact) and a trivial-intersection hint.

    The hint is True when a generating matrix (declared, or inferred and
    verified against every level) has all eigenvalue moduli > 1, checked in
    exact rational arithmetic; otherwise "indeterminate": finitely many
    levels never decide triviality of the intersection.
    """
    bases = [b if isinstance(b, IntMatrix) else IntMatrix.from_rows(b)
             for b in bases]
    for b in bases:
        if b.nrows != b.ncols or b.det() == 0:
            raise SingularBasis("chain bases must be square and nonsingular",
                                witness=b)
    nested = True
    for a, b in zip(bases, bases[1:]):
        if solve_many(a, b) is None:
            nested = False
            break
    hint = "indeterminate"
    gen = generator
    if gen is not None:
        if not isinstance(gen, IntMatrix):
            gen = IntMatrix.from_rows(gen)
        # a declared generator is verified, never trusted
        if any(gen * a != b for a, b in zip(bases, bases[1:])):
            raise SingularBasis(
                "declared generator does not generate the chain",
                witness=gen)
    else:
        gen = _infer_generator(bases)
    if nested and gen is not None and _eigenvalues_outside_unit_disk(gen):
        hint = True
    return {"nested": nested, "intersection_trivial_hint": hint,
            "generator": gen.tolist() if gen is not None else None}


def _infer_generator(bases):
    """M with B_{n+1} = M B_n for every step, when one exists over Z.

    At least two agreeing steps are required: a single step always admits
    some M and would make the hint fire on pure coincidence.
    """
    if len(bases) < 3:
        return None
    cand = None
    for a, b in zip(bases, bases[1:]):
        # solve M a = b  <=>  a^t M^t = b^t
        mt = solve_many(a.transpose(), b.transpose())
        if mt is None:
            return None
        m = mt.transpose()
        if cand is None:
            cand = m
        elif cand != m:
            return None
    return cand


def _eigenvalues_outside_unit_disk(m: IntMatrix) -> bool:
    """All eigenvalue moduli > 1, decided exactly for 2x2 matrices via the
    Schur-Cohn test on the reciprocal polynomial; larger sizes must be
    triangular to decide, else a SingularBasis error flags the limitation."""
    k = m.nrows
    if k == 1:
        return abs(m.entry(0, 0)) > 1
    if k == 2:
        tr = m.entry(0, 0) + m.entry(1, 1)
        det = m.det()
        if det == 0:
            return False
        # roots of x^2 - tr x + det outside the unit circle iff the
        # reciprocal x^2 - (tr/det) x + 1/det has both roots inside:
        # |1/det| < 1 and |tr/det| < 1 + 1/det
        b = Fraction(1, det)
        a = Fraction(-tr, det)
        return abs(b) < 1 and abs(a) < 1 + b
    if all(m.entry(i, j) == 0 for i in range(k) for j in range(k) if i > j) \
            or all(m.entry(i, j) == 0 for i in range(k) for j in range(k)
                   if i < j):
        return all(abs(m.entry(i, i)) > 1 for i in range(k))
    raise SingularBasis("eigenvalue test implemented for 2x2 and triangular "
                        "generators", witness=m)


# ---------------------------------------------------------------------------
# Family dispatcher
# ---------------------------------------------------------------------------

def make(family: str, *args, **kwargs):
    """Build a family member by name; see the CLI's ``zoo`` command."""
    family = family.lower().replace("_", "-")
    if family == "dn":
        return make_dn(int(args[0]))
    if family == "ln":
        return make_ln(int(args[0]))
    if family == "bn":
        return make_bn(int(args[0]))
    if family == "tk":
        return make_tk(int(args[0]))
    if family == "delta-quotient":
        k = int(args[0])
        entries = [int(x) for x in args[1:]]
        if len(entries) != k * k:
            raise UnknownFamily(f"delta-quotient needs {k * k} basis entries")
        rows = [entries[i * k:(i + 1) * k] for i in range(k)]
        return delta_quotient(k, IntMatrix.from_rows(rows))
    if family == "dn-tower":
        return dn_tower([int(a) for a in args], **kwargs)
    if family == "bd-tower":
        return bd_tower([int(a) for a in args], **kwargs)
    if family == "pn-tower":
        return pn_tower(int(args[0]), int(args[1]))
    if family == "ir-tower":
        levels = kwargs.pop("levels", None)
        terms = [int(a) for a in args]
        if levels is None:
            levels = 4
        return ir_tower(terms, levels)
    if family == "delta-tower":
        if "generator" in kwargs and "levels" in kwargs:
            return delta_power_tower(kwargs["generator"], kwargs["levels"])
        return delta_tower(list(args), **kwargs)
    raise UnknownFamily(f"unknown family {family!r}")
