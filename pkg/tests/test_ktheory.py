import pytest

from kgcover.covering import make_covering_system
from kgcover.errors import (HasSource, RankTooHigh, TorsionHypothesisFail,
                            WrongRank)
from kgcover.intmat import IntMatrix
from kgcover.kgraph import Skeleton, product_graph, validate_kgraph
from kgcover.ktheory import (AdjacencyData, complex_2graph, induced_kmap,
                             kmap_kunneth, koszul_homology, ktheory_1graph,
                             ktheory_2graph, ktheory_tower, kunneth)
from kgcover.zoo import (bd_tower, delta_power_tower, delta_quotient,
                         delta_quotient_covering, dn_tower, ir_tower,
                         make_bn, make_dn, make_ln, make_tk, pn_tower,
                         psi_vector)

from conftest import t2_graph


DN_TABLE = {0: ((2, ()), (2, ())), 1: ((0, ()), (0, ())),
            2: ((0, (3,)), (0, ())), 3: ((0, (2, 2)), (0, ())),
            4: ((0, (3,)), (0, ())), 5: ((0, ()), (0, ()))}


def test_1graph_families():
    for n in range(1, 19):
        p = ktheory_1graph(make_dn(n))
        assert (p.k0.invariants(), p.k1.invariants()) == DN_TABLE[n % 6], n
    for n in (2, 3, 5, 7):
        p = ktheory_1graph(make_bn(n))
        want = (0, ()) if n == 2 else (0, (n - 1,))
        assert p.k0.invariants() == want and p.k1.invariants() == (0, ())
    for m in (1, 2, 6):
        p = ktheory_1graph(make_ln(m))
        assert p.k0.invariants() == (1, ()) and p.k1.invariants() == (1, ())
        # all m vertex classes agree, so the unit is m times the generator
        assert tuple(abs(x) for x in p.unit_coords()) == (m,)


def test_1graph_guards():
    with pytest.raises(WrongRank):
        ktheory_1graph(t2_graph())
    skel = Skeleton.build(1, ["a", "b"], [("e", 1, "b", "a")])
    g = validate_kgraph(skel, {})
    with pytest.raises(HasSource):
        ktheory_1graph(g)


def test_dn_generator_relation():
    # the vertex classes satisfy [v_i] = -[v_{i+3}] in K0
    for n in (7, 9, 12):
        p = ktheory_1graph(make_dn(n))
        g = p.k0
        for i in range(n):
            vec = [0] * n
            vec[i] += 1
            vec[(i + 3) % n] += 1
            assert g.contains_zero_class(tuple(vec)), (n, i)


def test_2graph_t2():
    p = ktheory_2graph(t2_graph())
    assert p.k0.invariants() == (2, ())
    assert p.k1.invariants() == (2, ())
    assert p.unit_coords() == (1, 0)


def test_2graph_quotient():
    dq = delta_quotient(2, [[2, 0], [0, 3]])
    p = ktheory_2graph(dq.graph)
    assert p.k0.invariants() == (2, ()) and p.k1.invariants() == (2, ())
    u = p.unit_coords()
    assert sorted(map(abs, u)) == [0, 6]
    # adjacency matrices are permutations per color
    adj = AdjacencyData.of(dq.graph)
    for m in adj.matrices:
        assert all(sum(r) == 1 for r in m.rows)
        assert all(sum(m.col(j)) == 1 for j in range(m.ncols))


def test_2graph_product():
    p = ktheory_2graph(product_graph(make_ln(2, "l:"), make_bn(3, "b:")))
    assert p.k0.invariants() == (0, (2,))
    assert p.k1.invariants() == (0, (2,))


def test_complex_identity():
    dq = delta_quotient(2, [[3, 0], [1, 2]])
    d1, d2 = complex_2graph(AdjacencyData.of(dq.graph))
    assert (d1 * d2).is_zero()


def test_koszul():
    t2 = t2_graph()
    groups, conclusive = koszul_homology(t2)
    assert conclusive
    assert [g.invariants() for g in groups] == [(1, ()), (2, ()), (1, ())]
    groups3, conclusive3 = koszul_homology(make_tk(3))
    assert not conclusive3
    assert [g.invariants() for g in groups3] == \
        [(1, ()), (3, ()), (3, ()), (1, ())]
    # rank 1 reduces to (coker, ker)
    g1, c1 = koszul_homology(make_dn(2))
    assert c1 and [g.invariants() for g in g1] == [(0, (3,)), (0, ())]


def test_koszul_matches_2graph_engine():
    for basis in ([[2, 0], [0, 3]], [[1, -1], [1, 1]], [[2, 1], [0, 2]]):
        g = delta_quotient(2, basis).graph
        pair = ktheory_2graph(g)
        groups, _ = koszul_homology(g)
        coker = pair.contexts["coker"].group()
        kernel = pair.contexts["kernel"].group()
        assert groups[0].invariants() == coker.invariants()
        assert groups[1].invariants() == pair.k1.invariants()
        assert groups[2].invariants() == kernel.invariants()


def test_koszul_matches_engine_on_random_2graphs(rng):
    from conftest import random_circulant_2graph
    for _ in range(12):
        g = random_circulant_2graph(rng, max_vertices=4)
        pair = ktheory_2graph(g)
        groups, conclusive = koszul_homology(g)
        assert conclusive
        assert groups[0].invariants() == \
            pair.contexts["coker"].group().invariants()
        assert groups[1].invariants() == pair.k1.invariants()
        assert groups[2].invariants() == \
            pair.contexts["kernel"].group().invariants()


def test_induced_map_dn():
    d6, d12 = make_dn(6, "a:"), make_dn(12, "b:")
    vmap = {f"b:v{i:02d}": f"a:v{i % 6}" for i in range(12)}
    emap = {f"b:x{i:02d}": f"a:x{i % 6}" for i in range(12)}
    emap |= {f"b:y{i:02d}": f"a:y{i % 6}" for i in range(12)}
    cs = make_covering_system(d6, d12, vmap, emap)
    km = induced_kmap(cs)
    assert km.k0.canonical_matrix()[0] == IntMatrix.from_rows([[2, 0], [0, 2]])
    assert km.k1.canonical_matrix()[0] == IntMatrix.identity(2)


def test_induced_map_identity():
    d6 = make_dn(6)
    cs = make_covering_system(d6, d6, {v: v for v in d6.vertices},
                              {e.eid: e.eid for e in d6.skeleton.edges})
    km = induced_kmap(cs)
    assert km.k0.canonical_matrix()[0] == IntMatrix.identity(2)
    assert km.k1.canonical_matrix()[0] == IntMatrix.identity(2)


def test_induced_map_quotient_closed_form():
    dq1 = delta_quotient(2, [[2, 0], [0, 3]], tag="A:")
    dq2 = delta_quotient(2, [[4, 0], [0, 9]], tag="B:")
    cs = delta_quotient_covering(dq1, dq2)
    p1, p2 = ktheory_2graph(dq1.graph), ktheory_2graph(dq2.graph)
    km = induced_kmap(cs, p1, p2)
    index = 6
    n1, n2 = len(dq1.graph.vertices), len(dq2.graph.vertices)
    # coker summand: delta_0 class multiplies by the index
    cok2 = p2.contexts["coker"].group()
    d0_1 = tuple(1 if v == dq1.vertex_id((0, 0)) else 0
                 for v in dq1.graph.vertices)
    d0_2 = tuple(1 if v == dq2.vertex_id((0, 0)) else 0
                 for v in dq2.graph.vertices)
    f_cok = IntMatrix.from_rows([r[:n1] for r in km.k0.matrix.rows[:n2]],
                                ncols=n1)
    img = f_cok.apply(d0_1)
    assert cok2.contains_zero_class(
        tuple(a - index * b for a, b in zip(img, d0_2)))
    # kernel summand: the all-ones class goes to the all-ones class
    ker1, ker2 = p1.contexts["kernel"], p2.contexts["kernel"]
    k_part = IntMatrix.from_rows(
        [r[n1:] for r in km.k0.matrix.rows[n2:]], ncols=km.k0.matrix.ncols - n1)
    assert k_part.apply(ker1.reduce((1,) * n1)) == \
        tuple(ker2.reduce((1,) * n2))
    # K1 is multiplication by the index under the cycle-class isomorphism
    sub1, sub2 = p1.contexts["subquotient"], p2.contexts["subquotient"]
    for h in [(2, 0), (0, 3), (2, 3), (-2, 3)]:
        left = km.k1(sub1.reduce(psi_vector(dq1, h)))
        right = sub2.reduce(psi_vector(dq2, tuple(index * x for x in h)))
        assert sub2.group().contains_zero_class(
            tuple(a - b for a, b in zip(left, right))), h


def test_tower_bd():
    tk = ktheory_tower(bd_tower([2] * 5))
    assert tk.k0.tag == "supernatural"
    assert tk.k0.summands[0][1].to_json() == {"2": "inf"}
    assert tk.k1.tag == "free" and tk.k1.free_rank == 1
    # unit starts at 1 and doubles stage by stage
    assert "[[1], [2], [4], [8], [16], [32]]" in tk.k0.unit_note


def test_tower_bd_mixed_factors():
    # type 6^inf declared through a cycling factor list
    tk = ktheory_tower(bd_tower([2, 3, 2, 3]))
    assert tk.k0.tag == "supernatural"
    assert tk.k0.summands[0][1].to_json() == {"2": "inf", "3": "inf"}
    assert tk.k1.tag == "free" and tk.k1.free_rank == 1


def test_tower_dn():
    tk = ktheory_tower(dn_tower([2] * 4, base=6))
    assert tk.k0.tag == "supernatural"
    assert [s[0] for s in tk.k0.summands] == ["Z[1/a]", "Z[1/a]"]
    assert tk.k1.tag == "free" and tk.k1.free_rank == 2
    assert tk.k0.unit_note == "zero at every stage"
    for m in tk.maps:
        assert m.k0.canonical_matrix()[0] == \
            IntMatrix.from_rows([[2, 0], [0, 2]])
        assert m.k1.canonical_matrix()[0] == IntMatrix.identity(2)


def test_tower_ir_golden():
    tk = ktheory_tower(ir_tower([1, 1, 1], 4))
    assert tk.k0.tag == "free" and tk.k0.free_rank == 2
    assert tk.k1.tag == "free" and tk.k1.free_rank == 2
    for m in tk.maps:
        assert abs(m.k0.matrix.det()) == 1


def test_tower_rank_guard():
    tw = delta_power_tower([[1, -1], [1, 1]], 3)
    from kgcover.construct import build_tower
    tg = build_tower(tw, 3)
    with pytest.raises((RankTooHigh, HasSource, WrongRank)):
        # the 3-graph itself is not a valid tower input for K-theory
        ktheory_2graph(tg.graph)


def test_kunneth_values():
    zl = ktheory_1graph(make_ln(2))          # (Z, Z)
    z2 = ktheory_1graph(make_bn(3, "b:"))    # (Z/2, 0)
    out = kunneth(zl, z2)
    assert out.k0.invariants() == (0, (2,))
    assert out.k1.invariants() == (0, (2,))
    # unit of the tensor: (Z, 0) with unit 1 acts as the identity
    from kgcover.ktheory import GradedKPair
    from kgcover.abgroups import FgAbGroup
    unit_pair = GradedKPair(k0=FgAbGroup(1), k1=FgAbGroup(0),
                            unit_class=(1,), provenance="test",
                            contexts={"kind": "canonical"})
    g = kunneth(unit_pair, z2)
    assert g.k0.invariants() == z2.k0.invariants()
    assert g.k1.invariants() == z2.k1.invariants()
    # coprime torsion: every correction term vanishes, result is trivial
    z3 = ktheory_1graph(make_bn(4, "c:"))    # (Z/3, 0)
    zero = kunneth(z2, z3)
    assert zero.k0.is_trivial() and zero.k1.is_trivial()


def test_kunneth_torsion_guard():
    z2 = ktheory_1graph(make_bn(3, "a:"))
    # a torsion-free factor always passes
    kunneth(z2, ktheory_1graph(make_ln(2, "c:")))
    prod = product_graph(make_ln(2, "l:"), make_bn(3, "m:"))
    torsion_pair = ktheory_2graph(prod)   # (Z/2, Z/2)
    with pytest.raises(TorsionHypothesisFail):
        kunneth(torsion_pair, z2)  # Tor(Z/2, Z/2) does not vanish


def test_kunneth_agrees_with_engine():
    for mlen, bn in [(2, 3), (3, 4), (2, 2)]:
        e = make_ln(mlen, "l:")
        f = make_bn(bn, "b:")
        via_engine = ktheory_2graph(product_graph(e, f))
        via_kunneth = kunneth(ktheory_1graph(e), ktheory_1graph(f))
        assert via_engine.k0.invariants() == via_kunneth.k0.invariants()
        assert via_engine.k1.invariants() == via_kunneth.k1.invariants()


def test_kmap_kunneth():
    # (x2 on (Z,Z)) tensor (id on (Z/2,0)) kills K0 torsion
    from kgcover.abgroups import FgAbGroup, FgAbMap
    from kgcover.ktheory import GradedKMap, GradedKPair
    zz = GradedKPair(k0=FgAbGroup(1), k1=FgAbGroup(1), unit_class=(1,),
                     provenance="test", contexts={"kind": "canonical"})
    z2 = GradedKPair(k0=FgAbGroup.from_orders((2,)), k1=FgAbGroup(0),
                     unit_class=(1,), provenance="test",
                     contexts={"kind": "canonical"})
    f = GradedKMap(k0=FgAbMap(zz.k0, zz.k0, IntMatrix.from_rows([[2]])),
                   k1=FgAbMap.identity(zz.k1))
    g = GradedKMap(k0=FgAbMap.identity(z2.k0), k1=FgAbMap.identity(z2.k1))
    src = kunneth(zz, z2)
    out = kmap_kunneth(f, g, src, src)
    can, _, orders = out.k0.canonical_matrix()
    assert orders == (2,)
    assert can == IntMatrix.from_rows([[0]])  # x2 = 0 on Z/2
    ident = kmap_kunneth(
        GradedKMap(k0=FgAbMap.identity(zz.k0), k1=FgAbMap.identity(zz.k1)),
        g, src, src)
    assert ident.k0.canonical_matrix()[0] == IntMatrix.identity(1)


def test_kmap_kunneth_blockwise_oracle():
    # (ring covering K-map) tensor (bouquet identity): the result's
    # canonical matrices are Kronecker products of the factors'
    d6, d12 = make_dn(6, "ta:"), make_dn(12, "tb:")
    vmap = {f"tb:v{i:02d}": f"ta:v{i % 6}" for i in range(12)}
    emap = {f"tb:x{i:02d}": f"ta:x{i % 6}" for i in range(12)}
    emap |= {f"tb:y{i:02d}": f"ta:y{i % 6}" for i in range(12)}
    km_ring = induced_kmap(make_covering_system(d6, d12, vmap, emap))
    b3 = make_bn(3, "tc:")
    pb = ktheory_1graph(b3)
    km_id = induced_kmap(make_covering_system(
        b3, b3, {v: v for v in b3.vertices},
        {e.eid: e.eid for e in b3.skeleton.edges}), pb, pb)
    src = kunneth(ktheory_1graph(d6), pb)
    tgt = kunneth(ktheory_1graph(d12), pb)
    out = kmap_kunneth(km_ring, km_id, src, tgt)

    def kron(a, b):
        rows = []
        for ra in a:
            for rb in b:
                rows.append([x * y for x in ra for y in rb])
        return rows

    f0 = km_ring.k0.canonical_matrix()[0].tolist()   # [[2,0],[0,2]]
    g0 = km_id.k0.canonical_matrix()[0].tolist()     # [[1]] on Z/2
    # K0 of the tensor pairs: (Z^2 x Z/2) + (Z^2 x 0): block = f0 kron g0
    got0, _, orders0 = out.k0.canonical_matrix()
    want0 = [[x % o if o else x for x, o in zip(row, [2, 2])]
             for row in kron(f0, g0)]
    assert got0.tolist() == want0
    f1 = km_ring.k1.canonical_matrix()[0].tolist()   # identity on Z^2
    got1, _, _ = out.k1.canonical_matrix()
    assert got1.tolist() == kron(f1, g0)


def test_rank3_quotient_koszul():
    # a rank-3 translation quotient exercises the associativity check and
    # the first-page homology route end to end
    dq = delta_quotient(3, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    assert dq.graph.rank == 3 and len(dq.graph.vertices) == 8
    groups, conclusive = koszul_homology(dq.graph)
    assert not conclusive
    assert groups[0].invariants() == (1, ())   # transitive translations
    assert len(groups) == 4


def test_truncation_consistency():
    # classifying at N and N+1 levels gives the same verdict on zoo towers
    cases = [
        (bd_tower([2] * 4), None),
        (dn_tower([2] * 3, base=6), None),
        (delta_power_tower([[1, -1], [1, 1]], 4), None),
        (ir_tower([1, 1, 1], 4), None),
    ]
    for tower, cont in cases:
        full = ktheory_tower(tower, continuation=cont)
        trunc = ktheory_tower(tower, levels=tower.length, continuation=cont)
        for deg in ("k0", "k1"):
            a, b = getattr(full, deg), getattr(trunc, deg)
            if b.tag in ("free", "supernatural"):
                assert a.tag == b.tag
                assert a.describe() == b.describe(), (deg, a, b)


def test_pn_levels_both_routes():
    # level K-theory via the engine and via the tensor formula agree
    for n in (3, 4):
        tw = pn_tower(n, 2)
        g1 = tw.level_graphs()[0][0]
        engine = ktheory_2graph(g1)
        want = (0, (n - 1,)) if n > 2 else (0, ())
        assert engine.k0.invariants() == want
        assert engine.k1.invariants() == want
