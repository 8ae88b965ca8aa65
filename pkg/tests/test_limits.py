from kgcover.abgroups import FgAbGroup, FgAbMap
from kgcover.intmat import IntMatrix
from kgcover.limits import (DirectSystem, SupernaturalNumber, classify,
                            equal_in_limit)


Z = FgAbGroup(1)
Z2 = FgAbGroup(1, IntMatrix.from_rows([[2]]))


def times(group, c):
    return FgAbMap(group, group, IntMatrix.from_rows([[c]]))


def test_supernatural_numbers():
    a = SupernaturalNumber.from_factors([2, 2, 2], repeats=True)
    assert a.to_json() == {"2": "inf"}
    b = SupernaturalNumber.from_factors([6, 10])
    assert b.to_json() == {"2": 2, "3": 1, "5": 1}
    assert b.is_finite() and not a.is_finite()
    assert a.describe() == "2^inf"


def test_z_one_half():
    ds = DirectSystem(groups=(Z, Z, Z), maps=(times(Z, 2), times(Z, 2)),
                      continuation=("repeat-last",), distinguished=(1,))
    c = classify(ds)
    assert c.tag == "supernatural"
    assert len(c.summands) == 1 and c.summands[0][0] == "Z[1/a]"
    assert c.summands[0][1].to_json() == {"2": "inf"}
    assert c.unit == (4,)  # 1 -> 2 -> 4 along the stages


def test_no_rule_no_supernatural():
    # without a continuation rule the multipliers never produce Z[1/2]
    ds = DirectSystem(groups=(Z, Z, Z), maps=(times(Z, 2), times(Z, 2)))
    c = classify(ds)
    assert c.tag in ("stabilized", "unclassified")
    assert not c.exact
    assert c.recipe  # generating matrices reported verbatim


def test_torsion_killed():
    ds = DirectSystem(groups=(Z2, Z2, Z2),
                      maps=(times(Z2, 2), times(Z2, 2)),
                      continuation=("repeat-last",))
    c = classify(ds)
    assert c.tag == "supernatural" and c.summands == ()
    assert c.describe() == "0"


def test_unimodular_system_free():
    g = FgAbGroup(2)
    m1 = FgAbMap(g, g, IntMatrix.from_rows([[1, 0], [1, 1]]))
    m2 = FgAbMap(g, g, IntMatrix.from_rows([[2, 1], [1, 1]]))
    ds = DirectSystem(groups=(g, g, g), maps=(m1, m2))
    c = classify(ds)
    assert c.tag == "free" and c.free_rank == 2
    # extending by one more unimodular stage keeps the verdict
    m3 = FgAbMap(g, g, IntMatrix.from_rows([[3, 2], [1, 1]]))
    ds2 = DirectSystem(groups=(g, g, g, g), maps=(m1, m2, m3))
    c2 = classify(ds2)
    assert c2.tag == "free" and c2.free_rank == 2


def test_stabilized_iso_with_torsion():
    g = FgAbGroup.from_orders((2, 0))
    f = FgAbMap.identity(g)
    ds = DirectSystem(groups=(g, g, g), maps=(f, f),
                      continuation=("repeat-last",))
    c = classify(ds)
    assert c.tag == "stabilized" and c.exact
    assert "Z" in c.describe() and "Z/2" in c.describe()


def test_mixed_supernatural_and_free():
    g = FgAbGroup(2)
    step = FgAbMap(g, g, IntMatrix.from_rows([[2, 0], [0, 1]]))
    ds = DirectSystem(groups=(g, g, g), maps=(step, step),
                      continuation=("repeat-last",), distinguished=(3, 0))
    c = classify(ds)
    assert c.tag == "supernatural"
    kinds = sorted(s[0] for s in c.summands)
    assert kinds == ["Z", "Z[1/a]"]


def test_push_forward_functorial():
    g = FgAbGroup(2)
    m1 = FgAbMap(g, g, IntMatrix.from_rows([[1, 1], [0, 1]]))
    m2 = FgAbMap(g, g, IntMatrix.from_rows([[2, 0], [0, 3]]))
    ds = DirectSystem(groups=(g, g, g), maps=(m1, m2))
    v = (1, -2)
    direct = ds.push_forward(1, v, 3)
    stepwise = ds.push_forward(2, ds.push_forward(1, v, 2), 3)
    assert direct == stepwise


def test_equal_in_limit():
    ds = DirectSystem(groups=(Z, Z, Z), maps=(times(Z, 2), times(Z, 2)),
                      continuation=("repeat-last",))
    assert equal_in_limit(ds, 1, (1,), 2, (2,)) is True
    assert equal_in_limit(ds, 1, (1,), 1, (3,)) is False
    ds_trunc = DirectSystem(groups=(Z, Z), maps=(times(Z, 2),))
    assert equal_in_limit(ds_trunc, 1, (1,), 1, (3,)) == "indeterminate"
    # non-injective tail: eventual equality is found by semideciding
    g = FgAbGroup.from_orders((4,))
    f = FgAbMap(g, g, IntMatrix.from_rows([[2]]))
    ds2 = DirectSystem(groups=(g, g), maps=(f,),
                       continuation=("repeat-last",))
    assert equal_in_limit(ds2, 1, (1,), 1, (3,)) is True  # both die mod 4


def test_periodic_continuation():
    # alternating x2, x3 forever: the limit inverts both primes
    ds = DirectSystem(groups=(Z, Z, Z), maps=(times(Z, 2), times(Z, 3)),
                      continuation=("periodic",))
    c = classify(ds)
    assert c.tag == "supernatural"
    assert c.summands[0][1].to_json() == {"2": "inf", "3": "inf"}
    # repeat-last on the same data only inverts the last multiplier
    ds2 = DirectSystem(groups=(Z, Z, Z), maps=(times(Z, 2), times(Z, 3)),
                      continuation=("repeat-last",))
    assert classify(ds2).summands[0][1].to_json() == {"3": "inf"}
    # a periodic zero map kills everything
    ds3 = DirectSystem(groups=(Z, Z, Z), maps=(times(Z, 2), times(Z, 0)),
                       continuation=("periodic",))
    assert classify(ds3).describe() == "0"
    # torsion under a periodic cycle uses the period product
    g6 = FgAbGroup.from_orders((6,))
    f5 = FgAbMap(g6, g6, IntMatrix.from_rows([[5]]))
    f2 = FgAbMap(g6, g6, IntMatrix.from_rows([[2]]))
    ds4 = DirectSystem(groups=(g6, g6, g6), maps=(f5, f2),
                       continuation=("periodic",))
    c4 = classify(ds4)
    assert c4.tag == "supernatural" and c4.summands == (("Z/d", 3),)


def test_geometric_continuation():
    g = FgAbGroup(1)
    ds = DirectSystem(groups=(g, g), maps=(times(g, 3),),
                      continuation=("geometric", IntMatrix.from_rows([[3]])))
    c = classify(ds)
    assert c.tag == "supernatural"
    assert c.summands[0][1].to_json() == {"3": "inf"}
