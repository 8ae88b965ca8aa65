import random

from kgcover.intmat import (IntMatrix, block_diag, column_echelon,
                            in_column_span, kernel_basis, rank,
                            smith_diagonal, smith_normal_form, solve,
                            solve_many)


def check_snf(a):
    r = smith_normal_form(a)
    assert r.U * r.D * r.V == a
    assert abs(r.U.det()) == 1
    assert abs(r.V.det()) == 1
    assert r.U * r.Uinv == IntMatrix.identity(a.nrows)
    assert r.V * r.Vinv == IntMatrix.identity(a.ncols)
    diag = list(r.diagonal)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0
    # zeros come after the nonzero entries
    assert diag[:len(nonzero)] == nonzero
    assert tuple(nonzero) == smith_diagonal(a)
    return nonzero


def test_snf_examples():
    assert check_snf(IntMatrix.from_rows([[2, 0], [0, 3]])) == [1, 6]
    assert check_snf(IntMatrix.from_rows([[1, -2], [-2, 1]])) == [1, 3]
    assert check_snf(IntMatrix.zeros(3, 2)) == []
    z = smith_normal_form(IntMatrix.zeros(2, 2))
    assert z.D.is_zero()


def test_snf_random():
    r = random.Random(7)
    for _ in range(250):
        m, n = r.randint(1, 7), r.randint(1, 7)
        a = IntMatrix.from_rows(
            [[r.randint(-9, 9) for _ in range(n)] for _ in range(m)])
        check_snf(a)


def test_echelon_and_kernel():
    r = random.Random(11)
    for _ in range(250):
        m, n = r.randint(1, 6), r.randint(1, 6)
        a = IntMatrix.from_rows(
            [[r.randint(-6, 6) for _ in range(n)] for _ in range(m)])
        ech = column_echelon(a)
        assert a * ech.V == ech.H
        assert abs(ech.V.det()) == 1
        k = ech.kernel_basis()
        if k.ncols:
            assert (a * k).is_zero()
        assert k.ncols + ech.rank == n


def test_kernel_is_saturated():
    # kernel of [2 2] is generated by (1, -1), not just (2, -2)
    k = kernel_basis(IntMatrix.from_rows([[2, 2]]))
    assert k.ncols == 1
    col = [k.entry(0, 0), k.entry(1, 0)]
    assert sorted(map(abs, col)) == [1, 1]


def test_solve():
    r = random.Random(13)
    for _ in range(200):
        m, n = r.randint(1, 5), r.randint(1, 5)
        a = IntMatrix.from_rows(
            [[r.randint(-5, 5) for _ in range(n)] for _ in range(m)])
        x = [r.randint(-4, 4) for _ in range(n)]
        b = a.apply(x)
        s = solve(a, b)
        assert s is not None and a.apply(s) == b
    assert solve(IntMatrix.from_rows([[2, 0], [0, 2]]), (1, 0)) is None
    assert in_column_span(IntMatrix.from_rows([[2, 0], [0, 2]]), (4, -2))


def test_solve_many_and_blocks():
    a = IntMatrix.from_rows([[2, 1], [0, 3]])
    b = a * IntMatrix.from_rows([[1, 0, 2], [3, -1, 0]])
    x = solve_many(a, b)
    assert a * x == b
    d = block_diag(IntMatrix.identity(2), IntMatrix.from_rows([[5]]))
    assert d.shape == (3, 3) and d.entry(2, 2) == 5
    # empty right-hand side keeps its shape
    e = solve_many(a, IntMatrix.zeros(2, 0))
    assert e.shape == (2, 0)


def test_det_and_shapes():
    assert IntMatrix.from_rows([[1, -1], [1, 1]]).det() == 2
    assert IntMatrix.identity(4).det() == 1
    assert IntMatrix.from_rows([[1, 2], [2, 4]]).det() == 0
    t = IntMatrix.zeros(3, 0).transpose()
    assert t.shape == (0, 3)
    assert rank(IntMatrix.from_rows([[1, 2], [2, 4]])) == 1


def test_determinism():
    a = IntMatrix.from_rows([[4, 6, 2], [2, -8, 3], [0, 5, 5]])
    r1 = smith_normal_form(a)
    r2 = smith_normal_form(a)
    assert r1.U == r2.U and r1.V == r2.V and r1.D == r2.D
