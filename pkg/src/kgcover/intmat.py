"""Exact integer matrices: Smith normal form, column echelon, solving.

Everything here is arbitrary-precision integer arithmetic; no floats.
Normal forms are deterministic: pivots are chosen by smallest absolute
value, ties broken by lowest index, so identical inputs always produce
identical outputs.

The Smith form follows the convention A = U * D * V with U, V unimodular
and D diagonal with positive entries satisfying d1 | d2 | ... | dr.  The
inverses of U and V are tracked during elimination instead of being
recomputed, since callers need both directions of the coordinate change.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def _copy(rows):
    return [list(r) for r in rows]


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


class IntMatrix:
    """An immutable integer matrix; tracks its width so 0-row and 0-column
    shapes survive round trips."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows, ncols=None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != width:
                raise ValueError("ncols disagrees with rows")
            ncols = width
        else:
            ncols = 0 if ncols is None else int(ncols)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, *a):
        raise AttributeError("IntMatrix is immutable")

    @staticmethod
    def from_rows(rows, ncols=None) -> "IntMatrix":
        return IntMatrix(rows, ncols)

    @staticmethod
    def from_cols(cols, nrows=None) -> "IntMatrix":
        cols = list(cols)
        if not cols:
            return IntMatrix([[] for _ in range(nrows or 0)], ncols=0)
        return IntMatrix(list(zip(*cols)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(_identity(n), ncols=n)

    @staticmethod
    def zeros(m: int, n: int) -> "IntMatrix":
        return IntMatrix([[0] * n for _ in range(m)], ncols=n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def cols(self):
        return [self.col(j) for j in range(self.ncols)]

    def entry(self, i, j) -> int:
        return self.rows[i][j]

    def tolist(self):
        return [list(r) for r in self.rows]

    def transpose(self) -> "IntMatrix":
        if not self.rows:
            return IntMatrix([[] for _ in range(self.ncols)], ncols=0)
        return IntMatrix(list(zip(*self.rows)), ncols=self.nrows)

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.ncols == other.ncols
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.rows, self.ncols))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.rows]!r})"

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix((tuple(a + b for a, b in zip(ra, rb))
                          for ra, rb in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix((tuple(a - b for a, b in zip(ra, rb))
                          for ra, rb in zip(self.rows, other.rows)), self.ncols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix((tuple(-a for a in r) for r in self.rows), self.ncols)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix((tuple(c * a for a in r) for r in self.rows), self.ncols)

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows)) if other.rows else []
        if not cols:
            return IntMatrix([[0] * other.ncols for _ in range(self.nrows)]
                             if other.ncols else [[] for _ in range(self.nrows)],
                             ncols=other.ncols)
        return IntMatrix((tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                          for r in self.rows), other.ncols)

    def apply(self, vec):
        """Matrix times column vector, returned as a tuple."""
        if self.ncols != len(vec):
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.rows)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise ValueError("shape mismatch")
        return IntMatrix((tuple(ra) + tuple(rb)
                          for ra, rb in zip(self.rows, other.rows)),
                         self.ncols + other.ncols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows + other.rows, self.ncols)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("det of non-square matrix")
        if n == 0:
            return 1
        m = _copy(self.rows)
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


def block_diag(*mats: IntMatrix) -> IntMatrix:
    total_r = sum(m.nrows for m in mats)
    total_c = sum(m.ncols for m in mats)
    out = [[0] * total_c for _ in range(total_r)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.rows):
            out[r0 + i][c0:c0 + m.ncols] = list(row)
        r0 += m.nrows
        c0 += m.ncols
    return IntMatrix(out, ncols=total_c)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SnfResult:
    """A = U * D * V with U, V unimodular, D diagonal, d1 | d2 | ... | dr > 0."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    Uinv: IntMatrix
    Vinv: IntMatrix

    @property
    def diagonal(self):
        n = min(self.D.nrows, self.D.ncols)
        return tuple(self.D.entry(i, i) for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


class _Smith:
    """Elimination workspace maintaining A = U * M * V throughout.

    To keep every inner update a list comprehension (no per-row python
    loops), U is stored transposed and Vinv is stored transposed: a row
    operation on M then touches whole rows of Ut/Uinv, and a column
    operation on M is performed as a row operation on the transposed M
    (see the sweep drivers), touching whole rows of V/VinvT.
    """

    def __init__(self, rows, m, n, track):
        self.m, self.n = m, n
        self.M = rows
        self.track = track
        if track:
            self.Ut = _identity(m)      # U transposed
            self.Uinv = _identity(m)
            self.V = _identity(n)
            self.VinvT = _identity(n)   # Vinv transposed

    # Row ops act on M on the left; U absorbs the inverse on its right:
    # U' = U (I - qE_ij)  <=>  Ut row j -= q * Ut row i.
    def row_add(self, i, j, q):
        # R_i += q * R_j
        if q == 0:
            return
        self.M[i] = [a + q * b for a, b in zip(self.M[i], self.M[j])]
        if self.track:
            self.Uinv[i] = [a + q * b
                            for a, b in zip(self.Uinv[i], self.Uinv[j])]
            self.Ut[j] = [a - q * b for a, b in zip(self.Ut[j], self.Ut[i])]

    def row_swap(self, i, j):
        if i == j:
            return
        self.M[i], self.M[j] = self.M[j], self.M[i]
        if self.track:
            self.Uinv[i], self.Uinv[j] = self.Uinv[j], self.Uinv[i]
            self.Ut[i], self.Ut[j] = self.Ut[j], self.Ut[i]

    def row_negate(self, i):
        self.M[i] = [-a for a in self.M[i]]
        if self.track:
            self.Uinv[i] = [-a for a in self.Uinv[i]]
            self.Ut[i] = [-a for a in self.Ut[i]]

    # Column ops on M, used only by the small divisibility fixes at the
    # end (the sweeps go through the transposed row path instead):
    # M' = M (I + qE_ij) adds q * C_i to C_j; V absorbs the inverse on its
    # left and VinvT picks up the op transposed.
    def col_add(self, j, i, q):
        # C_j += q * C_i
        if q == 0:
            return
        for r in self.M:
            r[j] += q * r[i]
        if self.track:
            self.VinvT[j] = [a + q * b
                             for a, b in zip(self.VinvT[j], self.VinvT[i])]
            self.V[i] = [a - q * b for a, b in zip(self.V[i], self.V[j])]

    def col_swap(self, i, j):
        if i == j:
            return
        for r in self.M:
            r[i], r[j] = r[j], r[i]
        if self.track:
            self.VinvT[i], self.VinvT[j] = self.VinvT[j], self.VinvT[i]
            self.V[i], self.V[j] = self.V[j], self.V[i]

    def col_negate(self, j):
        for r in self.M:
            r[j] = -r[j]
        if self.track:
            self.VinvT[j] = [-a for a in self.VinvT[j]]
            self.V[j] = [-a for a in self.V[j]]

    # Transposed-side row ops: with M replaced by its transpose, a row op
    # on Mt is a column op on M, so the V pair absorbs it: row i of Mt
    # += q * row j  <=>  C_i += q * C_j on M, V' = (I - qE_ji) V.
    def trow_add(self, Mt, i, j, q):
        if q == 0:
            return
        Mt[i] = [a + q * b for a, b in zip(Mt[i], Mt[j])]
        if self.track:
            self.VinvT[i] = [a + q * b
                             for a, b in zip(self.VinvT[i], self.VinvT[j])]
            self.V[j] = [a - q * b for a, b in zip(self.V[j], self.V[i])]

    def trow_swap(self, Mt, i, j):
        if i == j:
            return
        Mt[i], Mt[j] = Mt[j], Mt[i]
        if self.track:
            self.VinvT[i], self.VinvT[j] = self.VinvT[j], self.VinvT[i]
            self.V[i], self.V[j] = self.V[j], self.V[i]

    def trow_negate(self, Mt, i):
        Mt[i] = [-a for a in Mt[i]]
        if self.track:
            self.VinvT[i] = [-a for a in self.VinvT[i]]
            self.V[i] = [-a for a in self.V[i]]


def _col_sweep(ws: "_Smith"):
    """Column-Hermite pass: echelon by columns with entries in pivot rows
    fully reduced; column operations only.  Keeping every entry that shares
    a row with a pivot reduced below that pivot is what prevents the
    exponential intermediate swell of naive Smith elimination."""
    m, n, M = ws.m, ws.n, ws.M
    pivots = []
    c = 0
    for r in range(m):
        if c >= n:
            break
        # Euclid among the active columns of row r
        while True:
            best = None
            for j in range(c, n):
                a = M[r][j]
                if a != 0:
                    v = abs(a)
                    if best is None or v < best[0]:
                        best = (v, j)
                        if v == 1:
                            break
            if best is None:
                break
            ws.col_swap(c, best[1])
            done = True
            piv = M[r][c]
            for j in range(c + 1, n):
                if M[r][j] != 0:
                    ws.col_add(j, c, -(M[r][j] // piv))
                    if M[r][j] != 0:
                        done = False
            if done:
                break
        if best is None:
            continue
        if M[r][c] < 0:
            ws.col_negate(c)
        piv = M[r][c]
        # fully reduce earlier pivot columns against this pivot
        for cc in range(c):
            q = M[r][cc] // piv
            if q:
                ws.col_add(cc, c, -q)
        pivots.append((r, c))
        c += 1
    return pivots


def _row_sweep(ws: "_Smith"):
    """Row-Hermite pass, symmetric to :func:`_col_sweep`."""
    m, n, M = ws.m, ws.n, ws.M
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        while True:
            best = None
            for i in range(r, m):
                a = M[i][c]
                if a != 0:
                    v = abs(a)
                    if best is None or v < best[0]:
                        best = (v, i)
                        if v == 1:
                            break
            if best is None:
                break
            ws.row_swap(r, best[1])
            done = True
            piv = M[r][c]
            for i in range(r + 1, m):
                if M[i][c] != 0:
                    ws.row_add(i, r, -(M[i][c] // piv))
                    if M[i][c] != 0:
                        done = False
            if done:
                break
        if best is None:
            continue
        if M[r][c] < 0:
            ws.row_negate(r)
        piv = M[r][c]
        for rr in range(r):
            q = M[rr][c] // piv
            if q:
                ws.row_add(rr, r, -q)
        pivots.append((r, c))
        r += 1
    return pivots


def _is_diagonal_rows(M, m, n):
    for i in range(m):
        for j in range(n):
            if i != j and M[i][j] != 0:
                return False
    return True


def _smith_eliminate(ws: "_Smith"):
    """Alternate row and column sweeps until the matrix is diagonal with the
    nonzero entries leading; returns the rank."""
    m, n, M = ws.m, ws.n, ws.M
    for _ in range(4 * (m + n) + 8):
        if _is_diagonal_rows(M, m, n):
            break
        _col_sweep(ws)
        if _is_diagonal_rows(M, m, n):
            break
        _row_sweep(ws)
    else:
        raise RuntimeError("Smith elimination failed to converge")
    rank = 0
    # gather nonzero diagonal entries to the front
    limit = min(m, n)
    for k in range(limit):
        if M[k][k] == 0:
            found = None
            for t in range(k + 1, limit):
                if M[t][t] != 0:
                    found = t
                    break
            if found is None:
                break
            ws.row_swap(k, found)
            ws.col_swap(k, found)
        if M[k][k] < 0:
            ws.row_negate(k)
        rank += 1
    return rank


def _fix_pair(ws: "_Smith", k):
    """Rediagonalize the 2x2 block at k after a divisibility fold."""
    M = ws.M
    while M[k + 1][k] != 0 or M[k][k + 1] != 0:
        while M[k + 1][k] != 0:
            a = M[k][k]
            if a == 0:
                ws.row_swap(k, k + 1)
                continue
            q = M[k + 1][k] // a
            ws.row_add(k + 1, k, -q)
            if M[k + 1][k] != 0:
                ws.row_swap(k, k + 1)
        while M[k][k + 1] != 0:
            a = M[k][k]
            if a == 0:
                ws.col_swap(k, k + 1)
                continue
            q = M[k][k + 1] // a
            ws.col_add(k + 1, k, -q)
            if M[k][k + 1] != 0:
                ws.col_swap(k, k + 1)
    if M[k][k] < 0:
        ws.row_negate(k)
    if M[k + 1][k + 1] < 0:
        ws.row_negate(k + 1)


def smith_normal_form(A: IntMatrix) -> SnfResult:
    """Smith normal form with unimodular transforms and their inverses."""
    m, n = A.nrows, A.ncols
    ws = _Smith(_copy(A.rows), m, n, track=True)
    rank = _smith_eliminate(ws)
    M = ws.M
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a, b = M[i][i], M[i + 1][i + 1]
            if a != 0 and b % a != 0:
                ws.col_add(i, i + 1, 1)
                _fix_pair(ws, i)
                changed = True
    D_rows = [[M[i][j] if i == j else 0 for j in range(n)] for i in range(m)]
    return SnfResult(U=IntMatrix(ws.U, ncols=m), D=IntMatrix(D_rows, ncols=n),
                     V=IntMatrix(ws.V, ncols=n),
                     Uinv=IntMatrix(ws.Uinv, ncols=m),
                     Vinv=IntMatrix(ws.Vinv, ncols=n))


def smith_diagonal(A: IntMatrix):
    """Just the nonzero invariant factors (no transform tracking; faster)."""
    ws = _Smith(_copy(A.rows), A.nrows, A.ncols, track=False)
    rank = _smith_eliminate(ws)
    diag = [abs(ws.M[i][i]) for i in range(rank)]
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            g = gcd(a, b)
            diag[i], diag[j] = g, a // g * b
    return tuple(diag)


# ---------------------------------------------------------------------------
# Column echelon form, kernels, and solving
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnEchelon:
    """A * V = H with V unimodular and H in column echelon form.

    ``pivots`` lists (row, col) pivot positions in echelon order; columns of
    H beyond the pivots are zero, and the matching columns of V form a basis
    of the integer kernel of A.  Kernels of integer matrices are saturated,
    so this basis generates the kernel exactly, not just a finite-index
    sublattice.
    """

    H: IntMatrix
    V: IntMatrix
    pivots: tuple

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel_basis(self) -> IntMatrix:
        pivot_cols = {c for _, c in self.pivots}
        free = [j for j in range(self.V.ncols) if j not in pivot_cols]
        return IntMatrix.from_cols([self.V.col(j) for j in free],
                                   nrows=self.V.nrows)


def column_echelon(A: IntMatrix) -> ColumnEchelon:
    m, n = A.nrows, A.ncols
    M = _copy(A.rows)
    V = _identity(n)

    def col_add(j, i, q):
        if q:
            for r in M:
                r[j] += q * r[i]
            for r in V:
                r[j] += q * r[i]

    def col_swap(i, j):
        if i != j:
            for r in M:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]

    def col_negate(j):
        for r in M:
            r[j] = -r[j]
        for r in V:
            r[j] = -r[j]

    pivots = []
    next_col = 0
    for r in range(m):
        if next_col >= n:
            break
        found = False
        while True:
            best = None
            for j in range(next_col, n):
                a = M[r][j]
                if a != 0:
                    v = abs(a)
                    if best is None or v < best[0]:
                        best = (v, j)
                        if v == 1:
                            break
            if best is None:
                break
            found = True
            col_swap(next_col, best[1])
            done = True
            for j in range(next_col + 1, n):
                if M[r][j] != 0:
                    q = M[r][j] // M[r][next_col]
                    col_add(j, next_col, -q)
                    if M[r][j] != 0:
                        done = False
            if done:
                break
        if found:
            if M[r][next_col] < 0:
                col_negate(next_col)
            piv = M[r][next_col]
            # keep earlier pivot columns reduced in this row (bounds growth)
            for cc in range(next_col):
                q = M[r][cc] // piv
                if q:
                    col_add(cc, next_col, -q)
            pivots.append((r, next_col))
            next_col += 1
    return ColumnEchelon(H=IntMatrix(M, ncols=n), V=IntMatrix(V, ncols=n),
                         pivots=tuple(pivots))


def kernel_basis(A: IntMatrix) -> IntMatrix:
    return column_echelon(A).kernel_basis()


def solve_one(ech: ColumnEchelon, b):
    """An integer x with A x = b given echelon data of A, else None."""
    n = ech.V.ncols
    y = [0] * n
    b = list(b)
    for r, c in ech.pivots:
        acc = b[r]
        for rr, cc in ech.pivots:
            if cc == c:
                break
            acc -= ech.H.entry(r, cc) * y[cc]
        piv = ech.H.entry(r, c)
        if acc % piv != 0:
            return None
        y[c] = acc // piv
    for r in range(ech.H.nrows):
        acc = 0
        for _, cc in ech.pivots:
            acc += ech.H.entry(r, cc) * y[cc]
        if acc != b[r]:
            return None
    return tuple(ech.V.apply(y))


def solve(A: IntMatrix, b):
    """An integer solution x of A x = b, or None if none exists."""
    return solve_one(column_echelon(A), b)


def solve_many(A: IntMatrix, B: IntMatrix):
    """Integer X with A X = B, or None; echelonizes A once."""
    if A.nrows != B.nrows:
        raise ValueError("shape mismatch")
    ech = column_echelon(A)
    cols = []
    for j in range(B.ncols):
        x = solve_one(ech, B.col(j))
        if x is None:
            return None
        cols.append(x)
    return IntMatrix.from_cols(cols, nrows=A.ncols)


def in_column_span(A: IntMatrix, b) -> bool:
    return solve(A, b) is not None


def rank(A: IntMatrix) -> int:
    return column_echelon(A).rank
