"""Finitely generated abelian groups as integer-matrix presentations.

A group is Z^n / (column span of R) for an ambient rank n and relation
matrix R.  Canonical invariants (free rank, torsion coefficients) come from
the Smith form of R.  Homomorphisms are integer matrices on ambient
coordinates together with a well-definedness certificate: an explicit X
with R_target * X = F * R_source, verified exactly.

Presentation contexts package the three shapes that arise downstream:

* cokernel contexts, Z^n / Im(M);
* kernel contexts, ker(M) with an explicit lattice basis as coordinates;
* subquotient contexts, ker(Z) / Im(B), stored in kernel-basis coordinates.

Each context can reduce an ambient vector to its own coordinates and can
induce maps into another context of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotAComplex, NotWellDefined
from .intmat import (IntMatrix, block_diag, column_echelon, kernel_basis,
                     smith_diagonal, smith_normal_form, solve_many, solve_one)


class FgAbGroup:
    """Z^ambient modulo the column span of ``relations``."""

    __slots__ = ("ambient", "relations", "_snf", "_invariants", "_canonical")

    def __init__(self, ambient: int, relations: IntMatrix | None = None):
        if relations is None:
            relations = IntMatrix.zeros(ambient, 0)
        if relations.nrows != ambient:
            raise ValueError("relation matrix must have `ambient` rows")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "_snf", None)
        object.__setattr__(self, "_invariants", None)
        object.__setattr__(self, "_canonical", None)

    def __setattr__(self, *a):
        raise AttributeError("FgAbGroup is immutable")

    @staticmethod
    def free(rank: int) -> "FgAbGroup":
        return FgAbGroup(rank)

    @staticmethod
    def cyclic(order: int) -> "FgAbGroup":
        if order == 0:
            return FgAbGroup(1)
        return FgAbGroup(1, IntMatrix.from_rows([[order]]))

    @staticmethod
    def from_orders(orders) -> "FgAbGroup":
        """Direct sum of cyclic groups; order 0 means an infinite summand."""
        orders = list(orders)
        n = len(orders)
        cols = [[orders[i] if j == i else 0 for i in range(n)]
                for j in range(n) if orders[j] != 0]
        return FgAbGroup(n, IntMatrix.from_cols(cols, nrows=n))

    # -- canonical invariants -------------------------------------------

    def invariants(self):
        """(free_rank, torsion) with torsion a divisibility chain, each > 1."""
        if self._invariants is None:
            if self._canonical is not None:
                orders = self._canonical.orders
                inv = (sum(1 for o in orders if o == 0),
                       tuple(sorted(o for o in orders if o > 1)))
            else:
                diag = smith_diagonal(self.relations)
                inv = (self.ambient - len(diag),
                       tuple(d for d in diag if d > 1))
            object.__setattr__(self, "_invariants", inv)
        return self._invariants

    @property
    def free_rank(self) -> int:
        return self.invariants()[0]

    @property
    def torsion(self):
        return self.invariants()[1]

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def order(self):
        """Group order, or None when infinite."""
        free, tors = self.invariants()
        if free:
            return None
        n = 1
        for d in tors:
            n *= d
        return n

    def isomorphic(self, other: "FgAbGroup") -> bool:
        return self.invariants() == other.invariants()

    def __repr__(self):
        return f"FgAbGroup(rank={self.free_rank}, torsion={list(self.torsion)})"

    def describe(self) -> str:
        free, tors = self.invariants()
        parts = ["Z"] * free + [f"Z/{d}" for d in tors]
        return " + ".join(parts) if parts else "0"

    # -- element operations ----------------------------------------------

    def _rel_echelon(self):
        if self._snf is None:
            object.__setattr__(self, "_snf", column_echelon(self.relations))
        return self._snf

    def contains_zero_class(self, vec) -> bool:
        """True when ``vec`` lies in the relation span (represents 0)."""
        return solve_one(self._rel_echelon(), vec) is not None

    def classes_equal(self, a, b) -> bool:
        return self.contains_zero_class(tuple(x - y for x, y in zip(a, b)))

    def canonical(self) -> "CanonicalForm":
        if self._canonical is None:
            object.__setattr__(self, "_canonical", canonical_form(self))
            if self._invariants is None:
                self.invariants()
        return self._canonical

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup(self.ambient + other.ambient,
                         block_diag(self.relations, other.relations))


@dataclass(frozen=True)
class CanonicalForm:
    """Coordinates for Z^n/Im(R) as a sum of cyclic groups.

    ``orders`` lists one order per surviving generator (0 for infinite).
    ``reduce_rows`` maps ambient vectors to generator coordinates;
    ``lift_cols`` sends a generator to an ambient representative.
    """

    group: FgAbGroup
    orders: tuple
    reduce_rows: IntMatrix   # len(orders) x ambient
    lift_cols: IntMatrix     # ambient x len(orders)

    def coords(self, vec):
        raw = self.reduce_rows.apply(vec)
        return tuple(x % d if d else x for x, d in zip(raw, self.orders))


def canonical_form(group: FgAbGroup) -> CanonicalForm:
    n = group.ambient
    snf = smith_normal_form(group.relations)
    diag = list(snf.diagonal) + [0] * (n - min(group.relations.ncols, n))
    diag = diag[:n]
    keep = [i for i, d in enumerate(diag) if d != 1]
    orders = tuple(diag[i] for i in keep)
    reduce_rows = IntMatrix.from_rows([snf.Uinv.row(i) for i in keep], ncols=n)
    lift_cols = IntMatrix.from_cols([snf.U.col(i) for i in keep], nrows=n)
    return CanonicalForm(group=group, orders=orders,
                         reduce_rows=reduce_rows, lift_cols=lift_cols)


class FgAbMap:
    """A homomorphism between presented groups, given on ambient coordinates.

    The certificate is an integer matrix X with
    ``target.relations * X == matrix * source.relations``; it is checked at
    construction so an invalid map can never circulate.
    """

    __slots__ = ("source", "target", "matrix", "certificate")

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix,
                 certificate: IntMatrix | None = None):
        if matrix.shape != (target.ambient, source.ambient):
            raise ValueError("matrix shape does not match ambients")
        if certificate is None:
            certificate = solve_many(target.relations,
                                     matrix * source.relations)
            if certificate is None:
                raise NotWellDefined(
                    "matrix does not carry source relations into target relations",
                    witness=matrix)
        else:
            if not (target.relations * certificate == matrix * source.relations):
                raise NotWellDefined("invalid certificate", witness=certificate)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "certificate", certificate)

    def __setattr__(self, *a):
        raise AttributeError("FgAbMap is immutable")

    @staticmethod
    def trusted(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix,
                certificate: IntMatrix) -> "FgAbMap":
        """Skip certificate re-verification; for callers that have already
        established target.relations * certificate == matrix * source.relations
        by an exact computation of their own."""
        if matrix.shape != (target.ambient, source.ambient):
            raise ValueError("matrix shape does not match ambients")
        if certificate.shape != (target.relations.ncols,
                                 source.relations.ncols):
            raise ValueError("certificate shape mismatch")
        obj = object.__new__(FgAbMap)
        object.__setattr__(obj, "source", source)
        object.__setattr__(obj, "target", target)
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "certificate", certificate)
        return obj

    @staticmethod
    def identity(group: FgAbGroup) -> "FgAbMap":
        return FgAbMap(group, group, IntMatrix.identity(group.ambient))

    def __call__(self, vec):
        return self.matrix.apply(vec)

    def compose(self, earlier: "FgAbMap") -> "FgAbMap":
        """self after earlier (source of self must be target of earlier)."""
        if earlier.target is not self.source and \
                earlier.target.relations != self.source.relations:
            raise ValueError("composition mismatch")
        return FgAbMap(earlier.source, self.target,
                       self.matrix * earlier.matrix)

    def direct_sum(self, other: "FgAbMap") -> "FgAbMap":
        return FgAbMap(self.source.direct_sum(other.source),
                       self.target.direct_sum(other.target),
                       block_diag(self.matrix, other.matrix))

    def canonical_matrix(self) -> tuple:
        """(matrix over canonical generators, source orders, target orders)."""
        src = self.source.canonical()
        tgt = self.target.canonical()
        image_cols = self.matrix * src.lift_cols
        raw = tgt.reduce_rows * image_cols
        rows = []
        for i, d in enumerate(raw.rows):
            o = tgt.orders[i]
            rows.append([x % o if o else x for x in d])
        return (IntMatrix.from_rows(rows, ncols=len(src.orders)),
                src.orders, tgt.orders)

    def is_isomorphism(self) -> bool:
        """Same invariants plus surjectivity; finitely generated abelian
        groups are Hopfian, so that already forces bijectivity.  Both checks
        run on canonical coordinates, which keeps the matrices tiny."""
        if self.source.invariants() != self.target.invariants():
            return False
        can, _, orders_t = self.canonical_matrix()
        rel_cols = [[orders_t[i] if r == i else 0
                     for i in range(len(orders_t))]
                    for r in range(len(orders_t)) if orders_t[r] != 0]
        span = can.hstack(IntMatrix.from_cols(rel_cols,
                                              nrows=len(orders_t)))
        diag = smith_diagonal(span)
        return len(diag) == len(orders_t) and all(d == 1 for d in diag)

    def kernel_invariants(self):
        """Invariants of ker(map) as a subquotient of the source."""
        combined = self.matrix.hstack(self.target.relations.scale(-1))
        ker = kernel_basis(combined)
        pre = IntMatrix.from_rows(ker.rows[:self.source.ambient],
                                  ncols=ker.ncols)
        # kernel subgroup = (classes of pre columns) in source
        return _subgroup_quotient_invariants(pre, self.source)

    def cokernel_invariants(self):
        rel = self.matrix.hstack(self.target.relations)
        return FgAbGroup(self.target.ambient, rel).invariants()

    def image_invariants(self):
        """Invariants of Im(map) as a subgroup of the target."""
        return _image_invariants(self.matrix, self.target)


def _subgroup_quotient_invariants(gen_cols: IntMatrix, group: FgAbGroup):
    """Invariants of the subgroup of ``group`` generated by given classes.

    The subgroup is span(gens + relations) / span(relations); it is presented
    on a lattice basis of the enlarged span.
    """
    gens = gen_cols.hstack(group.relations)
    basis_up = _span_basis(gens)
    coords = solve_many(basis_up, group.relations)
    if coords is None:
        raise AssertionError("relation span not inside generated span")
    return FgAbGroup(basis_up.ncols, coords).invariants()


def _image_invariants(matrix: IntMatrix, target: FgAbGroup):
    return _subgroup_quotient_invariants(matrix, target)


def _span_basis(A: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of A."""
    ech = column_echelon(A)
    cols = [ech.H.col(c) for _, c in ech.pivots]
    return IntMatrix.from_cols(cols, nrows=A.nrows)


# ---------------------------------------------------------------------------
# Presentation contexts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CokerContext:
    """Z^n / Im(M): the group is presented directly on ambient coordinates."""

    matrix: IntMatrix

    @property
    def ambient(self) -> int:
        return self.matrix.nrows

    def group(self) -> FgAbGroup:
        return FgAbGroup(self.matrix.nrows, self.matrix)

    def reduce(self, vec):
        return tuple(vec)

    def induce(self, f: IntMatrix, target: "CokerContext") -> FgAbMap:
        return FgAbMap(self.group(), target.group(), f)


@dataclass(frozen=True)
class KernelContext:
    """ker(M) inside Z^n, with an explicit lattice basis as coordinates."""

    matrix: IntMatrix
    basis: IntMatrix = field(default=None)  # n x t, columns form the basis

    def __post_init__(self):
        if self.basis is None:
            object.__setattr__(self, "basis", kernel_basis(self.matrix))

    @property
    def rank(self) -> int:
        return self.basis.ncols

    def group(self) -> FgAbGroup:
        return FgAbGroup(self.basis.ncols)

    def reduce(self, vec):
        """Coordinates of an ambient kernel vector in the basis."""
        y = solve_many(self.basis, IntMatrix.from_cols([vec],
                                                       nrows=self.basis.nrows))
        if y is None:
            raise NotWellDefined("vector not in kernel lattice", witness=vec)
        return y.col(0)

    def lift(self, coords):
        return self.basis.apply(coords)

    def induce(self, f: IntMatrix, target: "KernelContext") -> FgAbMap:
        image = f * self.basis
        if not (target.matrix * image).is_zero():
            raise NotWellDefined("map does not preserve kernels", witness=f)
        g = solve_many(target.basis, image)
        if g is None:
            raise NotWellDefined("image escapes target kernel lattice",
                                 witness=f)
        return FgAbMap(self.group(), target.group(), g)


@dataclass(frozen=True)
class SubquotientContext:
    """ker(Z) / Im(B) in kernel-basis coordinates.

    ``basis`` spans ker(Z); ``relations`` expresses the columns of B in that
    basis, so the group is Z^t / Im(relations).
    """

    zmatrix: IntMatrix
    bmatrix: IntMatrix
    basis: IntMatrix = field(default=None)
    relations: IntMatrix = field(default=None)

    def __post_init__(self):
        if not (self.zmatrix * self.bmatrix).is_zero():
            raise NotAComplex("Z*B != 0",
                              witness=(self.zmatrix, self.bmatrix))
        if self.basis is None:
            object.__setattr__(self, "basis", kernel_basis(self.zmatrix))
        if self.relations is None:
            rel = solve_many(self.basis, self.bmatrix)
            if rel is None:
                raise AssertionError("B columns escape kernel lattice")
            object.__setattr__(self, "relations", rel)

    def group(self) -> FgAbGroup:
        return FgAbGroup(self.basis.ncols, self.relations)

    def reduce(self, vec):
        y = solve_many(self.basis,
                       IntMatrix.from_cols([vec], nrows=self.basis.nrows))
        if y is None:
            raise NotWellDefined("vector not in kernel lattice", witness=vec)
        return y.col(0)

    def induce(self, f: IntMatrix, target: "SubquotientContext") -> FgAbMap:
        image = f * self.basis
        if not (target.zmatrix * image).is_zero():
            raise NotWellDefined("map does not preserve the kernel", witness=f)
        g = solve_many(target.basis, image)
        if g is None:
            raise NotWellDefined("image escapes target kernel lattice",
                                 witness=f)
        return FgAbMap(self.group(), target.group(), g)


def subquotient(zmatrix: IntMatrix, bmatrix: IntMatrix) -> SubquotientContext:
    """ker(Z)/Im(B) with basis data; raises NotAComplex when Z*B != 0."""
    return SubquotientContext(zmatrix=zmatrix, bmatrix=bmatrix)


def induced_map(f: IntMatrix, source, target) -> FgAbMap:
    """Descend/restrict an ambient matrix through matching contexts."""
    if type(source) is not type(target):
        raise ValueError("contexts must have the same shape")
    return source.induce(f, target)


# ---------------------------------------------------------------------------
# Tensor products (needed for the Kunneth formula)
# ---------------------------------------------------------------------------

def tensor_orders(orders_a, orders_b):
    """Orders of generators of a tensor product of cyclic sums.

    0 stands for Z.  Z tensor Z/d = Z/d and Z/c tensor Z/d = Z/gcd(c, d).
    """
    from math import gcd as _g
    out = []
    for a in orders_a:
        for b in orders_b:
            if a == 0 and b == 0:
                out.append(0)
            elif a == 0:
                out.append(b)
            elif b == 0:
                out.append(a)
            else:
                out.append(_g(a, b))
    return tuple(out)


def tensor_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    fa, ta = a.invariants()
    fb, tb = b.invariants()
    orders_a = (0,) * fa + ta
    orders_b = (0,) * fb + tb
    return FgAbGroup.from_orders(tensor_orders(orders_a, orders_b))
