"""Closed-form K-theory for the families with known answers.

These are the values the engine is cross-checked against:

* the ring graphs D_n, keyed by n mod 6;
* translation quotients of the plane, (Z^2, H) with unit (|G|, 0);
* their towers, where K0 steps act by (index, 1) on the two summands and
  K1 steps act by the classical adjoint of the generator-coefficient
  matrix, after the generators are sign-normalized to make every
  coefficient determinant positive;
* D_n towers over a base divisible by 6 (steps multiply K0 by the factor
  and fix K1);
* the product towers of growing cycles against a fixed bouquet, where each
  level is (Z/(n-1), Z/(n-1)) and K0 steps multiply by n-1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroups import FgAbGroup, FgAbMap
from .errors import SingularBasis, UnknownFamily
from .intmat import IntMatrix, solve_many
from .ktheory import GradedKMap, GradedKPair


DN_TABLE = {
    0: ((0, 0), (0, 0)),
    1: ((), ()),
    2: ((3,), ()),
    3: ((2, 2), ()),
    4: ((3,), ()),
    5: ((), ()),
}


def _pair(orders0, orders1, unit=None, note="closed_form"):
    return GradedKPair(k0=FgAbGroup.from_orders(orders0),
                       k1=FgAbGroup.from_orders(orders1),
                       unit_class=unit, provenance=note,
                       contexts={"kind": "canonical"})


@dataclass(frozen=True)
class ClosedFormTower:
    """Per-level pairs and connecting matrices in closed form."""

    levels: tuple        # GradedKPair per level
    k0_maps: tuple       # IntMatrix per step, on the canonical presentation
    k1_maps: tuple
    notes: str = ""

    def kmaps(self):
        out = []
        for i, (m0, m1) in enumerate(zip(self.k0_maps, self.k1_maps)):
            out.append(GradedKMap(
                k0=FgAbMap(self.levels[i].k0, self.levels[i + 1].k0, m0),
                k1=FgAbMap(self.levels[i].k1, self.levels[i + 1].k1, m1)))
        return tuple(out)


def closed_form_dn(n: int) -> GradedKPair:
    if n < 1:
        raise UnknownFamily("D_n needs n >= 1")
    k0, k1 = DN_TABLE[n % 6]
    return _pair(k0, k1)


def closed_form_delta_quotient(order: int) -> GradedKPair:
    """(Z^2, Z^2) with the unit at (|G|, 0)."""
    return _pair((0, 0), (0, 0), unit=(order, 0))


def normalize_generators(bases):
    """Sign-normalize subgroup bases left to right so the coefficient
    matrices C_n with B_{n+1} = B_n C_n all have positive determinant;
    returns (new bases, coefficient matrices)."""
    bases = [b if isinstance(b, IntMatrix) else IntMatrix.from_rows(b)
             for b in bases]
    for b in bases:
        if b.shape != (2, 2) or b.det() == 0:
            raise SingularBasis("need nonsingular 2x2 bases", witness=b)
    bases = list(bases)
    for n in range(len(bases) - 1):
        c = solve_many(bases[n], bases[n + 1])
        if c is None:
            raise SingularBasis("chain is not nested", witness=n + 1)
        if c.det() < 0:
            # flip the second generator of the next level
            b = bases[n + 1]
            bases[n + 1] = IntMatrix.from_rows(
                [[b.entry(0, 0), -b.entry(0, 1)],
                 [b.entry(1, 0), -b.entry(1, 1)]])
    coeffs = []
    for n in range(len(bases) - 1):
        c = solve_many(bases[n], bases[n + 1])
        if c.det() <= 0:
            raise SingularBasis("sign normalization failed", witness=n + 1)
        coeffs.append(c)
    return bases, coeffs


def classical_adjoint(m: IntMatrix) -> IntMatrix:
    return IntMatrix.from_rows([[m.entry(1, 1), -m.entry(0, 1)],
                                [-m.entry(1, 0), m.entry(0, 0)]])


def closed_form_delta_tower(bases) -> ClosedFormTower:
    bases, coeffs = normalize_generators(bases)
    orders = [abs(b.det()) for b in bases]
    levels = tuple(closed_form_delta_quotient(o) for o in orders)
    k0_maps = []
    k1_maps = []
    for c in coeffs:
        index = c.det()
        k0_maps.append(IntMatrix.from_rows([[index, 0], [0, 1]]))
        k1_maps.append(classical_adjoint(c))
    return ClosedFormTower(
        levels=levels, k0_maps=tuple(k0_maps), k1_maps=tuple(k1_maps),
        notes="K0 acts by (index, 1) on coker + ker; K1 by the classical "
              "adjoint of the generator coefficients in the cycle basis")


def closed_form_d_tower(factors, base: int = 6) -> ClosedFormTower:
    if base % 6 != 0:
        raise UnknownFamily("the closed form covers bases divisible by 6")
    sizes = [base]
    for f in factors:
        sizes.append(sizes[-1] * int(f))
    levels = tuple(_pair((0, 0), (0, 0), unit=(0, 0)) for _ in sizes)
    k0_maps = tuple(IntMatrix.from_rows([[f, 0], [0, f]]) for f in factors)
    k1_maps = tuple(IntMatrix.identity(2) for _ in factors)
    return ClosedFormTower(levels=levels, k0_maps=k0_maps, k1_maps=k1_maps,
                           notes="K0 steps multiply by the covering factor; "
                                 "K1 steps are the identity; every level has "
                                 "zero unit class")


def closed_form_pn_tower(n: int, levels: int) -> ClosedFormTower:
    if n < 3:
        raise UnknownFamily("the product tower closed form needs n >= 3")
    pair_orders = (n - 1,)
    lv = tuple(_pair(pair_orders, pair_orders, unit=(1,))
               for _ in range(levels))
    k0_maps = tuple(IntMatrix.from_rows([[n - 1]]) for _ in range(levels - 1))
    k1_maps = tuple(IntMatrix.identity(1) for _ in range(levels - 1))
    return ClosedFormTower(levels=lv, k0_maps=k0_maps, k1_maps=k1_maps,
                           notes="levels are (Z/(n-1), Z/(n-1)); K0 steps "
                                 "multiply by n-1, hence vanish; K1 steps "
                                 "are the identity")


def closed_form_ktheory(family: str, *args, **kwargs):
    """Dispatch by family name; see the CLI's ``ktheory --closed-form``."""
    family = family.lower().replace("_", "-")
    if family == "dn":
        return closed_form_dn(int(args[0]))
    if family == "delta-quotient":
        if args and isinstance(args[0], IntMatrix):
            det = args[0].det()
            if det == 0:
                raise SingularBasis("singular subgroup basis")
            return closed_form_delta_quotient(abs(det))
        return closed_form_delta_quotient(int(args[0]))
    if family == "delta-tower":
        return closed_form_delta_tower(args[0])
    if family == "dn-tower":
        return closed_form_d_tower(args[0], **kwargs)
    if family == "pn-tower":
        return closed_form_pn_tower(int(args[0]), int(args[1]))
    raise UnknownFamily(f"no closed form for family {family!r}")
