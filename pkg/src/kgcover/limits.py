"""Direct limits of finitely generated abelian groups.

A DirectSystem is a finite truncation G_1 -> G_2 -> ... -> G_N together
with an optional continuation rule describing every later map.  Limits of
such systems are not classifiable in general, so classification returns a
tagged verdict:

* ``free``          the limit is Z^r, established by connecting maps that
                    are isomorphisms from some stage on;
* ``supernatural``  a sum of Z[1/alpha] summands plus free and torsion
                    parts, read off a system that is eventually diagonal in
                    canonical coordinates (infinite multiplicities only ever
                    come from a declared continuation rule, never from
                    finitely many stages);
* ``stabilized``    invariants constant over the last ``window`` stages,
                    reported with the stage and an ``exact`` flag when the
                    connecting maps are provably isomorphisms from there on;
* ``unclassified``  per-stage invariants, verbatim.

Since a direct limit only depends on the tail of the system, the
classification of torsion coordinates and Z[1/alpha] summands is read off
the continuation rule; finitely many early multipliers never change the
isomorphism type.

Continuation rules are ("repeat-last",), meaning every later connecting
map acts like the last declared one (in canonical coordinates when the
ambient presentations differ), ("periodic",), meaning the declared maps
cycle forever in order, or ("geometric", M), meaning every later map is
the square matrix M on the final stage's ambient.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroups import FgAbMap
from .intmat import IntMatrix


INF = float("inf")


def _factorint(n: int) -> dict:
    n = abs(n)
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class SupernaturalNumber:
    """A formal product of integers > 1, kept as prime exponents.

    Exponents may be ``inf`` but only when the generating sequence carries a
    declared repetition; the generating factors are kept when known.
    """

    exponents: tuple              # sorted tuple of (prime, exponent or INF)
    factors: tuple = ()           # generating factor sequence, when known
    repeats: bool = False         # the tail of ``factors`` repeats forever

    @staticmethod
    def from_factors(factors, repeats=False, repeat_from=None) -> "SupernaturalNumber":
        """Build from a factor list; with ``repeats`` the factors from index
        ``repeat_from`` (default: all of them) recur infinitely often."""
        exps: dict = {}
        factors = tuple(int(f) for f in factors)
        for f in factors:
            for p, e in _factorint(f).items():
                exps[p] = exps.get(p, 0) + e
        if repeats:
            start = 0 if repeat_from is None else repeat_from
            for f in factors[start:]:
                for p in _factorint(f):
                    exps[p] = INF
        return SupernaturalNumber(tuple(sorted(exps.items())), factors, repeats)

    def is_finite(self) -> bool:
        return all(e != INF for _, e in self.exponents)

    def describe(self) -> str:
        if not self.exponents:
            return "1"
        parts = []
        for p, e in self.exponents:
            parts.append(f"{p}^inf" if e == INF else (f"{p}^{e}" if e > 1 else f"{p}"))
        return "*".join(parts)

    def to_json(self):
        return {str(p): ("inf" if e == INF else e) for p, e in self.exponents}


@dataclass(frozen=True)
class DirectSystem:
    """G_1 -> G_2 -> ... -> G_N plus an optional continuation rule.

    ``distinguished`` is an optional ambient vector at stage 1 whose image
    is tracked through the system (used for unit classes).
    """

    groups: tuple
    maps: tuple
    continuation: tuple | None = None
    distinguished: tuple | None = None

    def __post_init__(self):
        if len(self.maps) != len(self.groups) - 1:
            raise ValueError("need exactly one map per consecutive pair")
        for g, f in zip(self.groups, self.maps):
            if f.source.ambient != g.ambient:
                raise ValueError("map source does not match stage group")
        for g, f in zip(self.groups[1:], self.maps):
            if f.target.ambient != g.ambient:
                raise ValueError("map target does not match stage group")
        if self.continuation is not None:
            kind = self.continuation[0]
            if kind not in ("repeat-last", "periodic", "geometric"):
                raise ValueError(f"unknown continuation rule {kind!r}")
            if kind == "geometric":
                m = self.continuation[1]
                amb = self.groups[-1].ambient
                if m.shape != (amb, amb):
                    raise ValueError("geometric matrix must be square on the "
                                     "final ambient")
            if kind == "periodic" and not self.maps:
                raise ValueError("periodic continuation needs declared maps")

    @property
    def stages(self) -> int:
        return len(self.groups)

    def map_at(self, n: int) -> FgAbMap:
        """Connecting map G_n -> G_{n+1} (1-indexed).  Beyond the truncation
        this exists only when the continuation gives a literal map on the
        final ambient."""
        if 1 <= n < self.stages:
            return self.maps[n - 1]
        if self.continuation is None:
            raise IndexError(f"no declared map at stage {n}")
        last = self.groups[-1]
        if self.continuation[0] == "geometric":
            return FgAbMap(last, last, self.continuation[1])
        if self.continuation[0] == "periodic":
            m = self.maps[(n - 1) % len(self.maps)]
        else:
            m = self.maps[-1]
        if m.matrix.nrows != m.matrix.ncols or m.source.ambient != last.ambient:
            raise IndexError("the continuation has no literal map on this "
                             "ambient")
        return FgAbMap(last, last, m.matrix)

    def push_forward(self, stage: int, vec, to_stage: int):
        """Image of an ambient vector from ``stage`` at ``to_stage``."""
        if to_stage < stage:
            raise ValueError("cannot push backwards")
        v = tuple(vec)
        for n in range(stage, to_stage):
            v = self.map_at(n)(v)
        return v

    def tail_maps(self):
        """The declared repeating tail as a list of maps (a single map for
        repeat-last and geometric, the whole declared cycle for periodic),
        or None without a continuation rule."""
        if self.continuation is None:
            return None
        if self.continuation[0] == "geometric":
            last = self.groups[-1]
            return [FgAbMap(last, last, self.continuation[1])]
        if not self.maps:
            return None
        if self.continuation[0] == "periodic":
            return list(self.maps)
        return [self.maps[-1]]


@dataclass(frozen=True)
class LimitClassification:
    """Tagged verdict for the isomorphism type of a direct limit."""

    tag: str                      # free | supernatural | stabilized | unclassified
    free_rank: int = 0
    summands: tuple = ()          # ("Z[1/a]", sn) | ("Z",) | ("Z/d", d)
    stage: int = 0                # stage from which the verdict is grounded
    exact: bool = False
    per_stage: tuple = ()         # ((free, torsion), ...) truncation invariants
    unit: tuple | None = None     # canonical coordinates of tracked element
    unit_note: str = ""
    notes: str = ""
    recipe: tuple = ()            # canonical connecting matrices, verbatim,
                                  # for verdicts that are not exact

    def invariants_at_verdict(self):
        return self.per_stage[self.stage - 1] if self.per_stage else None

    def describe(self) -> str:
        if self.tag == "free":
            return f"Z^{self.free_rank}"
        if self.tag == "supernatural":
            bits = []
            for s in self.summands:
                if s[0] == "Z":
                    bits.append("Z")
                elif s[0] == "Z/d":
                    bits.append(f"Z/{s[1]}")
                else:
                    bits.append(f"Z[1/{s[1].describe()}]")
            return " + ".join(bits) if bits else "0"
        if self.tag == "stabilized":
            free, tors = self.per_stage[self.stage - 1]
            parts = ["Z"] * free + [f"Z/{d}" for d in tors]
            body = " + ".join(parts) if parts else "0"
            kind = "exact" if self.exact else "window heuristic"
            return f"{body} (stabilized from stage {self.stage}, {kind})"
        return "unclassified"

    def to_json(self):
        out = {"tag": self.tag, "describe": self.describe(),
               "stage": self.stage, "exact": self.exact,
               "per_stage": [[f, list(t)] for f, t in self.per_stage]}
        if self.tag == "free":
            out["free_rank"] = self.free_rank
        if self.tag == "supernatural":
            out["summands"] = [
                {"type": "Z"} if s[0] == "Z" else
                ({"type": "Z/d", "d": s[1]} if s[0] == "Z/d" else
                 {"type": "Z[1/a]", "alpha": s[1].to_json()})
                for s in self.summands]
        if self.unit is not None:
            out["unit"] = list(self.unit)
            out["unit_note"] = self.unit_note
        if self.notes:
            out["notes"] = self.notes
        if self.recipe:
            out["recipe"] = [[list(r) for r in m] for m in self.recipe]
        return out


def _torsion_tail_order(d: int, a: int) -> int:
    """Order of the limit of (Z/d, *a, *a, ...): the part of d supported on
    primes dividing a is eventually killed; a == 0 kills everything."""
    if a == 0:
        return 1
    killed = 1
    for p, e in _factorint(d).items():
        if a % p == 0:
            killed *= p ** e
    return d // killed


def classify(ds: DirectSystem, window: int = 3) -> LimitClassification:
    """Classification logic; see the module docstring for the verdicts."""
    cans = [g.canonical() for g in ds.groups]   # warms the caches
    per_stage = tuple(g.invariants() for g in ds.groups)
    unit_coords = None
    unit_note = ""
    if ds.distinguished is not None:
        vecs = [tuple(ds.distinguished)]
        for n in range(1, ds.stages):
            vecs.append(ds.maps[n - 1](vecs[-1]))
        coords = [c.coords(v) for c, v in zip(cans, vecs)]
        unit_coords = coords[-1]
        if all(all(x == 0 for x in c) for c in coords):
            unit_note = "zero at every stage"
        else:
            unit_note = f"stage coordinates {[list(c) for c in coords]}"

    # a single declared stage without a continuation IS its own limit
    if ds.stages == 1 and ds.continuation is None:
        free, tors = ds.groups[0].invariants()
        return LimitClassification(
            tag="free" if not tors else "stabilized", free_rank=free,
            stage=1, exact=True, per_stage=per_stage, unit=unit_coords,
            unit_note=unit_note,
            notes="single-stage system; the limit is the stage itself")

    # (a) isomorphisms from some stage onward
    tail = ds.tail_maps()
    tail_iso = all(m.is_isomorphism() for m in tail) if tail is not None \
        else None
    iso_candidates = list(range(1, len(ds.maps) + 1))
    if ds.continuation is not None:
        iso_candidates.append(ds.stages)
    iso_from = None
    for n0 in iso_candidates:
        if all(ds.maps[i].is_isomorphism() for i in range(n0 - 1, len(ds.maps))):
            iso_from = n0
            break
    if iso_from is not None and (tail_iso is None or tail_iso):
        g = ds.groups[iso_from - 1]
        free, tors = g.invariants()
        exact = ds.continuation is not None
        note = ("limit isomorphic to the stage {} group; connecting maps are "
                "isomorphisms from there on{}").format(
                    iso_from, "" if exact else " (within the declared stages)")
        tag = "free" if not tors else "stabilized"
        return LimitClassification(
            tag=tag, free_rank=free, stage=iso_from, exact=exact,
            per_stage=per_stage, unit=unit_coords, unit_note=unit_note,
            notes=note)

    # (b) eventually diagonal in canonical coordinates, with a declared tail
    verdict = _classify_diagonal(ds, per_stage, unit_coords, unit_note)
    if verdict is not None:
        return verdict

    # (c) invariants constant over the final window; the connecting-matrix
    # recipe is reported verbatim since no normal form is claimed
    recipe = tuple(tuple(map(tuple, m.canonical_matrix()[0].rows))
                   for m in ds.maps)
    w = min(window, ds.stages)
    if w >= 2 and len(set(per_stage[-w:])) == 1:
        return LimitClassification(
            tag="stabilized", stage=ds.stages - w + 1, exact=False,
            per_stage=per_stage, unit=unit_coords, unit_note=unit_note,
            notes=f"invariants constant over the final {w} stages",
            recipe=recipe)

    return LimitClassification(tag="unclassified", per_stage=per_stage,
                               unit=unit_coords, unit_note=unit_note,
                               recipe=recipe)


def _classify_diagonal(ds, per_stage, unit_coords, unit_note):
    """Supernatural-sum verdict for systems whose canonical forms agree from
    some stage on and whose connecting maps are diagonal there.

    Requires a continuation rule: infinite multiplicities are never inferred
    from finitely many stages.  A periodic rule contributes the whole cycle
    of multipliers to each coordinate's supernatural number.
    """
    tail = ds.tail_maps()
    if tail is None or not ds.maps:
        return None
    cans = [g.canonical() for g in ds.groups]
    for n0 in range(1, ds.stages):
        orders = cans[n0 - 1].orders
        if any(cans[i].orders != orders for i in range(n0 - 1, ds.stages)):
            continue
        ok = True
        for i in range(n0 - 1, len(ds.maps)):
            mat, _, _ = ds.maps[i].canonical_matrix()
            if not _is_diagonal(mat):
                ok = False
                break
        if not ok:
            continue
        tail_mats = []
        for m in tail:
            mat, _, _ = m.canonical_matrix()
            if not _is_diagonal(mat) or mat.nrows != len(orders):
                return None
            tail_mats.append(mat)
        summands = []
        for j, d in enumerate(orders):
            mults = [mat.entry(j, j) for mat in tail_mats]
            if d == 0:
                if any(a == 0 for a in mults):
                    continue  # the coordinate dies in the limit
                nontrivial = [abs(a) for a in mults if abs(a) != 1]
                if not nontrivial:
                    summands.append(("Z",))
                else:
                    sn = SupernaturalNumber.from_factors(nontrivial,
                                                         repeats=True)
                    summands.append(("Z[1/a]", sn))
            else:
                prod = 1
                for a in mults:
                    prod *= a
                dd = _torsion_tail_order(d, abs(prod))
                if dd > 1:
                    summands.append(("Z/d", dd))
        return LimitClassification(
            tag="supernatural", summands=tuple(summands), stage=n0,
            exact=True, per_stage=per_stage, unit=unit_coords,
            unit_note=unit_note,
            notes="system is diagonal in canonical coordinates from stage "
                  f"{n0}; the continuation rule supplies the infinite tail")
    return None


def _is_diagonal(mat: IntMatrix) -> bool:
    if mat.nrows != mat.ncols:
        return False
    return all(mat.entry(i, j) == 0
               for i in range(mat.nrows) for j in range(mat.ncols) if i != j)


def equal_in_limit(ds: DirectSystem, a_stage: int, a_vec, b_stage: int, b_vec,
                   horizon: int = 12) -> "bool | str":
    """Decide equality of two element classes in the limit.

    Equality found within the horizon gives True.  A definite False needs the
    declared tail to be injective; otherwise the answer past the truncation
    is unknown and "indeterminate" is returned.
    """
    n0 = max(a_stage, b_stage)
    a = ds.push_forward(a_stage, a_vec, n0)
    b = ds.push_forward(b_stage, b_vec, n0)
    if ds.groups[n0 - 1].classes_equal(a, b):
        return True
    for n in range(n0, ds.stages):
        a = ds.maps[n - 1](a)
        b = ds.maps[n - 1](b)
        if ds.groups[n].classes_equal(a, b):
            return True
    injective_declared = all(
        _is_injective(ds.maps[i]) for i in range(n0 - 1, len(ds.maps)))
    tail = ds.tail_maps()
    if injective_declared and tail is not None and \
            all(_is_injective(m) for m in tail):
        return False
    if ds.continuation is None:
        return "indeterminate"
    # a non-injective tail: semidecide further when literal maps exist
    try:
        for n in range(ds.stages, horizon + 1):
            a = ds.map_at(n)(a)
            b = ds.map_at(n)(b)
            if ds.groups[-1].classes_equal(a, b):
                return True
    except IndexError:
        pass
    return "indeterminate"


def _is_injective(f: FgAbMap) -> bool:
    free, tors = f.kernel_invariants()
    return free == 0 and not tors
