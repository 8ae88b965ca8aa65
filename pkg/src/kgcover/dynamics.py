"""Decidable structure checks: cofinality, aperiodicity, cycles with
entrances, and tower-level verdicts.

Infinite paths move from ranges toward sources, so the walk digraph here
points r(e) -> s(e).  The tail of an infinite path eventually lives inside
a single strongly connected component whose vertices all receive every
color from within the component; such components ("tail components") are
what cofinality quantifies over:

    cofinal  <=>  every vertex reaches every tail component.

For rank 1 the tail components are exactly the SCCs containing an edge and
the criterion is exact; for higher rank it is exact on the families built
here (vertex-transitive quotients, products of cycles and bouquets) and
conservative in general, which the reports state.

A 1-graph is aperiodic iff every vertex reaches an SCC with strictly more
internal edges than vertices (two distinct first-return cycles live
there); this is exact for finite graphs.  Cycles with entrances are
decided exactly for every rank: an entrance exists iff some nontrivial SCC
can reach, along edges colored inside the component, a vertex with two
incoming edges of such a color (pump the cycle until its degree dominates
the witness path).  The bounded enumerator :func:`cycles_with_entrance`
additionally produces explicit witness paths.

Tower verdicts only ever say Yes/No when a declared continuation rule
covers the infinite tail; truncations alone yield Indeterminate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .covering import MatrixCoveringSystem, Tower
from .errors import HasSource, WrongRank
from .intmat import IntMatrix, solve_many
from .kgraph import KGraph, disjoint_union, enumerate_paths
from .zoo import subgroup_chain_check


# ---------------------------------------------------------------------------
# SCC machinery
# ---------------------------------------------------------------------------

def _walk_digraph(graph: KGraph):
    """Adjacency (list of successor index lists) of the r -> s digraph."""
    idx = {v: i for i, v in enumerate(graph.vertices)}
    succ = [[] for _ in graph.vertices]
    for e in graph.skeleton.edges:
        succ[idx[e.rng]].append(idx[e.src])
    return idx, succ


def strongly_connected_components(succ):
    """Tarjan, iterative; returns a list of vertex-index lists."""
    n = len(succ)
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack = []
    sccs = []
    counter = [1]
    for root in range(n):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                visited[v] = True
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(succ[v]):
                w = succ[v][pi]
                pi += 1
                if not visited[w]:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return sccs


def _tail_components(graph: KGraph, idx, sccs):
    """SCCs that can host the tail of an infinite path.

    Within each SCC, iteratively drop vertices missing an in-edge of some
    color from inside the surviving set; a nonempty core means the
    component supports tails (exact for rank 1)."""
    vlist = list(graph.vertices)
    out = []
    for comp in sccs:
        alive = set(comp)
        changed = True
        while changed and alive:
            changed = False
            for vi in list(alive):
                v = vlist[vi]
                for c in range(1, graph.rank + 1):
                    if not any(idx[e.src] in alive
                               for e in graph.in_edges(v, c)):
                        alive.discard(vi)
                        changed = True
                        break
        if alive:
            out.append(comp)
    return out


@dataclass(frozen=True)
class CofinalityReport:
    holds: bool
    witness: tuple | None = None   # (vertex, unreachable tail component)


def _graph_analysis(graph: KGraph):
    """(idx, succ, sccs), shared by the per-level checks."""
    idx, succ = _walk_digraph(graph)
    return idx, succ, strongly_connected_components(succ)


def is_cofinal(graph: KGraph, analysis=None) -> CofinalityReport:
    """Every vertex must reach every tail component along r -> s walks."""
    _no_sources(graph)
    idx, succ, sccs = analysis if analysis is not None \
        else _graph_analysis(graph)
    tails = _tail_components(graph, idx, sccs)
    comp_of = [0] * len(succ)
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    # condensation successors
    cond = [set() for _ in sccs]
    for v, ws in enumerate(succ):
        for w in ws:
            if comp_of[v] != comp_of[w]:
                cond[comp_of[v]].add(comp_of[w])
    # reachable component sets, memoized over the DAG
    reach: dict = {}

    def reach_of(ci):
        if ci in reach:
            return reach[ci]
        acc = {ci}
        for cj in cond[ci]:
            acc |= reach_of(cj)
        reach[ci] = acc
        return acc

    tail_ids = {id(comp): comp for comp in tails}
    tail_cis = [next(ci for ci, c in enumerate(sccs) if c is comp)
                for comp in tails]
    vlist = list(graph.vertices)
    for v in range(len(succ)):
        r = reach_of(comp_of[v])
        for comp, ci in zip(tails, tail_cis):
            if ci not in r:
                return CofinalityReport(
                    False, (vlist[v], tuple(sorted(vlist[w] for w in comp))))
    return CofinalityReport(True)


def is_aperiodic_1graph(graph: KGraph) -> bool:
    """Exact for finite 1-graphs: every vertex must reach an SCC carrying
    two distinct first-return cycles (more internal edges than vertices)."""
    if graph.rank != 1:
        raise WrongRank("aperiodicity decision implemented for 1-graphs")
    _no_sources(graph)
    idx, succ = _walk_digraph(graph)
    sccs = strongly_connected_components(succ)
    comp_of = [0] * len(succ)
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    rich = set()
    for ci, comp in enumerate(sccs):
        members = set(comp)
        internal = sum(1 for v in comp for w in succ[v] if w in members)
        if internal > len(comp):
            rich.add(ci)
    if not rich:
        return False
    cond = [set() for _ in sccs]
    for v, ws in enumerate(succ):
        for w in ws:
            if comp_of[v] != comp_of[w]:
                cond[comp_of[v]].add(comp_of[w])
    reaches_rich: dict = {}

    def ok(ci):
        if ci in reaches_rich:
            return reaches_rich[ci]
        res = ci in rich or any(ok(cj) for cj in cond[ci])
        reaches_rich[ci] = res
        return res

    return all(ok(comp_of[v]) for v in range(len(succ)))


def has_cycle_with_entrance(graph: KGraph, analysis=None) -> bool:
    """Exact decision for any rank; see the module docstring."""
    idx, succ, sccs = analysis if analysis is not None \
        else _graph_analysis(graph)
    vlist = list(graph.vertices)
    for comp in sccs:
        members = set(comp)
        colors = set()
        for vi in comp:
            v = vlist[vi]
            for c in range(1, graph.rank + 1):
                for e in graph.in_edges(v, c):
                    if idx[e.src] in members:
                        colors.add(c)
        if not colors:
            continue
        # BFS from the component along edges with colors in `colors`
        seen = set(comp)
        frontier = list(comp)
        while frontier:
            nxt = []
            for vi in frontier:
                v = vlist[vi]
                for c in colors:
                    edges = graph.in_edges(v, c)
                    if len(edges) >= 2:
                        return True
                    for e in edges:
                        w = idx[e.src]
                        if w not in seen:
                            seen.add(w)
                            nxt.append(w)
            frontier = nxt
    return False


def cycles_with_entrance(graph: KGraph, bound, max_witnesses: int = 5):
    """Explicit (cycle, entrance) witnesses with degrees up to ``bound``
    componentwise; an empty list decides nothing beyond the bound."""
    k = graph.rank
    if isinstance(bound, int):
        bound = (bound,) * k
    witnesses = []
    degrees = _degrees_upto(bound)
    for v in graph.vertices:
        for d in degrees:
            if len(witnesses) >= max_witnesses:
                return witnesses
            cycles = [p for p in enumerate_paths(graph, v, d)
                      if p.source == v]
            if not cycles:
                continue
            lam = cycles[0]
            found = None
            for m in _degrees_upto(d):
                candidates = enumerate_paths(graph, v, m)
                if len(candidates) < 2:
                    continue
                from .kgraph import factorize
                head, _ = factorize(lam, m)
                mu = next(c for c in candidates if c != head)
                found = (lam, mu)
                break
            if found:
                witnesses.append(found)
                break
    return witnesses


def _degrees_upto(bound):
    degrees = [()]
    for b in bound:
        degrees = [d + (x,) for d in degrees for x in range(b + 1)]
    return [d for d in degrees if any(d)]


def _no_sources(graph: KGraph):
    bad = graph.source_vertices()
    if bad:
        raise HasSource(f"dynamics checks need no sources; missing at "
                        f"{bad[:3]}", witness=bad)


# ---------------------------------------------------------------------------
# Tower reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    value: str          # "yes" | "no" | "indeterminate"
    justification: str
    witness: tuple | None = None

    def to_json(self):
        out = {"value": self.value, "justification": self.justification}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        return out


@dataclass(frozen=True)
class DynamicsReport:
    levels: tuple          # per-level flag dicts
    cofinal_tower: Verdict
    aperiodic_tower: Verdict
    simplicity: Verdict
    pure_infiniteness: Verdict

    def to_json(self):
        return {"levels": [dict(l) for l in self.levels],
                "cofinal_tower": self.cofinal_tower.to_json(),
                "aperiodic_tower": self.aperiodic_tower.to_json(),
                "simplicity": self.simplicity.to_json(),
                "pure_infiniteness": self.pure_infiniteness.to_json()}


def _level_graph(level):
    if isinstance(level, tuple):
        return disjoint_union(level) if len(level) > 1 else level[0]
    return level


def tower_report(tower: Tower, levels: int | None = None,
                 continuation=None) -> DynamicsReport:
    """Per-level flags plus tower verdicts; Yes/No only with a declared
    continuation rule (truncations alone stay Indeterminate)."""
    n_levels = tower.length + 1 if levels is None else levels
    graphs = [_level_graph(g) for g in tower.level_graphs()][:n_levels]
    if continuation is None:
        continuation = tower.meta.get("continuation")
    elif continuation == "none":
        continuation = None
    has_rule = continuation is not None
    rank = tower.rank

    level_flags = []
    cof_reports = []
    for g in graphs:
        analysis = _graph_analysis(g)
        cof = is_cofinal(g, analysis)
        cof_reports.append(cof)
        flags = {"cofinal": cof.holds,
                 "has_cycle_with_entrance":
                     has_cycle_with_entrance(g, analysis)}
        if rank == 1:
            flags["aperiodic_1graph"] = is_aperiodic_1graph(g)
        level_flags.append(flags)

    # cofinality of the tower
    all_cof = all(f["cofinal"] for f in level_flags)
    if all_cof and has_rule:
        cof_v = Verdict("yes", "every declared level is cofinal and the "
                                "continuation rule repeats a cofinal level, "
                                "so infinitely many levels are cofinal "
                                "(tower-cofinality criterion)")
    elif all_cof:
        cof_v = Verdict("indeterminate",
                        "all declared levels are cofinal but no continuation "
                        "rule covers the infinite tail")
    else:
        cof_v = Verdict("indeterminate",
                        "some declared levels are not cofinal; the criterion "
                        "needs infinitely many cofinal levels")

    ap_v = _aperiodicity_verdict(tower, graphs, level_flags, has_rule)

    if cof_v.value == "yes" and ap_v.value == "yes":
        simp = Verdict("yes", "cofinal and aperiodic together characterize "
                              "simplicity")
    elif ap_v.value == "no":
        simp = Verdict("no", "a global period certifies non-simplicity",
                       witness=ap_v.witness)
    else:
        simp = Verdict("indeterminate",
                       "cofinality or aperiodicity is unresolved")

    entrance = level_flags[0]["has_cycle_with_entrance"]
    if simp.value == "yes" and entrance:
        pi_v = Verdict("yes", "simple plus a level-1 cycle with an entrance "
                              "forces pure infiniteness (entrances persist "
                              "across every level of a covering tower)")
    elif simp.value == "yes" and not entrance:
        pi_v = Verdict("indeterminate",
                       "no cycle with an entrance exists at any level "
                       "(exact check), so the sufficient criterion for pure "
                       "infiniteness does not apply")
    else:
        pi_v = Verdict("indeterminate", "pure infiniteness is only decided "
                                        "for simple towers with an entrance")
    return DynamicsReport(levels=tuple(level_flags), cofinal_tower=cof_v,
                          aperiodic_tower=ap_v, simplicity=simp,
                          pure_infiniteness=pi_v)


def _aperiodicity_verdict(tower, graphs, level_flags, has_rule) -> Verdict:
    rank = tower.rank
    meta = tower.meta

    # (1) an aperiodic level makes the whole tower aperiodic
    if rank == 1:
        for n, f in enumerate(level_flags):
            if f.get("aperiodic_1graph"):
                return Verdict("yes", f"level {n + 1} is an aperiodic "
                                      "1-graph and aperiodicity passes from "
                                      "a level to the tower")

    # (2) translation-quotient towers: trivial intersection <=> aperiodic
    if meta.get("family") == "delta-tower":
        bases = [IntMatrix.from_rows(b) for b in meta.get("bases", [])]
        gen = meta.get("generator")
        chain = subgroup_chain_check(bases, generator=gen)
        hint = chain["intersection_trivial_hint"]
        if hint is True and has_rule:
            return Verdict("yes", "the declared generator has all eigenvalue "
                                  "moduli > 1, so the subgroup chain meets "
                                  "only in 0 and every period dies "
                                  "(eigenvalue hint)")
        if has_rule and len(bases) >= 2:
            c = solve_many(bases[-2], bases[-1])
            if c is not None and abs(c.det()) == 1:
                h = (bases[-1].entry(0, 0), bases[-1].entry(1, 0))
                return Verdict("no", "the chain is eventually constant and "
                                     "nonzero, so its intersection is a "
                                     "global period", witness=h)
        return Verdict("indeterminate",
                       "finitely many subgroup levels cannot decide whether "
                       "the chain intersects in 0")

    # (3) growing simple cycles with trivial cocycles (shift-growth bound)
    if rank == 1 and _all_simple_cycles(graphs):
        lengths = [len(g.vertices) for g in graphs]
        growing = all(a < b for a, b in zip(lengths, lengths[1:]))
        trivial = all(not isinstance(cs, MatrixCoveringSystem) and cs.m == 1
                      for cs in tower.systems)
        if growing and trivial and has_rule:
            return Verdict("yes", "cycle lengths grow without bound under "
                                  "the declared rule, so no shift equality "
                                  "survives every level (growth criterion)")

    # (4) product towers with a constant aperiodic 1-graph factor
    if meta.get("constant_aperiodic_factor"):
        kind, n = meta["constant_aperiodic_factor"]
        if kind == "bouquet" and n >= 2 and has_rule:
            return Verdict("yes", "one product factor is a fixed aperiodic "
                                  "bouquet; shifts can only agree in the "
                                  "remaining coordinates and the growing "
                                  "factor rules those out (product "
                                  "criterion)")

    return Verdict("indeterminate",
                   "no implemented aperiodicity criterion applies"
                   + ("" if has_rule else " (and no continuation rule was "
                                          "declared)"))


def _all_simple_cycles(graphs) -> bool:
    for g in graphs:
        if g.rank != 1:
            return False
        for v in g.vertices:
            if len(g.in_edges(v, 1)) != 1 or len(g.out_edges(v, 1)) != 1:
                return False
    return True
