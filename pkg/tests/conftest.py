"""Shared builders and randomized generators for the test suite.

Random 2-graphs use circulant skeletons (their connectivity matrices
commute, so counts of composable pairs match) with a random range/source
preserving bijection as the square table; for rank 2 any such bijection is
valid.  Random coverings replicate a base graph over a fiber and twist the
sources by permutations: arbitrary per edge for rank 1, constant per color
and commuting for rank 2, which keeps the square compatibility exact.
"""

import random

import pytest

from kgcover.covering import make_covering_system
from kgcover.kgraph import Skeleton, validate_kgraph


def build_graph(rank, vertices, edges, squares=None, **opts):
    return validate_kgraph(Skeleton.build(rank, vertices, edges),
                           squares or {}, **opts)


def t2_graph():
    return build_graph(2, ["v"], [("b", 1, "v", "v"), ("r", 2, "v", "v")],
                       {("b", "r"): ("r", "b")})


def random_1graph(rng: random.Random, max_vertices=6, tag="", no_sources=True):
    n = rng.randint(1, max_vertices)
    vs = [f"{tag}v{i}" for i in range(n)]
    edges = []
    eid = 0
    if no_sources:
        for v in vs:
            src = rng.choice(vs)
            edges.append((f"{tag}e{eid}", 1, src, v))
            eid += 1
    extra = rng.randint(0, 2 * n)
    for _ in range(extra):
        edges.append((f"{tag}e{eid}", 1, rng.choice(vs), rng.choice(vs)))
        eid += 1
    return build_graph(1, vs, edges, require_no_sources=no_sources)


def random_circulant_2graph(rng: random.Random, max_vertices=5, tag="",
                            max_step_count=2):
    """Vertices Z_n; each color's edges are circulant steps, squares are a
    random range/source preserving bijection."""
    n = rng.randint(1, max_vertices)
    vs = [f"{tag}v{i}" for i in range(n)]
    edges = []
    eid = [0]

    def add_color(color):
        steps = [rng.randrange(n)
                 for _ in range(rng.randint(1, max_step_count))]
        for s in steps:
            for i in range(n):
                # range i, source i+s
                edges.append((f"{tag}c{color}e{eid[0]}", color,
                              vs[(i + s) % n], vs[i]))
                eid[0] += 1
        return steps

    add_color(1)
    add_color(2)
    graph_edges = edges
    skel = Skeleton.build(2, vs, graph_edges)
    by_color = {1: [], 2: []}
    for e in skel.edges:
        by_color[e.color].append(e)
    # composable pairs grouped by (range, source); a random pairing of the
    # two orientations within each group is a valid square table
    def groups(first_color, second_color):
        out = {}
        for e in by_color[first_color]:
            for f in by_color[second_color]:
                if e.src == f.rng:
                    out.setdefault((e.rng, f.src), []).append((e.eid, f.eid))
        return out

    g12 = groups(1, 2)
    g21 = groups(2, 1)
    squares = {}
    for key, pairs in g12.items():
        others = list(g21.get(key, []))
        assert len(others) == len(pairs), "circulant counts must match"
        rng.shuffle(others)
        for (e, f), (f2, e2) in zip(pairs, others):
            squares[(e, f)] = (f2, e2)
    return validate_kgraph(skel, squares, require_no_sources=True)


def fiber_covering(rng: random.Random, base, fiber, tag="F:"):
    """Replicate ``base`` over a fiber of the given size, twisting sources.

    For rank 1 each edge gets an independent random permutation; for rank 2
    each color uses a power of one random fiber cycle so that all the
    twists commute and squares stay compatible.
    """
    k = base.rank
    f = fiber
    sigma = list(range(f))
    rng.shuffle(sigma)

    def cyc_power(a):
        return [sigma[(sigma.index(t) + a) % f] for t in range(f)]

    color_perm = {c: cyc_power(rng.randrange(f)) for c in range(1, k + 1)}
    perms = {}
    for e in base.skeleton.edges:
        if k == 1:
            p = list(range(f))
            rng.shuffle(p)
        else:
            p = color_perm[e.color]
        perms[e.eid] = p

    vs = [f"{tag}{v}@{t}" for v in base.vertices for t in range(f)]
    edges = []
    for e in base.skeleton.edges:
        for t in range(f):
            edges.append((f"{tag}{e.eid}@{t}", e.color,
                          f"{tag}{e.src}@{perms[e.eid][t]}",
                          f"{tag}{e.rng}@{t}"))
    squares = {}
    for (e1, f1), (f2, e2) in base.squares.items():
        for t in range(f):
            t1 = perms[e1][t]
            squares[(f"{tag}{e1}@{t}", f"{tag}{f1}@{t1}")] = (
                f"{tag}{f2}@{t}", f"{tag}{e2}@{perms[f2][t]}")
    total = validate_kgraph(Skeleton.build(k, vs, edges), squares,
                            require_no_sources=base.has_no_sources())
    vmap = {f"{tag}{v}@{t}": v for v in base.vertices for t in range(f)}
    emap = {f"{tag}{e.eid}@{t}": e.eid
            for e in base.skeleton.edges for t in range(f)}
    return base, total, vmap, emap


def random_cocycle(rng: random.Random, total, m):
    """Random valid cocycle values; arbitrary for rank 1, commuting powers
    of one m-cycle per color for rank 2."""
    if m == 1:
        return {}
    if total.rank == 1:
        perms = {}
        for e in total.skeleton.edges:
            p = list(range(1, m + 1))
            rng.shuffle(p)
            perms[e.eid] = tuple(p)
        return perms
    shift = {c: rng.randrange(m) for c in range(1, total.rank + 1)}

    def power(a):
        return tuple((t + a) % m + 1 for t in range(m))

    return {e.eid: power(shift[e.color]) for e in total.skeleton.edges}


def random_covering_system(rng: random.Random, rank, tag="",
                           max_base=4, max_fiber=3, max_m=3):
    if rank == 1:
        base = random_1graph(rng, max_vertices=max_base, tag=f"{tag}B:")
    else:
        base = random_circulant_2graph(rng, max_vertices=max_base,
                                       tag=f"{tag}B:")
    fiber = rng.randint(1, max_fiber)
    base, total, vmap, emap = fiber_covering(rng, base, fiber,
                                             tag=f"{tag}T:")
    m = rng.randint(1, max_m)
    perms = random_cocycle(rng, total, m)
    return make_covering_system(base, total, vmap, emap, m=m,
                                edge_perms=perms)


@pytest.fixture
def rng():
    return random.Random(20240817)
