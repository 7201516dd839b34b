"""Brute-force reference computations used as test oracles.

These work on plain dictionaries and never call the package's group,
quotient or harmonic-degree code, so agreement is an independent check.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations


def perm_of(g):
    """An automorphism as a hashable (vertex map, edge map with flips)."""
    return (tuple(sorted(g.vmap.items())), tuple(sorted(g.emap.items())))


def compose_perm(p, q):
    """``p`` after ``q``."""
    pv, pe = dict(p[0]), dict(p[1])
    qv, qe = dict(q[0]), dict(q[1])
    vm = {v: pv[w] for v, w in qv.items()}
    em = {}
    for e, (f, flip) in qe.items():
        h, flip2 = pe[f]
        em[e] = (h, flip != flip2)
    return (tuple(sorted(vm.items())), tuple(sorted(em.items())))


def closure(gens, identity):
    """All products of generators, by naive repeated multiplication."""
    elems = {identity}
    changed = True
    while changed:
        changed = False
        for x in list(elems):
            for g in gens:
                y = compose_perm(g, x)
                if y not in elems:
                    elems.add(y)
                    changed = True
    return elems


def identity_perm(curve):
    return (tuple(sorted((v, v) for v in curve.vertices)),
            tuple(sorted((e.id, (e.id, False)) for e in curve.edges)))


def group_elements(curve, generators):
    return closure([perm_of(g) for g in generators], identity_perm(curve))


def edge_orbit(elems, edge):
    return {dict(p[1])[edge][0] for p in elems}


def edge_stabilizer_order(elems, edge):
    return sum(1 for p in elems if dict(p[1])[edge][0] == edge)


def vertex_orbit(elems, v):
    return {dict(p[0])[v] for p in elems}


def count_subgroups(elems):
    """Number of subsets containing the identity closed under products."""
    elems = sorted(elems)
    table = {(a, b): compose_perm(a, b) for a in elems for b in elems}
    ident = next(p for p in elems if all(dict(p[1])[e] == (e, False) for e, _ in p[1])
                 and all(v == w for v, w in p[0]))
    rest = [p for p in elems if p != ident]
    found = 0
    for k in range(len(rest) + 1):
        if len(elems) % (k + 1):
            continue
        for combo in combinations(rest, k):
            s = set(combo) | {ident}
            if all(table[(a, b)] in s for a in s for b in s):
                found += 1
    return found


def fiber_degree_sums(m):
    """For each target edge, the sum of edge degrees over its preimages."""
    sums = Counter()
    for e, (f, _) in m.edge_map.items():
        sums[f] += m.edge_degrees[e]
    return dict(sums)


def local_sums(m, v):
    """For vertex ``v``: target edge at m(v) -> sum of degrees of incident edges over it."""
    sums = Counter()
    for e, side in m.source.incident(v):
        f, _ = m.edge_map[e.id]
        sums[f] += m.edge_degrees[e.id]
    return dict(sums)


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]
