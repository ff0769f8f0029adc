import itertools
import random

import pytest

from locallattice.graph import Graph


def cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def random_graph(n, p, rng):
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def brute_4cycles(g):
    """Every 4-cycle via ordered quadruples; each cycle appears 8 times."""
    seen = set()
    for a, b, c, d in itertools.permutations(range(g.n), 4):
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(c, d) and g.has_edge(d, a):
            seen.add(frozenset([(min(a, b), max(a, b)), (min(b, c), max(b, c)),
                                (min(c, d), max(c, d)), (min(d, a), max(d, a))]))
    return seen


def brute_orbit_count(spec, radius):
    """Orbits of Z^d under spec, by union-find on a box closed under generators modulo the box."""
    d = spec.d
    pts = list(itertools.product(range(-radius, radius + 1), repeat=d))
    index = {p: k for k, p in enumerate(pts)}
    parent = list(range(len(pts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    gens = list(spec.generators) + [g.inverse() for g in spec.generators]
    for p in pts:
        for g in gens:
            q = g.apply(p)
            if q in index:
                a, b = find(index[p]), find(index[q])
                if a != b:
                    parent[a] = b
    return len({find(index[p]) for p in pts if all(abs(c) <= radius // 2 for c in p)})


@pytest.fixture
def rng():
    return random.Random(20240611)
