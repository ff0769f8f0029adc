"""Local comparisons of a graph against balls of the integer lattice graph."""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .graph import BallMode, Graph, RootedBall, extract_ball, rooted_isomorphism


@lru_cache(maxsize=None)
def lattice_points(d: int, r: int) -> tuple[tuple[int, ...], ...]:
    """Points of ``Z^d`` with l1 norm at most ``r``, sorted by (norm, lex)."""
    pts = [p for p in itertools.product(range(-r, r + 1), repeat=d) if sum(map(abs, p)) <= r]
    return tuple(sorted(pts, key=lambda p: (sum(map(abs, p)), p)))


@lru_cache(maxsize=None)
def lattice_ball(d: int, r: int, mode: BallMode = BallMode.FULL) -> RootedBall:
    """Ball of radius ``r`` about the origin in ``L^d``; local vertex 0 is the origin."""
    pts = lattice_points(d, r)
    index = {p: i for i, p in enumerate(pts)}
    edges = []
    for p, i in index.items():
        for k in range(d):
            q = p[:k] + (p[k] + 1,) + p[k + 1 :]
            j = index.get(q)
            if j is not None:
                edges.append((i, j))
    g = Graph.from_edges(len(pts), edges)
    # the lattice is bipartite, so MINUS never removes anything
    depth = tuple(sum(map(abs, p)) for p in pts)
    return RootedBall(g, depth, tuple(range(len(pts))), r, mode)


def unit_index(d: int) -> dict[tuple[int, ...], int]:
    """Local index of each ``+-e_i`` inside :func:`lattice_ball`."""
    pts = lattice_points(d, 1)
    return {p: i for i, p in enumerate(pts) if any(p)}


@dataclass(frozen=True)
class OppositePartition:
    """Neighbours of ``center`` grouped into opposite pairs ``(a, b)`` with ``a < b``.

    ``corner[(x, y)]`` is the common neighbour other than ``center`` of two
    neighbours from different pairs.
    """

    center: int
    pairs: tuple[tuple[int, int], ...]
    corner: dict


def opposite_partition(g: Graph, v: int, d: int) -> OppositePartition | None:
    """Partition of ``N(v)`` into opposite pairs as in a lattice vertex, or ``None``.

    Raises ``ValueError`` when ``v`` does not have degree ``2d``.
    """
    nb = g.adjacency[v]
    if len(nb) != 2 * d:
        raise ValueError(f"vertex {v} has degree {len(nb)}, expected {2 * d}")
    nset = g.neighbor_sets
    partner: dict[int, int] = {}
    corner = {}
    corners_seen = set()
    for x, y in itertools.combinations(nb, 2):
        common = nset[x] & nset[y]
        if len(common) == 1:
            if x in partner or y in partner:
                return None
            partner[x] = y
            partner[y] = x
        elif len(common) == 2:
            (c,) = common - {v}
            corner[(x, y)] = c
        else:
            return None
    if len(partner) != 2 * d:
        return None
    for (x, y), c in corner.items():
        if partner[x] == y or c in corners_seen or c == v or c in nset[v]:
            return None
        corners_seen.add(c)
    if len(corner) != 4 * (d * (d - 1) // 2):
        return None
    pairs = tuple(sorted((min(x, partner[x]), max(x, partner[x])) for x in nb if x < partner[x]))
    return OppositePartition(v, pairs, corner)


@dataclass(frozen=True)
class LocalityResult:
    holds: bool
    failing_vertex: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("LL_THREADS")
    return max(1, int(env)) if env else 1


def ball_matches(g: Graph, v: int, d: int, r: int, mode: BallMode) -> bool:
    """Is the (mode) ball of radius ``r`` at ``v`` rooted-isomorphic to the lattice ball?"""
    target = lattice_ball(d, r, mode)
    if g.degree(v) != 2 * d:
        return False
    ball = extract_ball(g, v, r, mode)
    if ball.graph.n != target.graph.n:
        return False
    seed = None
    if r >= 2 and d >= 1:
        # any isomorphism can be post-composed with a signed permutation, so the
        # opposite pairs may be pinned to the coordinate axes
        part = opposite_partition(g, v, d)
        if part is None:
            return False
        local = {u: i for i, u in enumerate(ball.origin[: 2 * d + 1])}
        units = unit_index(d)
        seed = {}
        for k, (a, b) in enumerate(part.pairs):
            e = tuple(int(i == k) for i in range(d))
            seed[local[a]] = units[e]
            seed[local[b]] = units[tuple(-x for x in e)]
    return rooted_isomorphism(ball, target, seed) is not None


def _check(
    g: Graph, d: int, r: int, mode: BallMode, vertices: Iterable[int] | None, threads: int | None
) -> LocalityResult:
    if d < 1 or r < 0:
        raise ValueError("need d >= 1 and r >= 0")
    verts = sorted(range(g.n) if vertices is None else set(vertices))
    nthreads = _thread_count(threads)
    if nthreads == 1 or len(verts) < 64:
        for v in verts:
            if not ball_matches(g, v, d, r, mode):
                return LocalityResult(False, v)
        return LocalityResult(True)
    chunk = max(16, len(verts) // (4 * nthreads))
    blocks = [verts[i : i + chunk] for i in range(0, len(verts), chunk)]

    def first_bad(block: Sequence[int]) -> int | None:
        for v in block:
            if not ball_matches(g, v, d, r, mode):
                return v
        return None

    with ThreadPoolExecutor(nthreads) as pool:
        for bad in pool.map(first_bad, blocks):
            if bad is not None:
                return LocalityResult(False, bad)
    return LocalityResult(True)


def is_weakly_r_locally(
    g: Graph, d: int, r: int, vertices: Iterable[int] | None = None, threads: int | None = None
) -> LocalityResult:
    """Every MINUS ball of radius ``r`` matches the lattice; reports the least failing vertex."""
    return _check(g, d, r, BallMode.MINUS, vertices, threads)


def is_r_locally(
    g: Graph, d: int, r: int, vertices: Iterable[int] | None = None, threads: int | None = None
) -> LocalityResult:
    """Every full ball of radius ``r`` matches the lattice; reports the least failing vertex."""
    return _check(g, d, r, BallMode.FULL, vertices, threads)


def is_locally_grid(g: Graph) -> LocalityResult:
    """Grid-like local structure for 4-regular graphs.

    At each vertex the neighbours admit a cyclic order ``w1..w4`` such that
    consecutive ones share exactly one further common neighbour ``z_i``, the
    ``z_i`` are distinct, opposite ones share only the centre, and the nine
    vertices carry no edges beyond the twelve this forces.
    """
    nset = g.neighbor_sets
    for v in range(g.n):
        nb = g.adjacency[v]
        if len(nb) != 4:
            return LocalityResult(False, v)
        ok = False
        first = nb[0]
        for rest in itertools.permutations(nb[1:]):
            w = (first,) + rest
            if w[1] > w[3]:
                continue
            zs = []
            good = True
            for i in range(4):
                common = (nset[w[i]] & nset[w[(i + 1) % 4]]) - {v}
                if len(common) != 1:
                    good = False
                    break
                zs.append(next(iter(common)))
            if not good or len(set(zs)) != 4 or any(z in nset[v] for z in zs):
                continue
            if nset[w[0]] & nset[w[2]] != {v} or nset[w[1]] & nset[w[3]] != {v}:
                continue
            nine = {v, *w, *zs}
            if len(nine) != 9 or sum(len(nset[x] & nine) for x in nine) != 24:
                continue
            ok = True
            break
        if not ok:
            return LocalityResult(False, v)
    return LocalityResult(True)
