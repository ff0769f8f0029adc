"""Finite simple graphs, rooted balls, and the small search routines built on them."""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

INFINITE = math.inf


class BallMode(enum.Enum):
    FULL = "FULL"
    MINUS = "MINUS"


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``.  Labels are
    optional human-readable names, kept only for reporting.
    """

    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            nbrs[u].add(v)
            nbrs[v].add(u)
        if labels is not None:
            if len(labels) != n:
                raise ValueError("one label per vertex required")
            labels = tuple(str(x) for x in labels)
        return cls(tuple(tuple(sorted(s)) for s in nbrs), labels)

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def __len__(self) -> int:
        return len(self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def regular_degree(self) -> int | None:
        """Common degree if the graph is regular, else ``None``."""
        degs = {len(a) for a in self.adjacency}
        if len(degs) == 1:
            return degs.pop()
        return 0 if not degs else None

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int32)
        indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        flat = [v for a in self.adjacency for v in a]
        return indptr, np.asarray(flat, dtype=np.int32)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash(self.adjacency)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class RootedBall:
    """A ball relabelled so that the root is vertex 0.

    ``depth[i]`` is the distance of local vertex ``i`` from the root and
    ``origin[i]`` the vertex it came from in the parent graph.
    """

    graph: Graph
    depth: tuple[int, ...]
    origin: tuple[int, ...]
    radius: int
    mode: BallMode

    @property
    def root(self) -> int:
        return 0

    def layer_sizes(self) -> tuple[int, ...]:
        sizes = [0] * (self.radius + 1)
        for t in self.depth:
            sizes[t] += 1
        return tuple(sizes)


def bfs_depths(g: Graph, source: int, limit: int | None = None) -> dict[int, int]:
    """Distances from ``source``, optionally truncated at ``limit``."""
    dist = {source: 0}
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u]
        if limit is not None and du >= limit:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = du + 1
                queue.append(w)
    return dist


def distance(g: Graph, u: int, v: int) -> int | float:
    for x in (u, v):
        if not 0 <= x < g.n:
            raise ValueError(f"vertex {x} out of range for {g.n} vertices")
    if u == v:
        return 0
    return bfs_depths(g, u).get(v, INFINITE)


def diameter(g: Graph) -> int | float:
    """Exact diameter by growing all BFS balls at once as bitsets."""
    n = g.n
    if n <= 1:
        return 0
    full = (1 << n) - 1
    reach = [1 << v for v in range(n)]
    adj = g.adjacency
    t = 0
    while True:
        if all(r == full for r in reach):
            return t
        nxt = []
        changed = False
        for v in range(n):
            r = reach[v]
            for w in adj[v]:
                r |= reach[w]
            if r != reach[v]:
                changed = True
            nxt.append(r)
        if not changed:
            return INFINITE
        reach = nxt
        t += 1


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(bfs_depths(g, 0)) == g.n


def extract_ball(g: Graph, v: int, r: int, mode: BallMode = BallMode.FULL) -> RootedBall:
    """Induced ball of radius ``r`` around ``v``.

    In ``MINUS`` mode edges joining two vertices at depth exactly ``r`` are
    dropped.  Local vertices are numbered in BFS discovery order.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    order = [v]
    dist = {v: 0}
    adj = g.adjacency
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        du = dist[u]
        if du == r:
            continue
        for w in adj[u]:
            if w not in dist:
                dist[w] = du + 1
                order.append(w)
    local = {u: k for k, u in enumerate(order)}
    nbrs: list[list[int]] = [[] for _ in order]
    for u in order:
        lu = local[u]
        du = dist[u]
        for w in adj[u]:
            lw = local.get(w)
            if lw is None:
                continue
            if mode is BallMode.MINUS and du == r and dist[w] == r:
                continue
            nbrs[lu].append(lw)
    ball = Graph(tuple(tuple(sorted(a)) for a in nbrs))
    return RootedBall(ball, tuple(dist[u] for u in order), tuple(order), r, mode)


def is_bipartite(g: Graph) -> tuple[bool, list[int] | None]:
    """Two-colouring test; on failure returns an odd closed walk as a vertex cycle."""
    colour = [-1] * g.n
    parent = [-1] * g.n
    adj = g.adjacency
    for s in range(g.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    parent[w] = u
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return False, _odd_cycle(parent, u, w)
    return True, None


def _odd_cycle(parent: list[int], u: int, w: int) -> list[int]:
    pu = [u]
    while parent[pu[-1]] >= 0:
        pu.append(parent[pu[-1]])
    pw = [w]
    while parent[pw[-1]] >= 0:
        pw.append(parent[pw[-1]])
    common = set(pu) & set(pw)
    a = next(x for x in pu if x in common)
    left = pu[: pu.index(a) + 1]
    right = pw[: pw.index(a)]
    return list(reversed(left)) + right


def girth(g: Graph) -> int | float:
    best = INFINITE
    adj = g.adjacency
    for s in range(g.n):
        dist = {s: 0}
        par = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    par[w] = u
                    queue.append(w)
                elif par[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Least rotation of the lexicographically least orientation."""
    k = len(cycle)
    forms = []
    for seq in (list(cycle), list(reversed(cycle))):
        for i in range(k):
            forms.append(tuple(seq[i:] + seq[:i]))
    return min(forms)


def enumerate_4cycles(g: Graph) -> list[tuple[int, ...]]:
    """All 4-cycles, each in canonical form, sorted."""
    out = set()
    adj = g.adjacency
    nset = g.neighbor_sets
    for a in range(g.n):
        for b in adj[a]:
            if b <= a:
                continue
            for d in adj[a]:
                if d <= a or d == b:
                    continue
                for c in nset[b] & nset[d]:
                    if c <= a:
                        continue
                    out.add(canonical_cycle((a, b, c, d)))
    return sorted(out)


def _bfs_order(g: Graph, root: int) -> tuple[list[int], list[int]]:
    order = [root]
    parent = {root: -1}
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for w in g.adjacency[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
    return order, [parent[u] for u in order]


def _extend_isomorphism(
    a: Graph,
    b: Graph,
    fixed: Mapping[int, int],
    order: list[int],
    parents: list[int],
    a_colour: Sequence[int] | None = None,
    b_colour: Sequence[int] | None = None,
) -> dict[int, int] | None:
    """Backtracking along a BFS order of ``a``; candidates come from the parent's image."""
    fmap = dict(fixed)
    used = set(fmap.values())
    if len(used) != len(fmap):
        return None
    for x, y in fmap.items():
        if a.degree(x) != b.degree(y):
            return None
        if a_colour is not None and a_colour[x] != b_colour[y]:
            return None
        for z in a.adjacency[x]:
            if z in fmap and not b.has_edge(y, fmap[z]):
                return None
    todo = [(x, p) for x, p in zip(order, parents) if x not in fmap]
    if not todo:
        return fmap
    a_nb = a.adjacency
    b_nb = b.adjacency
    b_set = b.neighbor_sets

    def candidates(k: int) -> list[int]:
        x, p = todo[k]
        pool = b_nb[fmap[p]] if p >= 0 else range(b.n)
        mapped = [fmap[z] for z in a_nb[x] if z in fmap]
        dx = len(a_nb[x])
        out = []
        for y in pool:
            if y in used or len(b_nb[y]) != dx:
                continue
            if a_colour is not None and a_colour[x] != b_colour[y]:
                continue
            ys = b_set[y]
            if all(m in ys for m in mapped) and sum(1 for z in b_nb[y] if z in used) == len(mapped):
                out.append(y)
        return out

    stack = [candidates(0)]
    while stack:
        k = len(stack) - 1
        cands = stack[-1]
        x = todo[k][0]
        if x in fmap:
            used.discard(fmap.pop(x))
        if not cands:
            stack.pop()
            continue
        y = cands.pop()
        fmap[x] = y
        used.add(y)
        if k + 1 == len(todo):
            return fmap
        stack.append(candidates(k + 1))
    return None


def rooted_isomorphism(
    a: RootedBall, b: RootedBall, seed: Mapping[int, int] | None = None
) -> dict[int, int] | None:
    """Depth-preserving isomorphism of rooted balls sending root to root, or ``None``.

    ``seed`` optionally pins further local vertices of ``a`` to vertices of
    ``b``; the search is then complete only relative to that choice.
    """
    if a.layer_sizes() != b.layer_sizes() or a.graph.num_edges != b.graph.num_edges:
        return None
    if sorted(zip(a.depth, map(len, a.graph.adjacency))) != sorted(
        zip(b.depth, map(len, b.graph.adjacency))
    ):
        return None
    fixed = {0: 0}
    if seed:
        fixed.update(seed)
    order, parents = _bfs_order(a.graph, 0)
    if len(order) != a.graph.n:
        return None
    return _extend_isomorphism(a.graph, b.graph, fixed, order, parents, a.depth, b.depth)


def rooted_isomorphic(a: RootedBall, b: RootedBall) -> bool:
    return rooted_isomorphism(a, b) is not None


def find_isomorphism(a: Graph, b: Graph) -> dict[int, int] | None:
    """Isomorphism between connected graphs, or ``None``.

    Vertex 0 of ``a`` is tried against every vertex of ``b`` with matching
    degree; the rest is forced quickly on lattice-like graphs.
    """
    if a.n != b.n or a.num_edges != b.num_edges:
        return None
    if sorted(map(len, a.adjacency)) != sorted(map(len, b.adjacency)):
        return None
    if a.n == 0:
        return {}
    if not (is_connected(a) and is_connected(b)):
        raise ValueError("find_isomorphism expects connected graphs")
    order, parents = _bfs_order(a, 0)
    da = _distance_profile(a, 0)
    for y in range(b.n):
        if b.degree(y) != a.degree(0) or _distance_profile(b, y) != da:
            continue
        found = _extend_isomorphism(a, b, {0: y}, order, parents)
        if found is not None:
            return found
    return None


def _distance_profile(g: Graph, v: int) -> tuple[int, ...]:
    dist = bfs_depths(g, v)
    prof = [0] * (max(dist.values()) + 1)
    for t in dist.values():
        prof[t] += 1
    return tuple(prof)


def are_isomorphic(a: Graph, b: Graph) -> bool:
    return find_isomorphism(a, b) is not None


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex ``v`` renamed ``perm[v]``."""
    n = g.n
    return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in g.edges()])


# edge-list text format


def write_edge_list(g: Graph, path: str | Path | None = None) -> str:
    lines = [f"# vertices {g.n}"]
    if g.labels is not None:
        lines.extend(f"# label {v} {lab}" for v, lab in enumerate(g.labels))
    lines.extend(f"{u} {v}" for u, v in g.edges())
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_edge_list(text: str) -> Graph:
    n = None
    edges = []
    labels: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "vertices":
                n = int(parts[1])
            elif len(parts) >= 3 and parts[0] == "label":
                labels[int(parts[1])] = " ".join(parts[2:])
            continue
        line = line.split("#", 1)[0]
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    lab = None
    if labels:
        lab = [labels.get(v, str(v)) for v in range(n)]
    return Graph.from_edges(n, edges, lab)


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


__all__ = [
    "INFINITE",
    "BallMode",
    "Graph",
    "RootedBall",
    "are_isomorphic",
    "bfs_depths",
    "canonical_cycle",
    "diameter",
    "distance",
    "enumerate_4cycles",
    "extract_ball",
    "find_isomorphism",
    "girth",
    "is_bipartite",
    "is_connected",
    "parse_edge_list",
    "read_edge_list",
    "relabel",
    "rooted_isomorphic",
    "rooted_isomorphism",
    "write_edge_list",
]
