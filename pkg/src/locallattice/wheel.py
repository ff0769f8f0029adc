"""4-cycle wheel families and the closed surface they glue up to."""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Sequence

from .cover import SurfaceKind
from .graph import Graph, canonical_cycle, enumerate_4cycles


class WheelSearchIndeterminate(RuntimeError):
    code = "INDETERMINATE"


class MalformedCertificateError(ValueError):
    code = "MALFORMED_CERTIFICATE"


Cycle = tuple[int, int, int, int]


@dataclass(frozen=True)
class WheelCertificate:
    """A family of 4-cycles, each stored in canonical cyclic order."""

    cycles: tuple[Cycle, ...]

    def at(self, v: int) -> list[Cycle]:
        return [c for c in self.cycles if v in c]


def _edges_of(c: Sequence[int]) -> list[tuple[int, int]]:
    k = len(c)
    return [(min(c[i], c[(i + 1) % k]), max(c[i], c[(i + 1) % k])) for i in range(k)]


def _spokes(v: int, c: Cycle) -> tuple[int, int, int]:
    """Neighbours of ``v`` on ``c`` and the opposite corner."""
    i = c.index(v)
    return c[(i + 1) % 4], c[(i + 3) % 4], c[(i + 2) % 4]


def wheel_at(g: Graph, v: int, cycles: Sequence[Cycle]) -> bool:
    """Do these cycles through ``v`` form the 3x3 wheel centred at ``v``?

    Their spoke pairs must run once round ``N(v)`` and the four far corners
    must be distinct vertices outside ``{v} | N(v)``.
    """
    nb = g.neighbor_sets[v]
    if len(cycles) != 4 or len(nb) != 4:
        return False
    pairs = []
    corners = set()
    for c in cycles:
        if v not in c:
            return False
        a, b, far = _spokes(v, c)
        if a not in nb or b not in nb or far in nb or far == v:
            return False
        pairs.append((a, b))
        corners.add(far)
    if len(corners) != 4:
        return False
    return _single_cycle(pairs, nb)


def _single_cycle(pairs: list[tuple[int, int]], nodes: frozenset[int] | set[int]) -> bool:
    adj: dict[int, list[int]] = defaultdict(list)
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    if set(adj) != set(nodes) or any(len(x) != 2 for x in adj.values()):
        return False
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(nodes) and len(pairs) == len(nodes)


def is_wheel_family(g: Graph, cycles: Sequence[Cycle]) -> bool:
    by_vertex: dict[int, list[Cycle]] = defaultdict(list)
    for c in cycles:
        for v in c:
            by_vertex[v].append(c)
    return all(wheel_at(g, v, by_vertex.get(v, [])) for v in range(g.n))


def find_wheel_family(g: Graph, node_budget: int = 200_000) -> WheelCertificate | None:
    """A family of 4-cycles giving every vertex its 3x3 wheel, or ``None``.

    The family of all 4-cycles is tried first.  Otherwise an exact search
    picks, for the most constrained edge still short of two cycles, which
    cycle covers it next.  Exceeding ``node_budget`` search nodes raises
    :class:`WheelSearchIndeterminate`.
    """
    if g.regular_degree() != 4:
        return None
    cycles = enumerate_4cycles(g)
    if is_wheel_family(g, cycles):
        return WheelCertificate(tuple(cycles))

    edge_cycles: dict[tuple[int, int], list[int]] = defaultdict(list)
    cyc_edges = []
    for k, c in enumerate(cycles):
        es = _edges_of(c)
        cyc_edges.append(es)
        for e in es:
            edge_cycles[e].append(k)
    all_edges = g.edges()
    if any(e not in edge_cycles for e in all_edges):
        return None
    count = {e: 0 for e in all_edges}
    vcount = [0] * g.n
    chosen: list[int] = []
    banned = [0] * len(cycles)
    nodes = 0

    def usable(k: int) -> bool:
        if banned[k]:
            return False
        if any(count[e] >= 2 for e in cyc_edges[k]):
            return False
        return all(vcount[v] < 4 for v in cycles[k])

    def apply(k: int, delta: int) -> None:
        for e in cyc_edges[k]:
            count[e] += delta
        for v in cycles[k]:
            vcount[v] += delta

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise WheelSearchIndeterminate(f"no decision within {node_budget} search nodes")
        best = None
        best_opts: list[int] = []
        for e in all_edges:
            need = 2 - count[e]
            if need <= 0:
                continue
            opts = [k for k in edge_cycles[e] if k not in chosen_set and usable(k)]
            if len(opts) < need:
                return False
            if best is None or len(opts) < len(best_opts):
                best, best_opts = e, opts
        if best is None:
            return is_wheel_family(g, [cycles[k] for k in chosen])
        tried = []
        for k in best_opts:
            chosen.append(k)
            chosen_set.add(k)
            apply(k, 1)
            if search():
                return True
            apply(k, -1)
            chosen.pop()
            chosen_set.discard(k)
            banned[k] += 1
            tried.append(k)
        for k in tried:
            banned[k] -= 1
        return False

    chosen_set: set[int] = set()
    if search():
        return WheelCertificate(tuple(sorted(cycles[k] for k in chosen)))
    return None


def vertex_rotation_check(cert: WheelCertificate, g: Graph) -> tuple[bool, int | None]:
    """Faces at each vertex must form one cycle, consecutive faces sharing an edge at that vertex."""
    by_vertex: dict[int, list[Cycle]] = defaultdict(list)
    for c in cert.cycles:
        for v in c:
            by_vertex[v].append(c)
    for v in range(g.n):
        faces = by_vertex.get(v, [])
        if not faces:
            return False, v
        pairs = []
        for c in faces:
            a, b, _ = _spokes(v, c)
            pairs.append((a, b))
        if not _single_cycle(pairs, {x for p in pairs for x in p}):
            return False, v
    return True, None


@dataclass(frozen=True)
class SurfaceReport:
    vertices: int
    edges: int
    faces: int
    euler: int
    orientable: bool
    kind: SurfaceKind


def glue_surface(cert: WheelCertificate, g: Graph) -> SurfaceReport:
    """Glue the 4-cycles as square faces and classify the closed surface.

    Faces are oriented by propagation across shared edges; orientable means the
    two faces on every edge traverse it in opposite directions.
    """
    faces = [tuple(c) for c in cert.cycles]
    if len(set(canonical_cycle(f) for f in faces)) != len(faces):
        raise MalformedCertificateError("repeated face")
    incidence: dict[tuple[int, int], list[int]] = defaultdict(list)
    for k, f in enumerate(faces):
        if len(f) != 4 or len(set(f)) != 4:
            raise MalformedCertificateError(f"face {f} is not a 4-cycle")
        for e in _edges_of(f):
            if not g.has_edge(*e):
                raise MalformedCertificateError(f"face {f} uses non-edge {e}")
            incidence[e].append(k)
    for e in g.edges():
        if len(incidence.get(e, [])) != 2:
            raise MalformedCertificateError(f"edge {e} lies on {len(incidence.get(e, []))} faces, expected 2")
    ok, bad = vertex_rotation_check(cert, g)
    if not ok:
        raise MalformedCertificateError(f"faces at vertex {bad} do not form a single disc")

    def directed(k: int, sign: int) -> set[tuple[int, int]]:
        f = faces[k] if sign > 0 else faces[k][::-1]
        return {(f[i], f[(i + 1) % 4]) for i in range(4)}

    orient = [0] * len(faces)
    orientable = True
    for start in range(len(faces)):
        if orient[start]:
            continue
        orient[start] = 1
        queue = deque([start])
        while queue:
            k = queue.popleft()
            dk = directed(k, orient[k])
            for e in _edges_of(faces[k]):
                for j in incidence[e]:
                    if j == k:
                        continue
                    # j must run along e against k
                    fwd = (e[0], e[1]) in dk
                    want = -1 if ((e[0], e[1]) in directed(j, 1)) == fwd else 1
                    if orient[j] == 0:
                        orient[j] = want
                        queue.append(j)
                    elif orient[j] != want:
                        orientable = False
    v, e, f = g.n, g.num_edges, len(faces)
    chi = v - e + f
    if chi == 0:
        kind = SurfaceKind.TORUS if orientable else SurfaceKind.KLEIN_BOTTLE
    else:
        kind = SurfaceKind.OTHER
    return SurfaceReport(v, e, f, chi, orientable, kind)
