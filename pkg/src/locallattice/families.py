"""Named quotients of the square lattice: grids, tori, Klein bottles and the strange graphs.

Vertex ``(i, j)`` of a ``p x q`` family graph has id ``i + p*j`` and label ``"i,j"``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .graph import Graph
from .lattice import LatticeAut, SignedPerm, SubgroupSpec, build_quotient, translation_group


class FamilyKind(enum.Enum):
    GRID = "GRID"
    TORUS = "TORUS"
    KLEIN0 = "KLEIN0"
    KLEIN1 = "KLEIN1"
    KLEIN2 = "KLEIN2"
    STRANGE = "STRANGE"
    GEN_TORUS = "GEN_TORUS"
    PROC_I = "PROC_I"
    PROC_II = "PROC_II"


@dataclass(frozen=True)
class FamilyTag:
    kind: FamilyKind
    params: tuple[int, ...]

    def __post_init__(self) -> None:
        validate(self)


def validate(tag: FamilyTag) -> None:
    k, p = tag.kind, tag.params
    if k is FamilyKind.GRID:
        _need(len(p) == 2 and min(p) >= 2, "grid needs p, q >= 2")
    elif k is FamilyKind.TORUS:
        _need(len(p) == 3, "torus needs p, q, delta")
        _need(p[0] >= 3 and p[1] >= 3, "torus needs p, q >= 3")
        _need(0 <= p[2] <= p[0] // 2, "torus needs 0 <= delta <= p/2")
    elif k in (FamilyKind.KLEIN0, FamilyKind.KLEIN1, FamilyKind.KLEIN2):
        _need(len(p) == 2 and min(p) >= 3, "klein needs p, q >= 3")
        odd = k is FamilyKind.KLEIN1
        _need((p[0] % 2 == 1) == odd, f"{k.value} needs p {'odd' if odd else 'even'}")
    elif k is FamilyKind.STRANGE:
        _need(len(p) == 2 and min(p) >= 3, "strange needs p, q >= 3")
    elif k is FamilyKind.GEN_TORUS:
        _need(len(p) == 4, "generalised torus needs two 2-vectors")
        _need(p[0] * p[3] - p[1] * p[2] != 0, "vectors must be linearly independent")
    elif k in (FamilyKind.PROC_I, FamilyKind.PROC_II):
        _need(len(p) >= 2 and p[0] > 0 and p[1] > 0, "procedures need k, l >= 1")


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _vid(p: int, i: int, j: int) -> int:
    return i + p * j


def _grid_edges(p: int, q: int) -> list[tuple[int, int]]:
    edges = []
    for j in range(q):
        for i in range(p):
            if i + 1 < p:
                edges.append((_vid(p, i, j), _vid(p, i + 1, j)))
            if j + 1 < q:
                edges.append((_vid(p, i, j), _vid(p, i, j + 1)))
    return edges


def _labels(p: int, q: int) -> list[str]:
    return [f"{v % p},{v // p}" for v in range(p * q)]


def _family_graph(p: int, q: int, extra: list[tuple[tuple[int, int], tuple[int, int]]]) -> Graph:
    edges = _grid_edges(p, q)
    for (a, b), (c, d) in extra:
        if not (0 <= a < p and 0 <= b < q and 0 <= c < p and 0 <= d < q):
            raise ValueError(f"wrap edge {(a, b)}-{(c, d)} leaves the {p}x{q} grid")
        u, v = _vid(p, a, b), _vid(p, c, d)
        if u != v:
            edges.append((u, v))
    return Graph.from_edges(p * q, edges, _labels(p, q))


def build_grid(p: int, q: int) -> Graph:
    FamilyTag(FamilyKind.GRID, (p, q))
    return _family_graph(p, q, [])


def build_torus(p: int, q: int, delta: int) -> Graph:
    FamilyTag(FamilyKind.TORUS, (p, q, delta))
    extra = [((i, 0), ((i + delta) % p, q - 1)) for i in range(p)]
    extra += [((0, j), (p - 1, j)) for j in range(q)]
    return _family_graph(p, q, extra)


def _klein_kind(p: int, t: int) -> FamilyKind:
    kinds = {0: FamilyKind.KLEIN0, 1: FamilyKind.KLEIN1, 2: FamilyKind.KLEIN2}
    if t not in kinds:
        raise ValueError("klein type must be 0, 1 or 2")
    return kinds[t]


def build_klein(p: int, q: int, t: int) -> Graph:
    FamilyTag(_klein_kind(p, t), (p, q))
    extra = [((0, j), (p - 1, j)) for j in range(q)]
    if t in (0, 1):
        extra += [((i, 0), (p - i - 1, q - 1)) for i in range(p)]
    else:
        # p - i wraps to column 0 when i = 0
        extra += [((i, 0), ((p - i) % p, q - 1)) for i in range(p)]
    return _family_graph(p, q, extra)


def build_strange(p: int, q: int, branch: str | None = None) -> Graph:
    """Strange graph; ``branch`` ('le' or 'ge') forces a definition when ``p == q``."""
    FamilyTag(FamilyKind.STRANGE, (p, q))
    if branch is None:
        branch = "le" if p <= q else "ge"
    if branch == "le":
        _need(p <= q, "the 'le' branch needs p <= q")
        extra = [((i, 0), (p - 1, q - p + i)) for i in range(p)]
        extra += [((0, j), (j, q - 1)) for j in range(p)]
        extra += [((0, j), (p - 1, j - p)) for j in range(p, q)]
    elif branch == "ge":
        _need(p >= q, "the 'ge' branch needs p >= q")
        extra = [((i, 0), (0, q - 1 - i)) for i in range(q)]
        extra += [((p - 1 - i, q - 1), (p - 1, i)) for i in range(q)]
        extra += [((i, q - 1), (i + q, 0)) for i in range(p - q)]
    else:
        raise ValueError("branch must be 'le' or 'ge'")
    return _family_graph(p, q, extra)


def build_gen_torus(v1: Sequence[int], v2: Sequence[int]) -> Graph:
    FamilyTag(FamilyKind.GEN_TORUS, (*v1, *v2))
    return build_quotient(translation_group([tuple(v1), tuple(v2)])).graph


# the same families as subgroups of Aut(L^2)


def torus_spec(p: int, q: int, delta: int) -> SubgroupSpec:
    return translation_group([(p, 0), (delta, q)])


def procedure_one(k: int, l: int, corner2: int) -> SubgroupSpec:
    """Axis-parallel rectangle with sides ``(k, 0)``, ``(0, l)`` and corner ``A = (corner2/2, 0)``.

    Parallel vertical sides give the translation ``(k, 0)``; the horizontal
    sides are glued by the glide reflection ``(x, y) -> (corner2 + k - x, y + l)``.
    """
    FamilyTag(FamilyKind.PROC_I, (k, l, corner2))
    glide = LatticeAut(SignedPerm((-1, 2)), (corner2 + k, l))
    return SubgroupSpec(2, [LatticeAut.translation((k, 0)), glide])


def procedure_two(k: int, l: int, c2: int, rotated: bool = False) -> SubgroupSpec:
    """Diagonal rectangle with sides ``(k/2, k/2)`` and ``(l, -l)``.

    The glide moves by ``(k/2, k/2)`` and reflects in ``y = x + c2/2``.  With
    ``rotated`` the sides are ``(-k/2, k/2)`` and ``(l, l)`` and the axis is
    ``x + y = c2/2``.
    """
    FamilyTag(FamilyKind.PROC_II, (k, l, c2))
    if not rotated:
        _need((k - c2) % 2 == 0, "k - c2 must be even")
        glide = LatticeAut(SignedPerm((2, 1)), ((k - c2) // 2, (k + c2) // 2))
        return SubgroupSpec(2, [glide, LatticeAut.translation((l, -l))])
    _need((c2 - k) % 2 == 0, "c2 - k must be even")
    glide = LatticeAut(SignedPerm((-2, -1)), ((c2 - k) // 2, (c2 + k) // 2))
    return SubgroupSpec(2, [glide, LatticeAut.translation((l, l))])


def klein_spec(p: int, q: int, t: int) -> SubgroupSpec:
    FamilyTag(_klein_kind(p, t), (p, q))
    return procedure_one(p, q, -1 if t in (0, 1) else 0)


def strange_spec(p: int, q: int, branch: str | None = None) -> SubgroupSpec:
    FamilyTag(FamilyKind.STRANGE, (p, q))
    if branch is None:
        branch = "le" if p <= q else "ge"
    if branch == "le":
        return procedure_two(q, p, q - 2 * p)
    return procedure_two(q, p, q - 2, rotated=True)


def family_spec(tag: FamilyTag) -> SubgroupSpec:
    k, p = tag.kind, tag.params
    if k is FamilyKind.TORUS:
        return torus_spec(*p)
    if k in (FamilyKind.KLEIN0, FamilyKind.KLEIN1, FamilyKind.KLEIN2):
        return klein_spec(p[0], p[1], int(k.value[-1]))
    if k is FamilyKind.STRANGE:
        return strange_spec(*p)
    if k is FamilyKind.GEN_TORUS:
        return translation_group([p[:2], p[2:]])
    if k is FamilyKind.PROC_I:
        return procedure_one(*p)
    if k is FamilyKind.PROC_II:
        return procedure_two(*p)
    raise ValueError(f"{k.value} is not a quotient family")


def build_family(tag: FamilyTag) -> Graph:
    k, p = tag.kind, tag.params
    if k is FamilyKind.GRID:
        return build_grid(*p)
    if k is FamilyKind.TORUS:
        return build_torus(*p)
    if k in (FamilyKind.KLEIN0, FamilyKind.KLEIN1, FamilyKind.KLEIN2):
        return build_klein(p[0], p[1], int(k.value[-1]))
    if k is FamilyKind.STRANGE:
        return build_strange(*p)
    return build_quotient(family_spec(tag)).graph
