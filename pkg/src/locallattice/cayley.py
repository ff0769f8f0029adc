"""A finite Cayley graph that is 2-locally L^3 but is not covered by L^3, and its products.

The group is realised inside ``Aff(F_2^4)``.  Products are read left to right:
``(a.b)(x) = b(a(x))``.  Vertex labels spell a shortest word, with capital
letters for inverses (``"aC"`` is ``a c^-1``).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .graph import Graph

# rows of M as bit masks, bit j of row i is M[i][j]
_M_ROWS = ((0, 0, 1, 0), (1, 1, 0, 0), (0, 1, 1, 0), (0, 0, 0, 1))
EXPECTED_ORDER = 112
LETTERS = ("a", "b", "c", "A", "B", "C")

Affine = tuple[tuple[int, ...], int]


def _mat(rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    return tuple(sum(bit << j for j, bit in enumerate(r)) for r in rows)


def _vec(bits: Sequence[int]) -> int:
    return sum(bit << i for i, bit in enumerate(bits))


def _matvec(m: tuple[int, ...], x: int) -> int:
    return sum((bin(row & x).count("1") & 1) << i for i, row in enumerate(m))


def _matmul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    n = len(a)
    cols = [sum(((b[i] >> j) & 1) << i for i in range(n)) for j in range(n)]
    return tuple(sum((bin(a[i] & cols[j]).count("1") & 1) << j for j in range(n)) for i in range(n))


def _identity(n: int = 4) -> tuple[int, ...]:
    return tuple(1 << i for i in range(n))


def affine_after(f: Affine, g: Affine) -> Affine:
    """``f`` after ``g`` as maps of ``F_2^4``."""
    return _matmul(f[0], g[0]), _matvec(f[0], g[1]) ^ f[1]


def product(x: Affine, y: Affine) -> Affine:
    """Left-to-right group product ``x.y``, the map ``y`` after ``x``."""
    return affine_after(y, x)


def affine_apply(f: Affine, x: int) -> int:
    return _matvec(f[0], x) ^ f[1]


def matrix_power(k: int) -> tuple[int, ...]:
    m = _mat(_M_ROWS)
    out = _identity()
    for _ in range(k):
        out = _matmul(m, out)
    return out


def example_generators() -> tuple[Affine, Affine, Affine]:
    a = (matrix_power(1), _vec((1, 0, 0, 1)))
    b = (matrix_power(2), _vec((1, 0, 1, 1)))
    c = (matrix_power(4), _vec((0, 1, 0, 1)))
    return a, b, c


def affine_inverse(f: Affine) -> Affine:
    k = 1
    g = f
    ident = (_identity(), 0)
    while g != ident:
        g = affine_after(f, g)
        k += 1
    out = ident
    for _ in range(k - 1):
        out = affine_after(f, out)
    return out


class GroupConstructionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CayleyGraph:
    """Cayley graph with right multiplication table.

    ``right[g][k]`` is the index of ``g . s_k`` and ``inverse_letter[k]`` the
    index of ``s_k^-1`` among the generators.
    """

    graph: Graph
    right: tuple[tuple[int, ...], ...]
    letters: tuple[str, ...]
    inverse_letter: tuple[int, ...]
    words: tuple[str, ...]

    @property
    def order(self) -> int:
        return self.graph.n

    def element(self, word: str) -> int:
        """Index of the element spelled by ``word`` (letters from ``self.letters``)."""
        g = 0
        pos = {name: k for k, name in enumerate(self.letters)}
        for ch in _tokens(word, self.letters):
            g = self.right[g][pos[ch]]
        return g

    @cached_property
    def multiplication(self) -> list[list[int]]:
        """Full table ``mult[g][h] = g . h``, built from words for ``h``."""
        n = self.order
        word_of = [self._letter_path(h) for h in range(n)]
        table = []
        for g in range(n):
            row = []
            for h in range(n):
                x = g
                for k in word_of[h]:
                    x = self.right[x][k]
                row.append(x)
            table.append(row)
        return table

    def _letter_path(self, h: int) -> list[int]:
        pos = {name: k for k, name in enumerate(self.letters)}
        return [pos[t] for t in _tokens(self.words[h], self.letters)] if h else []


def _tokens(word: str, letters: Sequence[str]) -> list[str]:
    if word in ("", "Id"):
        return []
    if all(len(x) == 1 for x in letters):
        return list(word)
    return word.split(".")


def _cayley_from(elements_gen, ident, mul, letters: Sequence[str], inv: Sequence[int], join: str = "") -> CayleyGraph:
    index = {ident: 0}
    elems = [ident]
    words = ["Id"]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for k, s in enumerate(elements_gen):
            h = mul(elems[i], s)
            if h not in index:
                index[h] = len(elems)
                elems.append(h)
                prefix = "" if i == 0 else words[i] + join
                words.append(prefix + letters[k])
                queue.append(index[h])
    right = tuple(tuple(index[mul(g, s)] for s in elements_gen) for g in elems)
    edges = {(min(g, h), max(g, h)) for g, row in enumerate(right) for h in row if g != h}
    graph = Graph.from_edges(len(elems), sorted(edges), words)
    return CayleyGraph(graph, right, tuple(letters), tuple(inv), tuple(words))


def build_example_group() -> CayleyGraph:
    """Cayley graph of the order-112 group on ``a, b, c`` and their inverses.

    Raises :class:`GroupConstructionError` if the closure has the wrong order.
    """
    a, b, c = example_generators()
    gens = [a, b, c, affine_inverse(a), affine_inverse(b), affine_inverse(c)]
    if matrix_power(7) != _identity() or matrix_power(1) == _identity():
        raise GroupConstructionError("M does not have order 7")
    ident = (_identity(), 0)
    cg = _cayley_from(gens, ident, product, LETTERS, (3, 4, 5, 0, 1, 2))
    if cg.order != EXPECTED_ORDER:
        raise GroupConstructionError(f"closure has {cg.order} elements, expected {EXPECTED_ORDER}")
    return cg


def build_product_extension(d: int, max_d: int = 5) -> CayleyGraph:
    """Cayley graph of ``G x Z_14^(d-3)`` with generators ``(s, 0)`` and ``(Id, +-f_i)``."""
    if d < 3:
        raise ValueError("d must be at least 3")
    if d > max_d:
        raise ValueError(f"d = {d} exceeds the cap {max_d}")
    base = build_example_group()
    if d == 3:
        return base
    k = d - 3
    letters = list(LETTERS)
    gens: list[tuple[int, tuple[int, ...]]] = [(base.element(x), (0,) * k) for x in LETTERS]
    inv = [3, 4, 5, 0, 1, 2]
    for i in range(k):
        e = tuple(int(j == i) for j in range(k))
        gens.append((0, e))
        gens.append((0, tuple((-x) % 14 for x in e)))
        letters += [f"f{i + 1}", f"F{i + 1}"]
        inv += [len(inv) + 1, len(inv)]
    mult = base.multiplication

    def mul(x, y):
        return mult[x[0]][y[0]], tuple((p + q) % 14 for p, q in zip(x[1], y[1]))

    return _cayley_from(gens, (0, (0,) * k), mul, letters, inv, join=".")


def free_reduce(word: Sequence[int], inverse_letter: Sequence[int]) -> list[int]:
    out: list[int] = []
    for k in word:
        if out and inverse_letter[out[-1]] == k:
            out.pop()
        else:
            out.append(k)
    return out


@dataclass(frozen=True)
class RelatorCount:
    length: int
    nontrivial: tuple[str, ...]
    trivial: int


def enumerate_relators(cg: CayleyGraph, length: int, max_length: int = 8) -> RelatorCount:
    """Words of the given length evaluating to the identity, split by free triviality."""
    if length < 1:
        raise ValueError("length must be positive")
    if length > max_length:
        raise ValueError(f"length {length} exceeds the cap {max_length}")
    s = len(cg.letters)
    nontrivial = []
    trivial = 0
    right = cg.right
    for word in itertools.product(range(s), repeat=length):
        g = 0
        for k in word:
            g = right[g][k]
        if g != 0:
            continue
        if free_reduce(word, cg.inverse_letter):
            nontrivial.append("".join(cg.letters[k] for k in word))
        else:
            trivial += 1
    return RelatorCount(length, tuple(nontrivial), trivial)


@dataclass(frozen=True)
class Abelianization:
    order: int
    cyclic: bool
    commutator_order: int
    generator_orders: tuple[int, ...]


def abelianization(cg: CayleyGraph) -> Abelianization:
    mult = cg.multiplication
    n = cg.order
    inv = [row.index(0) for row in mult]
    comms = {mult[mult[g][h]][mult[inv[g]][inv[h]]] for g in range(n) for h in range(n)}
    sub = {0}
    frontier = list(sub)
    while frontier:
        nxt = []
        for x in frontier:
            for c in comms:
                y = mult[x][c]
                if y not in sub:
                    sub.add(y)
                    nxt.append(y)
        frontier = nxt
    quotient = n // len(sub)

    def coset_order(g: int) -> int:
        k, x = 1, g
        while x not in sub:
            x = mult[x][g]
            k += 1
        return k

    orders = tuple(coset_order(cg.right[0][k]) for k in range(len(cg.letters)))
    cyclic = any(coset_order(g) == quotient for g in range(n))
    return Abelianization(quotient, cyclic, len(sub), orders)


def counterexample_relations(cg: CayleyGraph) -> dict[str, bool]:
    """The three defining relations, checked in the concrete realisation."""
    e = cg.element
    return {
        "a^-1 b = c^2": e("Ab") == e("cc"),
        "b^-1 c = a^2": e("Bc") == e("aa"),
        "c^-1 a = b^2": e("Ca") == e("bb"),
    }


def verify_counterexample(cg: CayleyGraph | None = None) -> dict:
    """Run every check on the d = 3 example; the dict maps check names to results."""
    from .cover import extend_cover, seed_map
    from .graph import girth, is_bipartite
    from .probe import is_r_locally, is_weakly_r_locally

    cg = cg or build_example_group()
    g = cg.graph
    rel4 = enumerate_relators(cg, 4)
    odd = {k: len(enumerate_relators(cg, k).nontrivial) for k in (1, 2, 3, 5)}
    ab = abelianization(cg)
    cover = extend_cover(g, seed_map(g, 0, 3))
    obs = cover.obstruction
    return {
        "order": cg.order,
        "regular_degree": g.regular_degree(),
        "bipartite": is_bipartite(g)[0],
        "girth": girth(g),
        "relations": counterexample_relations(cg),
        "relators_length_4": len(rel4.nontrivial),
        "relators_other_lengths": odd,
        "abelianization_order": ab.order,
        "abelianization_cyclic": ab.cyclic,
        "two_locally_L3": bool(is_r_locally(g, 3, 2)),
        "weakly_three_locally_L3": bool(is_weakly_r_locally(g, 3, 3)),
        "cover_status": cover.status.value,
        "obstruction": None if obs is None else obs.tag.value,
    }
