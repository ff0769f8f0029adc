"""Automorphisms of the integer lattice graph and finitely generated subgroups of them.

An automorphism is ``x -> sigma(x) + trans`` with ``sigma`` a signed
permutation.  Composition follows function notation: ``(a*b)(x) = a(b(x))``.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .graph import INFINITE, Graph

Vec = tuple[int, ...]


class NonCocompactError(ValueError):
    """Raised when a subgroup's translation lattice has rank below ``d``."""

    code = "NON_COCOMPACT"


@dataclass(frozen=True, order=True)
class SignedPerm:
    """``images[i] = +-(j+1)`` means ``e_i -> +-e_j``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(abs(x) for x in self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a signed permutation: {self.images}")

    @classmethod
    def identity(cls, d: int) -> "SignedPerm":
        return cls(tuple(range(1, d + 1)))

    @property
    def d(self) -> int:
        return len(self.images)

    def apply(self, x: Sequence[int]) -> Vec:
        y = [0] * len(self.images)
        for i, im in enumerate(self.images):
            if im > 0:
                y[im - 1] += x[i]
            else:
                y[-im - 1] -= x[i]
        return tuple(y)

    def __call__(self, x: Sequence[int]) -> Vec:
        return self.apply(x)

    def compose(self, other: "SignedPerm") -> "SignedPerm":
        """``self`` after ``other``."""
        if other.d != self.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")
        out = []
        for im in other.images:
            j = abs(im) - 1
            out.append(self.images[j] if im > 0 else -self.images[j])
        return SignedPerm(tuple(out))

    def __mul__(self, other: "SignedPerm") -> "SignedPerm":
        return self.compose(other)

    def inverse(self) -> "SignedPerm":
        out = [0] * self.d
        for i, im in enumerate(self.images):
            out[abs(im) - 1] = (i + 1) if im > 0 else -(i + 1)
        return SignedPerm(tuple(out))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.d + 1))

    @property
    def det(self) -> int:
        perm = [abs(x) - 1 for x in self.images]
        sign = 1
        seen = [False] * self.d
        for i in range(self.d):
            if seen[i]:
                continue
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        for x in self.images:
            if x < 0:
                sign = -sign
        return sign

    @property
    def order(self) -> int:
        k, p = 1, self
        while not p.is_identity():
            p = p.compose(self)
            k += 1
        return k

    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """Integer matrix acting on column vectors."""
        cols = [self.apply(tuple(int(i == k) for i in range(self.d))) for k in range(self.d)]
        return tuple(tuple(cols[k][j] for k in range(self.d)) for j in range(self.d))


def all_signed_perms(d: int) -> list[SignedPerm]:
    out = []
    for perm in itertools.permutations(range(1, d + 1)):
        for signs in itertools.product((1, -1), repeat=d):
            out.append(SignedPerm(tuple(s * p for s, p in zip(signs, perm))))
    return sorted(out)


def _add(a: Sequence[int], b: Sequence[int]) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Sequence[int], b: Sequence[int]) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def _neg(a: Sequence[int]) -> Vec:
    return tuple(-x for x in a)


def l1(v: Sequence[int]) -> int:
    return sum(abs(x) for x in v)


@dataclass(frozen=True, order=True)
class LatticeAut:
    sigma: SignedPerm
    trans: Vec

    def __post_init__(self) -> None:
        if len(self.trans) != self.sigma.d:
            raise ValueError("translation and point part have different dimensions")
        object.__setattr__(self, "trans", tuple(int(t) for t in self.trans))

    @classmethod
    def identity(cls, d: int) -> "LatticeAut":
        return cls(SignedPerm.identity(d), (0,) * d)

    @classmethod
    def translation(cls, v: Sequence[int]) -> "LatticeAut":
        return cls(SignedPerm.identity(len(v)), tuple(v))

    @classmethod
    def from_images(cls, images: Sequence[int], trans: Sequence[int]) -> "LatticeAut":
        return cls(SignedPerm(tuple(images)), tuple(trans))

    @property
    def d(self) -> int:
        return self.sigma.d

    def apply(self, x: Sequence[int]) -> Vec:
        return _add(self.sigma.apply(x), self.trans)

    def __call__(self, x: Sequence[int]) -> Vec:
        return self.apply(x)

    def compose(self, other: "LatticeAut") -> "LatticeAut":
        """``self`` after ``other``."""
        return LatticeAut(self.sigma.compose(other.sigma), _add(self.sigma.apply(other.trans), self.trans))

    def __mul__(self, other: "LatticeAut") -> "LatticeAut":
        return self.compose(other)

    def inverse(self) -> "LatticeAut":
        inv = self.sigma.inverse()
        return LatticeAut(inv, _neg(inv.apply(self.trans)))

    def power(self, k: int) -> "LatticeAut":
        base = self if k >= 0 else self.inverse()
        out = LatticeAut.identity(self.d)
        for _ in range(abs(k)):
            out = base.compose(out)
        return out

    def is_identity(self) -> bool:
        return self.sigma.is_identity() and not any(self.trans)

    def is_translation(self) -> bool:
        return self.sigma.is_identity()

    @property
    def order(self) -> int | float:
        """Order as a group element; ``INFINITE`` for elements of infinite order."""
        k = self.sigma.order
        return k if self.power(k).is_identity() else INFINITE

    def __str__(self) -> str:
        return f"perm {' '.join(map(str, self.sigma.images))} trans {' '.join(map(str, self.trans))}"


def point_group_closure(gens: Iterable[SignedPerm], d: int | None = None) -> frozenset[SignedPerm]:
    """Subgroup of ``B_d`` generated by ``gens``; ``d`` is needed only when ``gens`` is empty."""
    gens = list(gens)
    if d is None:
        if not gens:
            raise ValueError("need a generator or an explicit d")
        d = gens[0].d
    ident = SignedPerm.identity(d)
    seen = {ident}
    queue = deque([ident])
    while queue:
        s = queue.popleft()
        for g in gens:
            t = g.compose(s)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(seen)


# integer row lattices


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style HNF ``H = U A`` with ``U`` unimodular.

    Nonzero rows of ``H`` come first, pivots are positive, pivot columns strictly
    increase and entries above each pivot lie in ``[0, pivot)``.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    ncols = len(a[0]) if a else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def addmul(dst: int, src: int, k: int) -> None:
        if k:
            a[dst] = [x - k * y for x, y in zip(a[dst], a[src])]
            u[dst] = [x - k * y for x, y in zip(u[dst], u[src])]

    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            swap(r, piv)
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    addmul(i, r, a[i][c] // a[r][c])
                    if a[i][c]:
                        done = False
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            addmul(i, r, a[i][c] // a[r][c])
        r += 1
    return a, u


class Lattice:
    """Subgroup of ``Z^d`` spanned by integer vectors, kept in HNF."""

    def __init__(self, gens: Sequence[Sequence[int]], d: int):
        self.d = d
        self._gens = [tuple(map(int, g)) for g in gens]
        if self._gens:
            h, u = hermite_normal_form(self._gens)
        else:
            h, u = [], []
        self._h = h
        self._u = u
        nz = [i for i, row in enumerate(h) if any(row)]
        self.basis: tuple[Vec, ...] = tuple(tuple(h[i]) for i in nz)
        self.pivots: tuple[int, ...] = tuple(next(c for c, x in enumerate(row) if x) for row in self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.d

    @property
    def index(self) -> int | float:
        if not self.full_rank:
            return INFINITE
        return math.prod(self.basis[i][i] for i in range(self.d))

    def reduce(self, v: Sequence[int]) -> Vec:
        """Canonical coset representative; for full rank it lies in the HNF box."""
        x = list(v)
        for row, c in zip(self.basis, self.pivots):
            q = x[c] // row[c]
            if q:
                x = [a - q * b for a, b in zip(x, row)]
        return tuple(x)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def __contains__(self, v: Sequence[int]) -> bool:
        return self.contains(v)

    def coefficients(self, v: Sequence[int]) -> list[int] | None:
        """Integer ``c`` with ``sum c_k gens_k = v``, or ``None`` if ``v`` is not in the lattice."""
        x = list(v)
        y = [0] * len(self._h)
        for k, (row, c) in enumerate(zip(self.basis, self.pivots)):
            q, rem = divmod(x[c], row[c])
            if rem:
                return None
            y[k] = q
            x = [a - q * b for a, b in zip(x, row)]
        if any(x):
            return None
        m = len(self._gens)
        return [sum(y[k] * self._u[k][j] for k in range(len(self.basis))) for j in range(m)]

    def box(self) -> Iterable[Vec]:
        """All canonical residues of ``Z^d`` modulo a full-rank lattice."""
        if not self.full_rank:
            raise NonCocompactError("residue box needs a full-rank lattice")
        return itertools.product(*(range(self.basis[i][i]) for i in range(self.d)))

    def closest_l1(self, w: Sequence[int], exclude_zero: bool = False) -> tuple[int, Vec]:
        """Least l1 norm on the coset ``w + L`` and a vector attaining it.

        Exact branch and bound over the triangular basis.  With
        ``exclude_zero`` the zero vector itself is not admissible.
        """
        if not self.full_rank:
            raise NonCocompactError("closest vector search needs a full-rank lattice")
        d = self.d
        h = self.basis
        if exclude_zero:
            best_vec = min(h, key=l1)
            best = l1(best_vec)
            w = (0,) * d
        else:
            best_vec = self.reduce(w)
            best = l1(best_vec)
            w = tuple(w)
        found = [best, best_vec]

        def rec(i: int, cur: list[int], partial: int, allzero: bool) -> None:
            if i == d:
                if exclude_zero and allzero:
                    return
                if partial < found[0]:
                    found[0] = partial
                    found[1] = tuple(cur)
                return
            hi = h[i][i]
            base = cur[i]
            budget = found[0] - partial
            # c with |base + c*hi| < budget, nearest first
            c0 = -base // hi
            cands = []
            for c in range(c0 - budget // hi - 1, c0 + budget // hi + 2):
                val = abs(base + c * hi)
                if val < budget:
                    cands.append((val, c))
            cands.sort()
            for val, c in cands:
                if partial + val >= found[0]:
                    break
                nxt = [a + c * b for a, b in zip(cur, h[i])] if c else cur
                rec(i + 1, nxt, partial + val, allzero and c == 0)

        rec(0, list(w), 0, True)
        return found[0], found[1]

    def __repr__(self) -> str:
        return f"Lattice(d={self.d}, basis={self.basis})"


def _matvec_sum(sigmas: Sequence[SignedPerm], v: Sequence[int]) -> Vec:
    out = [0] * len(v)
    for s in sigmas:
        out = [a + b for a, b in zip(out, s.apply(v))]
    return tuple(out)


@dataclass(frozen=True)
class TorsionResult:
    torsion_free: bool
    witness: LatticeAut | None = None
    witness_order: int | None = None

    def __bool__(self) -> bool:
        return self.torsion_free


class SubgroupSpec:
    """Subgroup of ``Aut(L^d)`` given by generators."""

    def __init__(self, d: int, generators: Iterable[LatticeAut]):
        self.d = d
        self.generators: tuple[LatticeAut, ...] = tuple(generators)
        for g in self.generators:
            if g.d != d:
                raise ValueError(f"generator {g} has dimension {g.d}, expected {d}")

    def __repr__(self) -> str:
        return f"SubgroupSpec(d={self.d}, generators={len(self.generators)})"

    @cached_property
    def _schreier(self) -> tuple[dict[SignedPerm, LatticeAut], Lattice]:
        d = self.d
        ident = LatticeAut.identity(d)
        reps = {ident.sigma: ident}
        queue = deque([ident.sigma])
        vecs = []
        while queue:
            s = queue.popleft()
            rs = reps[s]
            for g in self.generators:
                cand = g.compose(rs)
                t = cand.sigma
                if t not in reps:
                    reps[t] = cand
                    queue.append(t)
                else:
                    sch = reps[t].inverse().compose(cand)
                    if any(sch.trans):
                        vecs.append(sch.trans)
        return reps, Lattice(vecs, d)

    @property
    def coset_reps(self) -> dict[SignedPerm, LatticeAut]:
        return self._schreier[0]

    @property
    def point_group(self) -> frozenset[SignedPerm]:
        return frozenset(self._schreier[0])

    @property
    def translation_lattice(self) -> Lattice:
        return self._schreier[1]

    @property
    def rank(self) -> int:
        return self.translation_lattice.rank

    def require_cocompact(self) -> Lattice:
        lat = self.translation_lattice
        if not lat.full_rank:
            raise NonCocompactError(f"translation lattice has rank {lat.rank} < {self.d}")
        return lat

    def contains(self, g: LatticeAut) -> bool:
        rep = self.coset_reps.get(g.sigma)
        if rep is None:
            return False
        return self.translation_lattice.contains(_sub(g.trans, rep.trans))

    def __contains__(self, g: LatticeAut) -> bool:
        return self.contains(g)

    def is_trivial(self) -> bool:
        return all(g.is_identity() for g in self.generators)

    @property
    def orbit_count(self) -> int | float:
        """Number of vertex orbits when the action is free (``index / |P|``)."""
        lat = self.translation_lattice
        if not lat.full_rank:
            return INFINITE
        return lat.index // len(self.coset_reps)

    def canonical(self, x: Sequence[int]) -> Vec:
        """Least canonical residue over the orbit of ``x``."""
        lat = self.require_cocompact()
        return min(lat.reduce(r.apply(x)) for r in self.coset_reps.values())


def min_displacement(spec: SubgroupSpec) -> int | float:
    return displacement_witness(spec)[0]


def displacement_witness(spec: SubgroupSpec) -> tuple[int | float, LatticeAut | None, Vec | None]:
    """Least ``|g(x) - x|_1`` over non-identity ``g`` and lattice points ``x``.

    For a coset with point part ``s`` and representative translation ``v`` the
    displacement vectors form the coset ``v + (s - I)Z^d + L`` of a lattice, so
    each coset is one exact closest-vector search.  Returns the value, an
    element attaining it and a point it moves that far.
    """
    if spec.is_trivial():
        return INFINITE, None, None
    lat = spec.require_cocompact()
    d = spec.d
    best: tuple[int | float, LatticeAut | None, Vec | None] = (INFINITE, None, None)
    for sigma in sorted(spec.coset_reps):
        rep = spec.coset_reps[sigma]
        if sigma.is_identity():
            val, vec = lat.closest_l1((0,) * d, exclude_zero=True)
            cand = (val, LatticeAut.translation(vec), (0,) * d)
        else:
            cols = [_sub(sigma.apply(e), e) for e in _unit_vectors(d)]
            gens = cols + list(lat.basis)
            m = Lattice(gens, d)
            val, z = m.closest_l1(rep.trans)
            coeffs = m.coefficients(_sub(z, rep.trans))
            assert coeffs is not None
            x = tuple(coeffs[:d])
            lam = tuple(sum(c * b[j] for c, b in zip(coeffs[d:], lat.basis)) for j in range(d))
            elem = LatticeAut.translation(lam).compose(rep)
            cand = (val, elem, x)
        if cand[0] < best[0]:
            best = cand
    return best


def _unit_vectors(d: int) -> list[Vec]:
    return [tuple(int(i == k) for i in range(d)) for k in range(d)]


def is_torsion_free(spec: SubgroupSpec) -> TorsionResult:
    """Decide whether the group has a non-trivial element of finite order.

    For a coset with point part ``s`` of order ``k`` and representative
    translation ``v``, an element ``t_lam * rep`` has finite order iff
    ``N(v + lam) = 0`` with ``N = sum_{i<k} s^i``; solvability in ``lam`` is a
    lattice membership question.
    """
    if spec.is_trivial():
        return TorsionResult(True)
    lat = spec.require_cocompact()
    d = spec.d
    for sigma in sorted(spec.coset_reps):
        if sigma.is_identity():
            continue
        rep = spec.coset_reps[sigma]
        k = sigma.order
        powers = [SignedPerm.identity(d)]
        for _ in range(k - 1):
            powers.append(sigma.compose(powers[-1]))
        images = [_matvec_sum(powers, b) for b in lat.basis]
        target = _neg(_matvec_sum(powers, rep.trans))
        sub = Lattice(images, d)
        coeffs = sub.coefficients(target)
        if coeffs is None:
            continue
        lam = tuple(sum(c * b[j] for c, b in zip(coeffs, lat.basis)) for j in range(d))
        elem = LatticeAut.translation(lam).compose(rep)
        assert elem.power(k).is_identity()
        return TorsionResult(False, elem, k)
    return TorsionResult(True)


@dataclass(frozen=True, eq=False)
class QuotientGraph:
    """Simple-graph quotient ``L^d / G`` together with the projection data."""

    graph: Graph
    spec: SubgroupSpec
    representatives: tuple[Vec, ...]
    loops_found: bool
    multi_edges_found: bool

    @cached_property
    def _index(self) -> dict[Vec, int]:
        return {r: i for i, r in enumerate(self.representatives)}

    def vertex_of(self, x: Sequence[int]) -> int:
        """Image of lattice point ``x`` under the quotient map."""
        return self._index[self.spec.canonical(x)]


def build_quotient(spec: SubgroupSpec) -> QuotientGraph:
    """Quotient graph; loops and parallel edges are dropped and flagged."""
    lat = spec.require_cocompact()
    d = spec.d
    reps = [spec.coset_reps[s] for s in sorted(spec.coset_reps)]
    seen: set[Vec] = set()
    canon: list[Vec] = []
    for r in lat.box():
        if r in seen:
            continue
        orbit = {lat.reduce(g.apply(r)) for g in reps}
        seen |= orbit
        canon.append(min(orbit))
    canon.sort()
    index = {c: i for i, c in enumerate(canon)}

    def canonical(x: Vec) -> Vec:
        return min(lat.reduce(g.apply(x)) for g in reps)

    def edge_key(a: Vec, b: Vec) -> tuple[Vec, Vec]:
        keys = []
        for g in reps:
            ga, gb = g.apply(a), g.apply(b)
            for p, q in ((ga, gb), (gb, ga)):
                rp = lat.reduce(p)
                keys.append((rp, _sub(q, p)))
        return min(keys)

    units = []
    for e in _unit_vectors(d):
        units.append(e)
        units.append(_neg(e))
    edges = set()
    loops = False
    multi = False
    for c in canon:
        i = index[c]
        by_target: dict[int, set] = {}
        for u in units:
            nb = _add(c, u)
            j = index[canonical(nb)]
            if j == i:
                loops = True
                continue
            by_target.setdefault(j, set()).add(edge_key(c, nb))
            edges.add((min(i, j), max(i, j)))
        if any(len(keys) > 1 for keys in by_target.values()):
            multi = True
    labels = [",".join(map(str, c)) for c in canon]
    g = Graph.from_edges(len(canon), sorted(edges), labels)
    return QuotientGraph(g, spec, tuple(canon), loops, multi)


def are_conjugate(a: SubgroupSpec, b: SubgroupSpec) -> LatticeAut | None:
    """An ``alpha`` in ``Aut(L^d)`` with ``alpha a alpha^-1 = b``, or ``None``."""
    if a.d != b.d:
        return None
    lat_b = b.require_cocompact()
    lat_a = a.require_cocompact()
    if lat_a.index != lat_b.index or len(a.coset_reps) != len(b.coset_reps):
        return None
    for tau in all_signed_perms(a.d):
        for w in lat_b.box():
            alpha = LatticeAut(tau, w)
            inv = alpha.inverse()
            if all(b.contains(alpha.compose(g).compose(inv)) for g in a.generators) and all(
                a.contains(inv.compose(h).compose(alpha)) for h in b.generators
            ):
                return alpha
    return None


def translation_group(vectors: Sequence[Sequence[int]]) -> SubgroupSpec:
    d = len(vectors[0])
    return SubgroupSpec(d, [LatticeAut.translation(v) for v in vectors])


def remark_group(d: int) -> SubgroupSpec:
    """Translations by ``2d e_i`` together with the point reflection ``x -> (1,..,1) - x``."""
    gens = [LatticeAut.translation(tuple(2 * d * int(i == k) for i in range(d))) for k in range(d)]
    gens.append(LatticeAut(SignedPerm(tuple(-(i + 1) for i in range(d))), (1,) * d))
    return SubgroupSpec(d, gens)


# group file format


def format_group(spec: SubgroupSpec) -> str:
    lines = [f"d {spec.d}"]
    lines.extend(str(g) for g in spec.generators)
    return "\n".join(lines) + "\n"


def parse_group(text: str) -> SubgroupSpec:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty group file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "d" or not head[1].isdigit() or int(head[1]) < 1:
        raise ValueError("first line must be 'd <dimension>'")
    d = int(head[1])
    gens = []
    for line in lines[1:]:
        tok = line.split()
        if len(tok) != 2 * d + 2 or tok[0] != "perm" or tok[d + 1] != "trans":
            raise ValueError(f"bad generator line: {line!r}")
        images = tuple(int(t) for t in tok[1 : d + 1])
        trans = tuple(int(t) for t in tok[d + 2 :])
        gens.append(LatticeAut(SignedPerm(images), trans))
    return SubgroupSpec(d, gens)


def read_group(path: str | Path) -> SubgroupSpec:
    return parse_group(Path(path).read_text())


def write_group(spec: SubgroupSpec, path: str | Path) -> None:
    Path(path).write_text(format_group(spec))
