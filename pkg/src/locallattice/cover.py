"""Building covering maps from L^d onto a finite graph and reading off the deck group.

The map is grown from a seed on the unit ball of the origin.  Each processed
lattice point ``u`` with an already-processed neighbour ``v`` determines the
images of ``u``'s remaining neighbours: a sideways neighbour ``u + e_i`` is the
second common neighbour of ``p(u)`` and ``p(v + e_i)``, and the straight-on
neighbour is whatever is left of ``N(p(u))``.  Every image is cross-checked
whenever it is derived again, and opposite neighbours of ``u`` must share no
common neighbour besides ``p(u)``.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _pykernel
from .graph import INFINITE, Graph, diameter
from .lattice import LatticeAut, SignedPerm, SubgroupSpec, is_torsion_free, l1
from .probe import opposite_partition

try:
    from . import _ckernel
except ImportError:  # pragma: no cover - exercised only without a compiler
    _ckernel = None

MAX_WINDOW_CELLS = 40_000_000


def available_backends() -> list[str]:
    return (["compiled"] if _ckernel is not None else []) + ["python"]


def default_backend() -> str:
    if os.environ.get("LL_PURE_PYTHON", "") not in ("", "0") or _ckernel is None:
        return "python"
    return "compiled"


def _kernel(backend: str | None):
    name = backend or default_backend()
    if name == "compiled":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not built")
        return _ckernel.extend_window
    if name == "python":
        return _pykernel.extend_window
    raise ValueError(f"unknown backend {name!r}")


class CoverStatus(enum.Enum):
    VALID = "VALID"
    OBSTRUCTED = "OBSTRUCTED"


class ObstructionTag(enum.Enum):
    OPPOSITE_VIOLATION = "OPPOSITE_VIOLATION"
    INJECTIVITY_VIOLATION = "INJECTIVITY_VIOLATION"
    AMBIGUOUS_EXTENSION = "AMBIGUOUS_EXTENSION"
    DERIVATION_CONFLICT = "DERIVATION_CONFLICT"


_TAGS = {
    _pykernel.OPPOSITE: ObstructionTag.OPPOSITE_VIOLATION,
    _pykernel.INJECTIVITY: ObstructionTag.INJECTIVITY_VIOLATION,
    _pykernel.AMBIGUOUS: ObstructionTag.AMBIGUOUS_EXTENSION,
    _pykernel.CONFLICT: ObstructionTag.DERIVATION_CONFLICT,
}


class NoOppositeStructureError(ValueError):
    code = "NO_OPPOSITE_STRUCTURE"


class FiberNotFoundError(RuntimeError):
    code = "FIBER_NOT_FOUND"


class OrbifoldUnexpectedError(ValueError):
    code = "ORBIFOLD_UNEXPECTED"


Point = tuple[int, ...]


@dataclass(frozen=True)
class Obstruction:
    tag: ObstructionTag
    point: Point
    message: str
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"tag": self.tag.value, "point": list(self.point), "message": self.message, "detail": self.detail}


def unit(d: int, i: int, s: int = 1) -> Point:
    return tuple(s if k == i else 0 for k in range(d))


@dataclass(eq=False)
class PartialCover:
    """Images of the window ``[-R-1, R+1]^d``; ``-1`` marks unassigned points.

    ``window[x_0 + R + 1, ..., x_{d-1} + R + 1]`` is the image of ``x``.  Points
    of the box ``[-R, R]^d`` are the centres at which the covering condition
    was enforced.
    """

    d: int
    R: int
    window: np.ndarray
    status: CoverStatus
    obstruction: Obstruction | None = None
    backend: str = ""

    @property
    def valid(self) -> bool:
        return self.status is CoverStatus.VALID

    def value(self, x: Sequence[int]) -> int | None:
        o = self.R + 1
        if any(abs(c) > o for c in x):
            return None
        v = int(self.window[tuple(c + o for c in x)])
        return None if v < 0 else v

    def __getitem__(self, x: Sequence[int]) -> int:
        v = self.value(x)
        if v is None:
            raise KeyError(tuple(x))
        return v

    def items(self) -> Iterable[tuple[Point, int]]:
        o = self.R + 1
        for idx in np.argwhere(self.window >= 0):
            yield tuple(int(c) - o for c in idx), int(self.window[tuple(idx)])

    def dump(self) -> str:
        """One ``x1 ... xd -> v`` line per assigned point, in lexicographic order."""
        lines = [f"{' '.join(map(str, x))} -> {v}" for x, v in sorted(self.items())]
        return "\n".join(lines) + "\n"


def parse_cover_dump(text: str) -> dict[Point, int]:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        left, right = line.split("->")
        out[tuple(int(t) for t in left.split())] = int(right)
    return out


def seed_map(g: Graph, v0: int, d: int) -> dict[Point, int]:
    """Images of ``0`` and ``+-e_i`` read off the opposite partition at ``v0``.

    Pairs are taken in order of their least vertex; the least vertex of the
    ``i``-th pair goes to ``+e_i``.
    """
    part = opposite_partition(g, v0, d) if g.degree(v0) == 2 * d else None
    if part is None:
        raise NoOppositeStructureError(f"vertex {v0} has no opposite partition for d = {d}")
    seed = {(0,) * d: v0}
    for i, (a, b) in enumerate(part.pairs):
        seed[unit(d, i, 1)] = a
        seed[unit(d, i, -1)] = b
    return seed


def _seed_array(g: Graph, seed: dict[Point, int], d: int) -> np.ndarray:
    origin = (0,) * d
    try:
        vals = [seed[origin]] + [seed[unit(d, i, s)] for i in range(d) for s in (1, -1)]
    except KeyError as exc:
        raise ValueError(f"seed is missing the image of {exc.args[0]}") from None
    p0 = vals[0]
    nb = vals[1:]
    if len(set(nb)) != 2 * d or set(nb) != set(g.adjacency[p0]):
        raise ValueError("seed must map the unit ball bijectively onto a closed neighbourhood")
    nset = g.neighbor_sets
    for i in range(d):
        if nset[nb[2 * i]] & nset[nb[2 * i + 1]] != {p0}:
            raise ValueError(f"seed images of +-e_{i + 1} are not opposite")
    return np.asarray(vals, dtype=np.int32)


def _window_coords(d: int, R: int) -> np.ndarray:
    """Coordinates of every window cell in flat kernel order, shape ``(d, S^d)``."""
    S = 2 * R + 3
    flat = np.arange(S**d, dtype=np.int64)
    coords = np.empty((d, S**d), dtype=np.int64)
    for i in range(d):
        coords[i] = (flat // S**i) % S - (R + 1)
    return coords


def default_radius(g: Graph) -> int:
    diam = diameter(g)
    if diam == INFINITE:
        raise ValueError("graph is disconnected")
    return 4 * int(diam) + 4


def extend_cover(
    g: Graph,
    seed: dict[Point, int],
    R: int | None = None,
    order: int | np.random.Generator | None = None,
    backend: str | None = None,
) -> PartialCover:
    """Grow a covering map over ``N([-R, R]^d)`` from ``seed``.

    Points are processed in order of (l1 norm, lexicographic) by default; an
    integer or generator for ``order`` processes them in a random order instead
    (always growing from already-processed points).  Stops at the first
    obstruction.
    """
    d = len(next(iter(seed)))
    if R is None:
        R = default_radius(g)
    if R < 0:
        raise ValueError("R must be non-negative")
    S = 2 * R + 3
    if S**d > MAX_WINDOW_CELLS:
        raise ValueError(f"window of {S**d} cells is too large; pass a smaller R")
    seed_arr = _seed_array(g, seed, d)
    coords = _window_coords(d, R)
    inbox = np.all(np.abs(coords) <= R, axis=0).astype(np.uint8)
    if order is None:
        keys = [coords[i] for i in reversed(range(d))] + [np.abs(coords).sum(axis=0)]
        perm = np.lexsort(keys)
    else:
        rng = order if isinstance(order, np.random.Generator) else np.random.default_rng(order)
        perm = rng.permutation(S**d)
    priority = np.empty(S**d, dtype=np.int64)
    priority[perm] = np.arange(S**d, dtype=np.int64)
    indptr, indices = g.csr
    name = backend or default_backend()
    flat, status, info = _kernel(name)(indptr, indices, d, R, seed_arr, priority, inbox)
    window = np.asarray(flat, dtype=np.int32).reshape((S,) * d, order="F")
    if status == _pykernel.OK:
        return PartialCover(d, R, window, CoverStatus.VALID, None, name)
    obs = _obstruction(status, info, coords, d)
    return PartialCover(d, R, window, CoverStatus.OBSTRUCTED, obs, name)


def _obstruction(status: int, info: tuple, coords: np.ndarray, d: int) -> Obstruction:
    tag = _TAGS[status]
    u, aux, x, y, z = info

    def pt(idx: int) -> Point:
        return tuple(int(c) for c in coords[:, idx])

    point = pt(u)
    if tag is ObstructionTag.OPPOSITE_VIOLATION:
        e = unit(d, aux)
        plus = tuple(a + b for a, b in zip(point, e))
        minus = tuple(a - b for a, b in zip(point, e))
        msg = f"images of {plus} and {minus} have a common neighbour besides the image of {point}"
        detail = {"axis": aux, "plus": list(plus), "minus": list(minus), "images": [x, y], "extra_common": z}
    elif tag is ObstructionTag.DERIVATION_CONFLICT:
        msg = f"two derivations of the image of {pt(aux)} disagree"
        detail = {"target": list(pt(aux)), "existing": x, "derived": y, "via": list(pt(z))}
    elif tag is ObstructionTag.AMBIGUOUS_EXTENSION:
        target = pt(aux) if aux >= 0 else None
        msg = "a sideways step does not have exactly one candidate image"
        detail = {"target": None if target is None else list(target), "center_image": x, "other": y, "common": z}
    else:
        msg = f"neighbourhood of {point} does not map bijectively onto a neighbourhood"
        detail = {"center_image": x, "image": y}
    return Obstruction(tag, point, msg, detail)


@dataclass(frozen=True)
class CoverCheck:
    valid: bool
    failures: int
    first_failure: Point | None = None

    def __bool__(self) -> bool:
        return self.valid


def validate_cover(pc: PartialCover, g: Graph) -> CoverCheck:
    """Re-check the covering condition at every box point, independently of the kernel.

    At each centre ``u`` the images of ``u +- e_i`` must be ``2d`` distinct
    neighbours of the image of ``u``, whose degree is ``2d``, and images of
    opposite neighbours may share only the image of ``u``.
    """
    d, R = pc.d, pc.R
    W = pc.window.astype(np.int64)
    core = tuple(slice(1, -1) for _ in range(d))
    centre = W[core].ravel(order="F")
    nbs = []
    for i in range(d):
        for s in (1, -1):
            sl = tuple(slice(1 + s, W.shape[k] - 1 + s) if k == i else slice(1, -1) for k in range(d))
            nbs.append(W[sl].ravel(order="F"))
    N = np.stack(nbs)
    n = g.n
    bad = (centre < 0) | np.any(N < 0, axis=0)
    safe_c = np.where(centre < 0, 0, centre)
    degs = np.diff(g.csr[0])
    bad |= degs[safe_c] != 2 * d
    codes = np.sort(np.array([u * n + v for u, nb in enumerate(g.adjacency) for v in nb], dtype=np.int64))
    for k in range(2 * d):
        q = safe_c * n + np.where(N[k] < 0, 0, N[k])
        pos = np.searchsorted(codes, q)
        pos = np.minimum(pos, len(codes) - 1)
        bad |= codes[pos] != q
        for k2 in range(k + 1, 2 * d):
            bad |= N[k] == N[k2]
    nset = g.neighbor_sets
    cache: dict[tuple[int, int], bool] = {}
    for i in range(d):
        a, b = N[2 * i], N[2 * i + 1]
        pairs = np.stack([safe_c, a, b])
        uniq, inverse = np.unique(pairs, axis=1, return_inverse=True)
        ok = np.empty(uniq.shape[1], dtype=bool)
        for j in range(uniq.shape[1]):
            c, x, y = (int(t) for t in uniq[:, j])
            key = (x, y)
            if x < 0 or y < 0:
                ok[j] = False
                continue
            if key not in cache:
                cache[key] = nset[x] & nset[y]
            ok[j] = cache[key] == {c}
        bad |= ~ok[inverse.ravel()]
    count = int(bad.sum())
    if not count:
        return CoverCheck(True, 0)
    idx = int(np.flatnonzero(bad)[0])
    S = 2 * R + 1
    first = tuple(int((idx // S**i) % S) - R for i in range(d))
    return CoverCheck(False, count, first)


@dataclass(frozen=True)
class DeckGroup:
    """Deck transformations verified on the half window.

    ``generators`` is a greedily thinned subset of the verified elements;
    ``certified`` is set when the group they generate has exactly one orbit per
    vertex of the target graph.
    """

    d: int
    generators: tuple[LatticeAut, ...]
    fiber_size: int
    transitive_on_fiber: bool
    verified: int
    certified: bool

    @property
    def spec(self) -> SubgroupSpec:
        return SubgroupSpec(self.d, self.generators)


def recover_deck_group(pc: PartialCover, g: Graph) -> DeckGroup:
    """Deck transformations ``alpha = t_v * sigma`` for the fibre points ``v`` over ``p(0)``."""
    if not pc.valid:
        raise ValueError("deck group needs a valid cover")
    d, R = pc.d, pc.R
    o = R + 1
    half = R // 2
    W = pc.window
    base = int(W[(o,) * d])
    region = W[tuple(slice(o - half, o + half + 1) for _ in range(d))]
    fiber = [tuple(int(c) - half for c in idx) for idx in np.argwhere(region == base)]
    fiber.sort(key=lambda p: (l1(p), p))
    if len(fiber) == 1:
        # a finite 2d-regular graph is never covered injectively, so a lone
        # fibre point only means the window is too small
        if g.regular_degree() == 2 * d or len(np.unique(W[W >= 0])) != int((W >= 0).sum()):
            raise FiberNotFoundError("fibre over the base vertex meets the half window only at 0; enlarge R")
        return DeckGroup(d, (), 1, True, 0, False)

    axes = [np.arange(-half, half + 1)] * d
    grid = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")])
    here = W[tuple(grid + o)]
    plus = [pc[unit(d, i, 1)] for i in range(d)]
    minus = [pc[unit(d, i, -1)] for i in range(d)]
    units = [(i, s) for i in range(d) for s in (1, -1)]

    found: list[LatticeAut] = []
    transitive = True
    for v in fiber[1:]:
        images = []
        for i in range(d):
            hits = [(j, s) for j, s in units if pc.value(_shift(v, j, s)) == plus[i]]
            if len(hits) != 1:
                break
            j, s = hits[0]
            if pc.value(_shift(v, j, -s)) != minus[i]:
                break
            images.append(s * (j + 1))
        try:
            sigma = SignedPerm(tuple(images)) if len(images) == d else None
        except ValueError:
            sigma = None
        if sigma is None:
            transitive = False
            continue
        alpha = LatticeAut(sigma, v)
        moved = _apply_grid(alpha, grid)
        if np.array_equal(W[tuple(moved + o)], here):
            found.append(alpha)
        else:
            transitive = False

    # shortest first, and (8, 0) before (-8, 0)
    found.sort(key=lambda a: (l1(a.trans), tuple(-t for t in a.trans), a.sigma))
    kept: list[LatticeAut] = []
    for a in found:
        if not kept or not SubgroupSpec(d, kept).contains(a):
            kept.append(a)
    spec = SubgroupSpec(d, kept)
    certified = bool(kept) and spec.translation_lattice.full_rank and spec.orbit_count == g.n
    return DeckGroup(d, tuple(kept), len(fiber), transitive, len(found), certified)


def _shift(v: Point, j: int, s: int) -> Point:
    return tuple(c + s if k == j else c for k, c in enumerate(v))


def _apply_grid(alpha: LatticeAut, grid: np.ndarray) -> np.ndarray:
    out = np.empty_like(grid)
    for i, im in enumerate(alpha.sigma.images):
        j = abs(im) - 1
        out[j] = grid[i] if im > 0 else -grid[i]
    return out + np.asarray(alpha.trans, dtype=grid.dtype)[:, None]


class SurfaceKind(enum.Enum):
    TORUS = "TORUS"
    KLEIN_BOTTLE = "KLEIN_BOTTLE"
    OTHER = "OTHER"  # only from face gluing with nonzero Euler characteristic


class QuotientKind(enum.Enum):
    MANIFOLD_QUOTIENT = "MANIFOLD_QUOTIENT"
    ORBIFOLD_QUOTIENT = "ORBIFOLD_QUOTIENT"


def classify_2d(dg: DeckGroup) -> SurfaceKind:
    """Torus when every deck transformation preserves orientation, Klein bottle otherwise."""
    if dg.d != 2:
        raise ValueError("classify_2d needs d = 2")
    if not dg.transitive_on_fiber:
        raise ValueError("deck group is not transitive on the fibre")
    spec = dg.spec
    spec.require_cocompact()
    tf = is_torsion_free(spec)
    if not tf:
        raise OrbifoldUnexpectedError(f"deck group contains {tf.witness} of order {tf.witness_order}")
    if all(s.det == 1 for s in spec.point_group):
        return SurfaceKind.TORUS
    return SurfaceKind.KLEIN_BOTTLE


@dataclass(frozen=True)
class QuotientClass:
    kind: QuotientKind
    witness: LatticeAut | None = None
    witness_order: int | None = None


def classify_d(dg: DeckGroup | None = None, spec: SubgroupSpec | None = None) -> QuotientClass:
    """Manifold quotient iff the group is torsion-free; otherwise report a finite-order element."""
    if spec is None:
        if dg is None:
            raise ValueError("need a deck group or a subgroup spec")
        spec = dg.spec
    if spec.d < 3:
        raise ValueError("classify_d needs d >= 3; use classify_2d in the plane")
    spec.require_cocompact()
    tf = is_torsion_free(spec)
    if tf:
        return QuotientClass(QuotientKind.MANIFOLD_QUOTIENT)
    return QuotientClass(QuotientKind.ORBIFOLD_QUOTIENT, tf.witness, tf.witness_order)


@dataclass
class CoverReport:
    cover: PartialCover
    deck: DeckGroup | None = None
    surface: SurfaceKind | None = None
    quotient: QuotientClass | None = None


def analyse_cover(g: Graph, d: int, R: int | None = None, v0: int = 0, backend: str | None = None) -> CoverReport:
    """Seed at ``v0``, extend, and on success recover and classify the deck group."""
    pc = extend_cover(g, seed_map(g, v0, d), R, backend=backend)
    report = CoverReport(pc)
    if not pc.valid:
        return report
    report.deck = recover_deck_group(pc, g)
    if report.deck.generators:
        if d == 2:
            report.surface = classify_2d(report.deck)
        else:
            report.quotient = classify_d(report.deck)
    return report
