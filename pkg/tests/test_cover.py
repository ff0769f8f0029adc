import itertools

import numpy as np
import pytest

from locallattice.cayley import build_example_group
from locallattice.cover import (
    CoverStatus,
    FiberNotFoundError,
    NoOppositeStructureError,
    ObstructionTag,
    OrbifoldUnexpectedError,
    QuotientKind,
    SurfaceKind,
    analyse_cover,
    available_backends,
    classify_2d,
    classify_d,
    default_radius,
    extend_cover,
    parse_cover_dump,
    recover_deck_group,
    seed_map,
    validate_cover,
)
from locallattice.families import build_grid, build_klein, build_strange, build_torus, strange_spec
from locallattice.graph import Graph, are_isomorphic
from locallattice.lattice import (
    LatticeAut,
    SignedPerm,
    SubgroupSpec,
    build_quotient,
    remark_group,
    translation_group,
)

from conftest import complete_graph

BACKENDS = available_backends()


def perturbed_cube():
    """5x5x5 torus with two double edge swaps; a fixed processing order hits a derivation conflict."""
    base = build_quotient(translation_group([(5, 0, 0), (0, 5, 0), (0, 0, 5)])).graph
    diff = {(7, 32), (7, 114), (17, 18), (17, 38), (18, 37), (32, 89), (37, 38), (89, 114)}
    return Graph.from_edges(base.n, set(base.edges()) ^ diff)


def test_seed_map_torus():
    seed = seed_map(build_torus(8, 8, 0), 0, 2)
    assert seed == {(0, 0): 0, (1, 0): 1, (-1, 0): 7, (0, 1): 8, (0, -1): 56}


def test_seed_map_lattice_window():
    g = build_grid(11, 11)
    c = 5 + 11 * 5
    seed = seed_map(g, c, 2)
    assert {seed[(1, 0)], seed[(-1, 0)]} in ({c - 1, c + 1}, {c - 11, c + 11})
    assert set(seed.values()) == {c, c - 1, c + 1, c - 11, c + 11}


def test_seed_map_errors():
    with pytest.raises(NoOppositeStructureError):
        seed_map(complete_graph(5), 0, 2)
    with pytest.raises(NoOppositeStructureError):
        seed_map(build_torus(8, 8, 0), 0, 3)
    g = build_torus(8, 8, 0)
    bad = dict(seed_map(g, 0, 2))
    bad[(1, 0)], bad[(0, 1)] = bad[(0, 1)], bad[(1, 0)]
    with pytest.raises(ValueError):
        extend_cover(g, bad, R=4)
    del bad[(1, 0)]
    with pytest.raises(ValueError):
        extend_cover(g, bad, R=4)


@pytest.mark.parametrize("backend", BACKENDS)
def test_torus_cover_is_modular_map(backend):
    g = build_torus(8, 8, 0)
    pc = extend_cover(g, seed_map(g, 0, 2), R=16, backend=backend)
    assert pc.valid and pc.backend == backend
    for x, y in itertools.product(range(-17, 18), repeat=2):
        if abs(x) == 17 and abs(y) == 17:
            assert pc.value((x, y)) is None  # outside N([-R, R]^2)
            continue
        assert pc[(x, y)] == (x % 8) + 8 * (y % 8)
    assert validate_cover(pc, g)


def test_c5xc5_cover_valid():
    g = build_torus(5, 5, 0)
    pc = extend_cover(g, seed_map(g, 0, 2), R=10)
    assert pc.valid and validate_cover(pc, g)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    cases = [(build_torus(7, 6, 3), 2, 12), (build_strange(5, 7), 2, 12), (build_example_group().graph, 3, 4),
             (perturbed_cube(), 3, 6), (build_grid(9, 9), 2, 5)]
    for g, d, R in cases:
        v = 40 if g.n == 81 else 0
        seeds = [None, 7, 265]
        for order in seeds:
            a = extend_cover(g, seed_map(g, v, d), R=R, order=order, backend="compiled")
            b = extend_cover(g, seed_map(g, v, d), R=R, order=order, backend="python")
            assert a.status == b.status
            assert np.array_equal(a.window, b.window)
            assert (a.obstruction and a.obstruction.to_dict()) == (b.obstruction and b.obstruction.to_dict())


def test_order_invariance():
    for g in (build_klein(6, 8, 0), build_torus(9, 7, 2)):
        ref = extend_cover(g, seed_map(g, 0, 2), R=10)
        for k in range(10):
            other = extend_cover(g, seed_map(g, 0, 2), R=10, order=np.random.default_rng(k))
            assert np.array_equal(ref.window, other.window)


def test_single_cell_perturbation_fails():
    g = build_torus(7, 6, 3)
    pc = extend_cover(g, seed_map(g, 0, 2), R=8)
    rng = np.random.default_rng(1)
    for _ in range(40):
        x = tuple(int(c) for c in rng.integers(-8, 9, size=2))
        w = pc.window.copy()
        idx = tuple(c + pc.R + 1 for c in x)
        w[idx] = (w[idx] + int(rng.integers(1, g.n))) % g.n
        bad = type(pc)(pc.d, pc.R, w, pc.status)
        check = validate_cover(bad, g)
        assert not check.valid and check.failures >= 1


def test_validate_reports_first_failure():
    g = build_torus(8, 8, 0)
    pc = extend_cover(g, seed_map(g, 0, 2), R=4)
    w = pc.window.copy()
    w[0 + 5, -2 + 5] = 0
    check = validate_cover(type(pc)(2, 4, w, pc.status), g)
    assert not check and check.first_failure in {(-1, -2), (0, -3), (0, -2), (1, -2), (0, -1)}


def test_example_group_obstruction_is_verifiable():
    g = build_example_group().graph
    pc = extend_cover(g, seed_map(g, 0, 3), R=3)
    obs = pc.obstruction
    assert pc.status is CoverStatus.OBSTRUCTED and obs.tag is ObstructionTag.OPPOSITE_VIOLATION
    x, y = obs.detail["images"]
    assert pc[obs.detail["plus"]] == x and pc[obs.detail["minus"]] == y
    common = g.neighbor_sets[x] & g.neighbor_sets[y]
    assert pc[obs.point] in common and obs.detail["extra_common"] in common and len(common) >= 2


def test_injectivity_obstruction_at_grid_boundary():
    g = build_grid(9, 9)
    assert extend_cover(g, seed_map(g, 40, 2), R=3).valid
    pc = extend_cover(g, seed_map(g, 40, 2), R=4)
    assert pc.obstruction.tag is ObstructionTag.INJECTIVITY_VIOLATION
    assert g.degree(pc[pc.obstruction.point]) == 3


def test_conflict_obstruction_is_verifiable():
    g = perturbed_cube()
    pc = extend_cover(g, seed_map(g, 101, 3), R=6, order=265)
    obs = pc.obstruction
    assert obs.tag is ObstructionTag.DERIVATION_CONFLICT
    u, v, t = obs.point, obs.detail["via"], obs.detail["target"]
    step = np.subtract(t, u)
    a = pc[tuple(np.add(v, step))]
    common = g.neighbor_sets[pc[u]] & g.neighbor_sets[a]
    assert common == {pc[v], obs.detail["derived"]}
    assert pc[t] == obs.detail["existing"] != obs.detail["derived"]


def test_ambiguous_obstruction():
    base = build_torus(8, 8, 0)
    diff = {(16, 17), (16, 58), (17, 50), (50, 58)}
    g = Graph.from_edges(64, set(base.edges()) ^ diff)
    pc = extend_cover(g, seed_map(g, 0, 2), R=12)
    assert pc.obstruction.tag is ObstructionTag.AMBIGUOUS_EXTENSION
    assert pc.obstruction.to_dict()["tag"] == "AMBIGUOUS_EXTENSION"


def test_cover_dump_round_trip(tmp_path):
    g = build_torus(5, 5, 0)
    pc = extend_cover(g, seed_map(g, 0, 2), R=2)
    parsed = parse_cover_dump(pc.dump())
    # N([-2, 2]^2) is the 7x7 square without its corners
    assert len(parsed) == 7 * 7 - 4
    assert all(pc[x] == v for x, v in parsed.items())
    assert pc.dump().splitlines()[0] == f"-3 -2 -> {pc[(-3, -2)]}"


def test_window_guard():
    g = build_example_group().graph
    with pytest.raises(ValueError):
        extend_cover(g, seed_map(g, 0, 3), R=300)
    assert default_radius(build_torus(8, 8, 0)) == 36


# deck groups

def test_torus_deck_group():
    g = build_torus(8, 8, 0)
    pc = extend_cover(g, seed_map(g, 0, 2))
    dg = recover_deck_group(pc, g)
    assert set(dg.generators) == {LatticeAut.translation((8, 0)), LatticeAut.translation((0, 8))}
    assert dg.transitive_on_fiber and dg.certified
    assert classify_2d(dg) is SurfaceKind.TORUS


def test_deck_elements_preserve_map_and_act_freely():
    g = build_strange(5, 7)
    pc = extend_cover(g, seed_map(g, 0, 2), R=20)
    dg = recover_deck_group(pc, g)
    pts = list(itertools.product(range(-8, 9), repeat=2))
    for a in dg.generators:
        for x in pts:
            assert pc[a.apply(x)] == pc[x]
            assert a.apply(x) != x


def test_strange_deck_group_has_glide():
    g = build_strange(5, 7)
    dg = recover_deck_group(extend_cover(g, seed_map(g, 0, 2)), g)
    assert any(a.sigma.det == -1 for a in dg.generators)
    assert classify_2d(dg) is SurfaceKind.KLEIN_BOTTLE
    assert are_isomorphic(build_quotient(dg.spec).graph, build_quotient(strange_spec(5, 7)).graph)


def test_lattice_window_has_trivial_deck_group():
    g = build_grid(21, 21)
    c = 10 + 21 * 10
    pc = extend_cover(g, seed_map(g, c, 2), R=8)
    dg = recover_deck_group(pc, g)
    assert dg.generators == () and dg.fiber_size == 1 and dg.transitive_on_fiber


def test_fiber_not_found_for_small_window():
    g = build_torus(8, 8, 0)
    pc = extend_cover(g, seed_map(g, 0, 2), R=6)
    with pytest.raises(FiberNotFoundError):
        recover_deck_group(pc, g)


def test_deck_group_needs_valid_cover():
    g = build_example_group().graph
    with pytest.raises(ValueError):
        recover_deck_group(extend_cover(g, seed_map(g, 0, 3), R=3), g)


@pytest.mark.parametrize("g,kind", [
    (build_torus(7, 6, 3), SurfaceKind.TORUS),
    (build_klein(6, 8, 0), SurfaceKind.KLEIN_BOTTLE),
    (build_klein(5, 7, 1), SurfaceKind.KLEIN_BOTTLE),
    (build_klein(6, 7, 2), SurfaceKind.KLEIN_BOTTLE),
    (build_strange(7, 5), SurfaceKind.KLEIN_BOTTLE),
])
def test_classify_2d(g, kind):
    rep = analyse_cover(g, 2)
    assert rep.surface is kind and rep.deck.certified


def test_classify_2d_rejects_torsion():
    from locallattice.cover import DeckGroup

    dg = DeckGroup(2, tuple(remark_group(2).generators), 4, True, 3, True)
    with pytest.raises(OrbifoldUnexpectedError):
        classify_2d(dg)


def test_classify_d():
    assert classify_d(spec=translation_group([(8, 0, 0), (0, 8, 0), (0, 0, 8)])).kind is QuotientKind.MANIFOLD_QUOTIENT
    res = classify_d(spec=remark_group(7))
    assert res.kind is QuotientKind.ORBIFOLD_QUOTIENT and res.witness_order == 2
    glide = SubgroupSpec(2, [LatticeAut(SignedPerm((2, 1)), (5, 2)), LatticeAut.translation((5, -5))])
    with pytest.raises(ValueError):
        classify_d(spec=glide)


def test_three_dimensional_pipeline():
    spec = SubgroupSpec(3, [LatticeAut(SignedPerm((2, 1, 3)), (0, 0, 7)), LatticeAut.translation((9, 0, 0)),
                            LatticeAut.translation((0, 9, 0))])
    g = build_quotient(spec).graph
    rep = analyse_cover(g, 3, R=20)
    assert rep.cover.valid and rep.deck.certified
    assert rep.quotient.kind is QuotientKind.MANIFOLD_QUOTIENT
    assert are_isomorphic(build_quotient(rep.deck.spec).graph, g)
