import random

import networkx as nx
import pytest

from locallattice.cover import SurfaceKind
from locallattice.families import build_klein, build_strange, build_torus
from locallattice.graph import Graph, enumerate_4cycles
from locallattice.wheel import (
    MalformedCertificateError,
    WheelCertificate,
    WheelSearchIndeterminate,
    find_wheel_family,
    glue_surface,
    is_wheel_family,
    vertex_rotation_check,
)

from conftest import complete_graph


def test_t33_has_wheel_property():
    g = build_torus(3, 3, 0)
    cert = find_wheel_family(g)
    assert cert is not None and len(cert.cycles) == 9
    assert vertex_rotation_check(cert, g) == (True, None)
    rep = glue_surface(cert, g)
    assert rep.kind is SurfaceKind.TORUS and rep.euler == 0


def test_t88_certificate_is_faces():
    g = build_torus(8, 8, 0)
    cert = find_wheel_family(g)
    assert sorted(cert.cycles) == enumerate_4cycles(g)
    assert len(cert.cycles) == 64
    assert vertex_rotation_check(cert, g)[0]


def test_t44_needs_search():
    g = build_torus(4, 4, 0)
    assert len(enumerate_4cycles(g)) == 24
    cert = find_wheel_family(g)
    assert len(cert.cycles) == 16 and is_wheel_family(g, cert.cycles)
    assert glue_surface(cert, g).kind is SurfaceKind.TORUS
    with pytest.raises(WheelSearchIndeterminate):
        find_wheel_family(g, node_budget=1)


def test_no_family():
    assert find_wheel_family(complete_graph(5)) is None
    assert find_wheel_family(build_torus(8, 8, 0).__class__.from_edges(3, [(0, 1), (1, 2)])) is None
    h = nx.random_regular_graph(4, 40, seed=3)
    assert find_wheel_family(Graph.from_edges(40, h.edges())) is None


@pytest.mark.parametrize("g,kind", [
    (build_torus(6, 5, 2), SurfaceKind.TORUS),
    (build_torus(5, 5, 0), SurfaceKind.TORUS),
    (build_klein(6, 8, 0), SurfaceKind.KLEIN_BOTTLE),
    (build_klein(5, 8, 1), SurfaceKind.KLEIN_BOTTLE),
    (build_klein(6, 7, 2), SurfaceKind.KLEIN_BOTTLE),
    (build_strange(5, 7), SurfaceKind.KLEIN_BOTTLE),
    (build_strange(7, 5), SurfaceKind.KLEIN_BOTTLE),
])
def test_surface_classification(g, kind):
    cert = find_wheel_family(g)
    rep = glue_surface(cert, g)
    assert rep.kind is kind
    assert rep.euler == 0
    # counting identities: 4v = 4f and 2e = 4f
    assert 4 * rep.vertices == 4 * rep.faces and 2 * rep.edges == 4 * rep.faces
    assert rep.orientable == (kind is SurfaceKind.TORUS)


def test_orientation_is_order_independent():
    rng = random.Random(0)
    for g in (build_klein(6, 8, 0), build_torus(7, 6, 3)):
        cert = find_wheel_family(g)
        ref = glue_surface(cert, g)
        for _ in range(5):
            cycles = list(cert.cycles)
            rng.shuffle(cycles)
            cycles = [c[1:] + c[:1] if rng.random() < 0.5 else c[::-1] for c in cycles]
            assert glue_surface(WheelCertificate(tuple(cycles)), g).orientable == ref.orientable


def test_pinched_vertex():
    # vertex 0 with two fans of two faces each
    a, b, c, d, x1, x2, y1, y2 = range(1, 9)
    edges = [(0, a), (0, b), (0, c), (0, d), (a, x1), (x1, b), (a, x2), (x2, b), (c, y1), (y1, d), (c, y2), (y2, d)]
    g = Graph.from_edges(9, edges)
    cert = WheelCertificate(((0, a, x1, b), (0, a, x2, b), (0, c, y1, d), (0, c, y2, d)))
    assert vertex_rotation_check(cert, g) == (False, 0)


def test_malformed_certificates():
    g = build_torus(8, 8, 0)
    cycles = list(find_wheel_family(g).cycles)
    with pytest.raises(MalformedCertificateError):
        glue_surface(WheelCertificate(tuple(cycles[1:])), g)
    with pytest.raises(MalformedCertificateError):
        glue_surface(WheelCertificate(tuple(cycles + [cycles[0]])), g)
    with pytest.raises(MalformedCertificateError):
        glue_surface(WheelCertificate(((0, 1, 2, 3),) + tuple(cycles[1:])), g)
