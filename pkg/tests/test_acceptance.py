"""Acceptance criteria, one test each.

Every test prints a single ``PASS`` or ``FAIL`` line.  Run directly
(``python tests/test_acceptance.py``) to get only those lines.
"""
import io
import json
import os
import sys
import tempfile
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))
import suite  # noqa: E402

from locallattice.cayley import build_example_group, verify_counterexample
from locallattice.cli import main as cli_main
from locallattice.cover import (
    QuotientKind, SurfaceKind, analyse_cover, classify_d, extend_cover, recover_deck_group, seed_map, validate_cover,
)
from locallattice.families import build_klein, build_strange, build_torus, strange_spec
from locallattice.graph import are_isomorphic, write_edge_list
from locallattice.lattice import (
    LatticeAut, SignedPerm, SubgroupSpec, are_conjugate, build_quotient, is_torsion_free, min_displacement,
    parse_group, remark_group,
)
from locallattice.probe import is_r_locally, is_weakly_r_locally
from locallattice.wheel import find_wheel_family, glue_surface

SUITE_2D = dict(d=2, per_cell=3, max_vertices=400)  # 60 groups
SUITE_3D = dict(d=3, per_cell=1, max_vertices=1500)  # 20 groups


def _suite():
    return suite.generate(**SUITE_2D) + suite.generate(**SUITE_3D)


def _cli_json(*args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(["--json", *map(str, args)])
    return code, json.loads(buf.getvalue())


# 1. locality verdicts follow the displacement thresholds

def criterion_1():
    t0 = time.perf_counter()
    groups = _suite()
    n2 = sum(1 for s, _, _ in groups if s.d == 2)
    n3 = len(groups) - n2
    Ds = {D for _, _, D in groups}
    mismatches = []
    for spec, kind, D in groups:
        q = build_quotient(spec)
        assert not q.loops_found and not q.multi_edges_found
        for r in (1, 2, 3):
            strong = is_r_locally(q.graph, spec.d, r).holds
            weak = is_weakly_r_locally(q.graph, spec.d, r).holds
            if strong != (D >= 2 * r + 2) or weak != (D >= 2 * r + 1):
                mismatches.append((spec, D, r, strong, weak))
    elapsed = time.perf_counter() - t0
    ok = n2 >= 50 and n3 >= 20 and Ds == set(range(3, 13)) and not mismatches and elapsed < 300
    return ok, (f"{n2} groups in d=2, {n3} in d=3, D in {min(Ds)}..{max(Ds)}, "
                f"{len(groups) * 6 - len(mismatches)}/{len(groups) * 6} verdicts agree, {elapsed:.1f}s")


# 2. quotient -> cover -> deck group -> quotient

def criterion_2():
    cases = [(s, D) for s, _, D in _suite() if (s.d == 2 and D >= 5) or (s.d == 3 and D >= 7)]
    failures = []
    worst = 0.0
    for spec, D in cases:
        t0 = time.perf_counter()
        g = build_quotient(spec).graph
        pc = extend_cover(g, seed_map(g, 0, spec.d))
        good = pc.valid
        if good:
            dg = recover_deck_group(pc, g)
            good = dg.transitive_on_fiber and are_isomorphic(build_quotient(dg.spec).graph, g)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if not good or dt >= 10:
            failures.append((spec, D, dt))
    ok = bool(cases) and not failures
    return ok, f"{len(cases) - len(failures)}/{len(cases)} round trips, slowest {worst:.2f}s"


# 3. the d = 3 counterexample

def criterion_3():
    t0 = time.perf_counter()
    cg = build_example_group()
    res = verify_counterexample(cg)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "example3.txt")
        write_edge_list(cg.graph, path)
        code, rep = _cli_json("cover", path, 3)
    elapsed = time.perf_counter() - t0
    checks = {
        "order 112": res["order"] == 112,
        "6-regular": res["regular_degree"] == 6,
        "bipartite": res["bipartite"],
        "girth 4": res["girth"] == 4,
        "24 relators": res["relators_length_4"] == 24,
        "Z/14": res["abelianization_order"] == 14 and res["abelianization_cyclic"],
        "2-locally": res["two_locally_L3"],
        "not weakly 3-locally": not res["weakly_three_locally_L3"],
        "cover obstructed": code == 1 and rep["status"] == "OBSTRUCTED"
        and rep["results"]["obstruction"]["tag"] == "OPPOSITE_VIOLATION",
        "under 30s": elapsed < 30,
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, (f"all {len(checks)} checks hold" if not bad else "failed: " + ", ".join(bad)) + f", {elapsed:.1f}s"


# 4. torus / Klein bottle families by covering and by face gluing

def family_instances():
    for p in range(5, 11):
        for q in range(5, 11):
            for delta in range(p // 2 + 1):
                yield f"torus({p},{q},{delta})", build_torus(p, q, delta), SurfaceKind.TORUS
            for t in ((1,) if p % 2 else (0, 2)):
                yield f"klein({p},{q},{t})", build_klein(p, q, t), SurfaceKind.KLEIN_BOTTLE
            branches = ("le", "ge") if p == q else (None,)
            for b in branches:
                yield f"strange({p},{q},{b})", build_strange(p, q, b), SurfaceKind.KLEIN_BOTTLE


def criterion_4():
    total = 0
    bad = []
    for name, g, want in family_instances():
        total += 1
        via_cover = analyse_cover(g, 2).surface
        surf = glue_surface(find_wheel_family(g), g)
        if not (via_cover is want and surf.kind is want and surf.euler == 0):
            bad.append(name)
    return not bad, f"{total - len(bad)}/{total} instances agree on both paths with euler 0" + (
        f"; failed {bad[:5]}" if bad else "")


# 5. deck group of the (5, 7) strange graph

def criterion_5():
    stated = SubgroupSpec(2, [LatticeAut(SignedPerm((2, 1)), (5, 2)), LatticeAut.translation((5, -5))])
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "s57.txt")
        write_edge_list(build_strange(5, 7), path)
        code, rep = _cli_json("cover", path, 2)
    gens = rep["results"]["deck"]["generators"]
    recovered = parse_group("d 2\n" + "\n".join(gens) + "\n")
    iso = are_isomorphic(build_quotient(recovered).graph, build_quotient(stated).graph)
    iso_family = are_isomorphic(build_quotient(stated).graph, build_quotient(strange_spec(5, 7)).graph)
    conj = are_conjugate(recovered, stated)
    ok = code == 0 and rep["results"]["surface"] == "KLEIN_BOTTLE" and iso and iso_family and conj is not None
    return ok, f"recovered {gens}, quotients isomorphic: {iso}, conjugating element: {conj}"


# 6. order invariance and rigidity of the cover

def criterion_6():
    instances = [
        (build_torus(8, 8, 0), 2, 12),
        (build_klein(7, 9, 1), 2, 14),
        (build_strange(5, 7), 2, 14),
        (build_quotient(SubgroupSpec(3, [LatticeAut(SignedPerm((2, 1, 3)), (0, 0, 7)), LatticeAut.translation((9, 0, 0)),
                                         LatticeAut.translation((0, 9, 0))])).graph, 3, 8),
    ]
    rng = np.random.default_rng(2024)
    orders_ok = 0
    perturbed = caught = 0
    for g, d, R in instances:
        ref = extend_cover(g, seed_map(g, 0, d), R=R)
        assert ref.valid and validate_cover(ref, g)
        for _ in range(10):
            other = extend_cover(g, seed_map(g, 0, d), R=R, order=np.random.default_rng(int(rng.integers(1 << 30))))
            orders_ok += other.valid and np.array_equal(ref.window, other.window)
        for _ in range(50):
            x = tuple(int(c) for c in rng.integers(-R, R + 1, size=d))
            w = ref.window.copy()
            idx = tuple(c + R + 1 for c in x)
            w[idx] = (w[idx] + int(rng.integers(1, g.n))) % g.n
            perturbed += 1
            caught += not validate_cover(type(ref)(d, R, w, ref.status), g)
    n_orders = 10 * len(instances)
    ok = orders_ok == n_orders and caught == perturbed
    return ok, f"{orders_ok}/{n_orders} random orders identical, {caught}/{perturbed} perturbations rejected"


# 7. the point-reflection group has torsion

def criterion_7():
    notes = []
    ok = True
    for d in (3, 7):
        t0 = time.perf_counter()
        spec = remark_group(d)
        D = min_displacement(spec)
        tf = is_torsion_free(spec)
        cls = classify_d(spec=spec)
        dt = time.perf_counter() - t0
        good = (D == d and not tf and tf.witness_order == 2 and cls.kind is QuotientKind.ORBIFOLD_QUOTIENT
                and (d != 7 or dt < 1))
        ok &= good
        notes.append(f"d={d}: D={D}, witness order {tf.witness_order}, {cls.kind.value}, {dt * 1000:.0f}ms")
    return ok, "; ".join(notes)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def _line(k, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("k", range(1, len(CRITERIA) + 1))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _line(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for k, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        results.append(ok)
        print(_line(k, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
