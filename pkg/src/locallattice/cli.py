"""Command line entry point: ``locallattice <command> ...``."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import cayley, cover, families, lattice, probe, wheel
from .graph import Graph, read_edge_list, write_edge_list
from .report import Report

ERROR_CODES = {
    lattice.NonCocompactError: "NON_COCOMPACT",
    cover.NoOppositeStructureError: "NO_OPPOSITE_STRUCTURE",
    cover.FiberNotFoundError: "FIBER_NOT_FOUND",
    cover.OrbifoldUnexpectedError: "ORBIFOLD_UNEXPECTED",
    wheel.WheelSearchIndeterminate: "INDETERMINATE",
    wheel.MalformedCertificateError: "MALFORMED_CERTIFICATE",
    cayley.GroupConstructionError: "GROUP_CONSTRUCTION",
}


def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="print the report as JSON")
    p.add_argument("--threads", type=int, default=default, help="worker threads for per-vertex checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locallattice", description=__doc__)
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write the edge list of a named graph")
    _common(b, True)
    b.add_argument("family", choices=["grid", "torus", "klein", "strange", "gentorus", "group", "example3", "exampled"])
    b.add_argument("params", nargs="*", help="integers, or a group file for 'group'")
    b.add_argument("-o", "--output", help="edge-list file (default: stdout, report to stderr)")

    c = sub.add_parser("check", help="test r-local or weak r-local likeness to L^d")
    _common(c, True)
    c.add_argument("graph")
    c.add_argument("d", type=int)
    c.add_argument("r", type=int)
    c.add_argument("strength", choices=["strong", "weak"])

    cv = sub.add_parser("cover", help="build a covering map from L^d and recover the deck group")
    _common(cv, True)
    cv.add_argument("graph")
    cv.add_argument("d", type=int)
    cv.add_argument("R", type=int, nargs="?")
    cv.add_argument("--vertex", type=int, default=0, help="base vertex (default 0)")
    cv.add_argument("--dump", help="write the lattice map, one 'x1 .. xd -> v' line per point")

    g = sub.add_parser("group", help="invariants of a subgroup of Aut(L^d)")
    _common(g, True)
    g.add_argument("groupfile")
    g.add_argument("action", choices=["displacement", "rank", "torsion", "quotient"])
    g.add_argument("-o", "--output", help="edge-list file for 'quotient'")

    w = sub.add_parser("wheel", help="find a 4-cycle wheel family and glue the surface")
    _common(w, True)
    w.add_argument("graph")
    w.add_argument("--budget", type=int, default=200_000)

    e3 = sub.add_parser("example3", help="the d = 3 counterexample: edge list and verification")
    _common(e3, True)
    e3.add_argument("-o", "--output")

    ed = sub.add_parser("exampled", help="product extension of the counterexample to dimension d")
    _common(ed, True)
    ed.add_argument("d", type=int)
    ed.add_argument("-o", "--output")
    return parser


def _ints(params: list[str], count: int, name: str) -> list[int]:
    if len(params) != count:
        raise ValueError(f"{name} takes {count} integer parameters")
    return [int(x) for x in params]


def _emit_graph(g: Graph, output: str | None) -> bool:
    """Write the edge list; returns True when the report should go to stderr."""
    if output:
        write_edge_list(g, output)
        return False
    sys.stdout.write(write_edge_list(g))
    return True


def cmd_build(args) -> tuple[Report, bool]:
    fam, params = args.family, args.params
    rep = Report("build", inputs={"family": fam, "params": params})
    if fam == "grid":
        g = families.build_grid(*_ints(params, 2, fam))
    elif fam == "torus":
        g = families.build_torus(*_ints(params, 3, fam))
    elif fam == "klein":
        g = families.build_klein(*_ints(params, 3, fam))
    elif fam == "strange":
        g = families.build_strange(*_ints(params, 2, fam))
    elif fam == "gentorus":
        x1, y1, x2, y2 = _ints(params, 4, fam)
        g = families.build_gen_torus((x1, y1), (x2, y2))
    elif fam == "group":
        if len(params) != 1:
            raise ValueError("group takes one group file")
        q = lattice.build_quotient(lattice.read_group(params[0]))
        rep.results.update(loops_found=q.loops_found, multi_edges_found=q.multi_edges_found)
        g = q.graph
    elif fam == "example3":
        g = cayley.build_example_group().graph
    else:
        g = cayley.build_product_extension(*_ints(params, 1, fam)).graph
    rep.results.update(vertices=g.n, edges=g.num_edges, regular_degree=g.regular_degree())
    return rep, _emit_graph(g, args.output)


def cmd_check(args) -> Report:
    g = read_edge_list(args.graph)
    fn = probe.is_r_locally if args.strength == "strong" else probe.is_weakly_r_locally
    res = fn(g, args.d, args.r, threads=args.threads)
    rep = Report("check", inputs={"graph": args.graph, "d": args.d, "r": args.r, "strength": args.strength})
    rep.results["holds"] = res.holds
    if not res.holds:
        rep.results["failing_vertex"] = res.failing_vertex
        rep.results["failing_label"] = g.label(res.failing_vertex)
        rep.status = "OBSTRUCTED"
    return rep


def cmd_cover(args) -> Report:
    g = read_edge_list(args.graph)
    rep = Report("cover", inputs={"graph": args.graph, "d": args.d, "R": args.R, "vertex": args.vertex})
    res = cover.analyse_cover(g, args.d, args.R, v0=args.vertex)
    pc = res.cover
    rep.results.update(status=pc.status.value, R=pc.R, backend=pc.backend)
    if args.dump:
        Path(args.dump).write_text(pc.dump())
    if not pc.valid:
        rep.results["obstruction"] = pc.obstruction.to_dict()
        rep.status = "OBSTRUCTED"
        return rep
    dg = res.deck
    rep.results["deck"] = {
        "generators": [str(a) for a in dg.generators],
        "fiber_size": dg.fiber_size,
        "transitive_on_fiber": dg.transitive_on_fiber,
        "certified": dg.certified,
    }
    if res.surface is not None:
        rep.results["surface"] = res.surface.value
    if res.quotient is not None:
        rep.results["quotient"] = res.quotient.kind.value
        if res.quotient.witness is not None:
            rep.results["torsion_witness"] = str(res.quotient.witness)
    return rep


def cmd_group(args) -> tuple[Report, bool]:
    spec = lattice.read_group(args.groupfile)
    rep = Report("group", inputs={"groupfile": args.groupfile, "action": args.action})
    to_stderr = False
    if args.action == "displacement":
        val, elem, x = lattice.displacement_witness(spec)
        rep.results.update(displacement=val, witness=None if elem is None else str(elem), point=x)
    elif args.action == "rank":
        lat = spec.translation_lattice
        rep.results.update(rank=lat.rank, index=lat.index, basis=lat.basis, point_group_order=len(spec.point_group))
    elif args.action == "torsion":
        tf = lattice.is_torsion_free(spec)
        rep.results.update(torsion_free=tf.torsion_free)
        if not tf:
            rep.results.update(witness=str(tf.witness), order=tf.witness_order)
            rep.status = "OBSTRUCTED"
    else:
        q = lattice.build_quotient(spec)
        rep.results.update(vertices=q.graph.n, edges=q.graph.num_edges,
                           loops_found=q.loops_found, multi_edges_found=q.multi_edges_found)
        to_stderr = _emit_graph(q.graph, args.output)
    return rep, to_stderr


def cmd_wheel(args) -> Report:
    g = read_edge_list(args.graph)
    rep = Report("wheel", inputs={"graph": args.graph})
    cert = wheel.find_wheel_family(g, node_budget=args.budget)
    if cert is None:
        rep.results["found"] = False
        rep.status = "OBSTRUCTED"
        return rep
    surf = wheel.glue_surface(cert, g)
    rep.results.update(found=True, faces=surf.faces, vertices=surf.vertices, edges=surf.edges,
                       euler=surf.euler, orientable=surf.orientable, surface=surf.kind.value)
    return rep


def cmd_example3(args) -> tuple[Report, bool]:
    cg = cayley.build_example_group()
    rep = Report("example3", results=cayley.verify_counterexample(cg))
    expected = (rep.results["order"] == 112 and rep.results["two_locally_L3"]
                and rep.results["cover_status"] == "OBSTRUCTED")
    rep.status = "OK" if expected else "OBSTRUCTED"
    return rep, _emit_graph(cg.graph, args.output)


def cmd_exampled(args) -> tuple[Report, bool]:
    cg = cayley.build_product_extension(args.d)
    g = cg.graph
    rep = Report("exampled", inputs={"d": args.d})
    rep.results.update(vertices=g.n, edges=g.num_edges, regular_degree=g.regular_degree())
    return rep, _emit_graph(g, args.output)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        os.environ["LL_THREADS"] = str(args.threads)
    to_stderr = False
    try:
        if args.command == "build":
            rep, to_stderr = cmd_build(args)
        elif args.command == "check":
            rep = cmd_check(args)
        elif args.command == "cover":
            rep = cmd_cover(args)
        elif args.command == "group":
            rep, to_stderr = cmd_group(args)
        elif args.command == "wheel":
            rep = cmd_wheel(args)
        elif args.command == "example3":
            rep, to_stderr = cmd_example3(args)
        else:
            rep, to_stderr = cmd_exampled(args)
    except (ValueError, RuntimeError, OSError) as exc:
        code = next((c for t, c in ERROR_CODES.items() if isinstance(exc, t)), "BAD_INPUT")
        rep = Report(args.command, "ERROR", error={"code": code, "message": str(exc)})
        to_stderr = True
    out = sys.stderr if to_stderr else sys.stdout
    out.write(rep.to_json() + "\n" if args.json else rep.to_text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
