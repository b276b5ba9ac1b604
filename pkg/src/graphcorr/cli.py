"""``graphcorr`` command line interface.

Every subcommand prints one JSON document on standard output. Exit codes:
0 on success, 1 for a negative answer or a failed verification, 2 for
malformed input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import oracles
from .correspondence import CorrElement
from .corpus import bundled_graphs
from .duality import (
    Intertwiner,
    ball_membership,
    center_basis,
    induced_space_decomposition,
    intertwiner_basis,
    parse_mult,
)
from .errors import MalformedInputError, MismatchError, VerificationError
from .fock import creation_operator, fock_basis
from .graph import count_paths, graph_isomorphism
from .jsonio import dumps, load_graph, load_json, parse_complex, parse_matrix
from .linking import linking_report
from .morita import morita_decide
from .suites import SUITES, run_suites


def _emit(obj, code=0):
    print(dumps(obj))
    return code


def _rng(args):
    return np.random.default_rng(args.seed)


def parse_corr_element(graph, raw):
    if not isinstance(raw, dict):
        raise MalformedInputError("element must be a mapping from edge id to coefficient")
    coeffs = np.zeros(graph.n_edges, dtype=complex)
    for eid, val in raw.items():
        coeffs[graph.edge_index(eid)] = parse_complex(val)
    return CorrElement(graph, coeffs)


def parse_intertwiner(rep, raw):
    if not isinstance(raw, dict) or not isinstance(raw.get("blocks"), dict):
        raise MalformedInputError("intertwiner must be {\"blocks\": {edge_id: matrix}}")
    g = rep.graph
    blocks = [np.zeros((rep.m_range(j), rep.m_source(j)), dtype=complex) for j in range(g.n_edges)]
    for eid, rows in raw["blocks"].items():
        blocks[g.edge_index(eid)] = parse_matrix(rows)
    return Intertwiner(rep, blocks)


def cmd_validate(args):
    g = load_graph(args.graph)
    return _emit({"valid": True, "vertices": g.n_vertices, "edges": g.n_edges, "loops": len(g.loops())})


def cmd_iso(args):
    G, F = load_graph(args.graph1), load_graph(args.graph2)
    iso = graph_isomorphism(G, F)
    if iso is None:
        return _emit({"isomorphic": False}, 1)
    return _emit({"isomorphic": True, "certificate": iso.to_dict(), "verified": iso.verify(G, F)})


def cmd_morita(args):
    G, F = load_graph(args.graph1), load_graph(args.graph2)
    cert = morita_decide(G, F, _rng(args), args.samples, args.tol)
    if cert is None:
        return _emit({"equivalent": False}, 1)
    return _emit({"equivalent": True, "certificate": cert.to_dict()})


def cmd_intertwiners(args):
    g = load_graph(args.graph)
    rep = parse_mult(g, args.mult)
    basis = intertwiner_basis(rep)
    out = {
        "multiplicities": dict(zip(g.vertices, rep.mult)),
        "dimension": len(basis),
        "nullspace_dimension": oracles.intertwiner_nullity(rep),
        "induced_space": [{"edge": e, "dim": d} for e, d in induced_space_decomposition(rep)],
    }
    if args.basis:
        out["basis"] = [b.to_dict() for b in basis]
    return _emit(out, 0 if out["dimension"] == out["nullspace_dimension"] else 1)


def cmd_ball(args):
    g = load_graph(args.graph)
    rep = parse_mult(g, args.mult)
    eta = parse_intertwiner(rep, load_json(args.eta))
    inside, norm = ball_membership(eta)
    return _emit({"inside": inside, "norm": norm}, 0 if inside else 1)


def cmd_center(args):
    g = load_graph(args.graph)
    rep = parse_mult(g, args.mult)
    basis = center_basis(rep)
    return _emit({
        "dimension": len(basis),
        "solved_dimension": oracles.center_dim_by_solving(rep),
        "loops": [g.edges[j].id for j in g.loops()],
        "basis": [b.to_dict() for b in basis],
    })


def cmd_fock(args):
    g = load_graph(args.graph)
    N = args.level
    if N < 0:
        raise MalformedInputError("--level must be non-negative")
    fb = fock_basis(g, N)
    out = {
        "N": N,
        "dim": fb.dim,
        "level_dims": [count_paths(g, n) for n in range(N + 1)],
        "basis": [k for lvl in fb.levels for k in lvl.keys()],
    }
    if args.x:
        out["operator"] = creation_operator(parse_corr_element(g, load_json(args.x)), N).to_dict()
    else:
        out["creation"] = {
            e.id: creation_operator(CorrElement.delta(g, j), N).to_dict() for j, e in enumerate(g.edges)
        }
    return _emit(out)


def cmd_linking(args):
    G, F = load_graph(args.graph1), load_graph(args.graph2)
    if not 1 <= args.level <= 3:
        raise MalformedInputError("linking checks support --level 1..3")
    rng = _rng(args)
    cert = morita_decide(G, F, rng, 20, args.tol)
    if cert is None:
        return _emit({"equivalent": False}, 1)
    rep = linking_report(cert, args.level, rng, args.trials)
    ok = (
        rep["corner_residual_max"] <= args.tol
        and rep["product_residual"] <= args.tol
        and rep["fock_match"]
        and rep["matrix_model_residual"] <= args.tol
    )
    rep["pass"] = bool(ok)
    return _emit({"equivalent": True, "certificate": cert.to_dict(), "linking": rep}, 0 if ok else 1)


def cmd_verify(args):
    if args.graphs:
        graphs = [(path, load_graph(path)) for path in args.graphs]
    else:
        graphs = bundled_graphs()
    names = "all" if args.suite == "all" else [args.suite]
    reports = run_suites(names, graphs, args.seed, args.tol, args.level, args.trials)
    out = {
        "graphs": [label for label, _ in graphs],
        "pass": all(r.passed for r in reports),
        "reports": [r.to_dict(timing=args.timing) for r in reports],
    }
    return _emit(out, 0 if out["pass"] else 1)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--tol", type=float, default=1e-10, help="numerical tolerance (default 1e-10)")

    p = argparse.ArgumentParser(prog="graphcorr", description="Graph correspondences: checks and certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a graph file")
    s.add_argument("graph")
    s.set_defaults(func=cmd_validate)

    for name, func, helptext in (
        ("iso", cmd_iso, "find a graph isomorphism"),
        ("morita", cmd_morita, "decide and certify Morita equivalence"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("graph1")
        s.add_argument("graph2")
        s.add_argument("--samples", type=int, default=100, help="random samples for W checks")
        s.set_defaults(func=func)

    s = sub.add_parser("intertwiners", parents=[common], help="intertwiner space of a representation")
    s.add_argument("graph")
    s.add_argument("--mult", default="", help="multiplicities, e.g. v1=2,v2=1")
    s.add_argument("--basis", action="store_true", help="include the basis in the output")
    s.set_defaults(func=cmd_intertwiners)

    s = sub.add_parser("ball", parents=[common], help="unit ball membership of an intertwiner")
    s.add_argument("graph")
    s.add_argument("eta", help='intertwiner JSON {"blocks": {...}}')
    s.add_argument("--mult", default="")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("center", parents=[common], help="center of the dual correspondence")
    s.add_argument("graph")
    s.add_argument("--mult", default="")
    s.set_defaults(func=cmd_center)

    s = sub.add_parser("fock", parents=[common], help="truncated Fock space and creation operators")
    s.add_argument("graph")
    s.add_argument("--level", type=int, default=3)
    s.add_argument("--x", help="correspondence element JSON; default: every edge generator")
    s.set_defaults(func=cmd_fock)

    s = sub.add_parser("linking", parents=[common], help="linking correspondence corner checks")
    s.add_argument("graph1")
    s.add_argument("graph2")
    s.add_argument("--level", type=int, default=3)
    s.add_argument("--trials", type=int, default=50)
    s.set_defaults(func=cmd_linking)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("graphs", nargs="*", help="graph files (default: bundled corpus)")
    s.add_argument("--suite", choices=("all",) + SUITES, default="all")
    s.add_argument("--level", type=int, default=3)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--timing", action="store_true", help="add wall times (output is then not reproducible)")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (MalformedInputError, MismatchError) as exc:
        print(f"graphcorr: {exc}", file=sys.stderr)
        return _emit({"error": str(exc)}, 2)
    except VerificationError as exc:
        print(f"graphcorr: {exc}", file=sys.stderr)
        return _emit({"error": str(exc), "verification_failed": True}, 1)


if __name__ == "__main__":
    sys.exit(main())
