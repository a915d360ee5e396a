"""Command-line front end.

Exit codes: 0 for a decisive answer, 2 when a bounded search was
inconclusive, 1 on errors. JSON goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .abelian import abelian_retract_obstruction, exponent_vector, is_primitive
from .closure import DEFAULT_BOUND, is_retract, is_verbally_closed, vcl
from .equations import DEFAULT_BUDGET, CoefficientSystem, solve_in_subgroup
from .errors import VClosureError
from .nilpotent import (
    NilElement,
    collect,
    commutator_width_bounded,
    hall_basis,
    verify_commutator_form,
)
from .stallings import DEFAULT_FRINGE_LIMIT, SubgroupGraph, basis_of, contains, fold, fringe, intersect
from .words import Word

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _words(text: str, rank: int, stdin) -> list[Word]:
    if text == "-":
        text = stdin.read()
    parts = [p for p in text.replace(",", " ").split()]
    return [Word.parse(p, rank) for p in parts]


def _graph(args, stdin, attr="gens") -> SubgroupGraph:
    return fold(_words(getattr(args, attr), args.rank, stdin), args.rank)


def _basis_strings(g: SubgroupGraph) -> list[str]:
    return [str(w) for w in basis_of(g)]


def _emit_graph(g: SubgroupGraph, fmt: str, out) -> None:
    if fmt == "dot":
        out.write(g.to_dot())
    elif fmt == "text":
        out.write(f"rank {g.subgroup_rank}, {g.num_vertices} vertices\n")
        for u, l, v in g.edges:
            out.write(f"{u} -{Word((l,), g.rank)}-> {v}\n")
    else:
        data = g.to_dict()
        data["basis"] = _basis_strings(g)
        data["rank"] = g.subgroup_rank
        _dump(data, out)


def _dump(data, out) -> None:
    out.write(json.dumps(data, sort_keys=True) + "\n")


def _emit(data: dict, fmt: str, out) -> None:
    if fmt == "dot":
        raise UsageError("--format dot is only available for fold and intersect")
    if fmt == "text":
        for key in sorted(data):
            out.write(f"{key}: {data[key]}\n")
    else:
        _dump(data, out)


def cmd_fold(args, out, stdin):
    _emit_graph(_graph(args, stdin), args.format, out)
    return EXIT_OK


def cmd_member(args, out, stdin):
    g = _graph(args, stdin)
    _emit({"member": contains(g, Word.parse(args.word, args.rank))}, args.format, out)
    return EXIT_OK


def cmd_basis(args, out, stdin):
    g = _graph(args, stdin)
    _emit({"basis": _basis_strings(g), "rank": g.subgroup_rank}, args.format, out)
    return EXIT_OK


def cmd_intersect(args, out, stdin):
    k = intersect(_graph(args, stdin), _graph(args, stdin, "gens2"))
    _emit_graph(k, args.format, out)
    return EXIT_OK


def cmd_fringe(args, out, stdin):
    members = fringe(_graph(args, stdin), args.limit)
    _emit({"count": len(members), "members": [_basis_strings(k) for k in members]}, args.format, out)
    return EXIT_OK


def cmd_abelianize(args, out, stdin):
    g = _graph(args, stdin)
    basis = basis_of(g)
    vectors = [exponent_vector(w) for w in basis]
    check = abelian_retract_obstruction(vectors, args.rank)
    data = {
        "basis": [str(w) for w in basis],
        "vectors": [list(v) for v in vectors],
        "primitive": [is_primitive(v) for v in vectors],
        "factors": list(check.factors),
        "obstruction": "passes" if check.passes else "obstructed",
    }
    if check.projection is not None:
        data["projection"] = check.projection
    _emit(data, args.format, out)
    return EXIT_OK


def _verdict_exit(kind: str) -> int:
    return EXIT_INCONCLUSIVE if kind == "unknown" else EXIT_OK


def cmd_is_retract(args, out, stdin):
    v = is_retract(_graph(args, stdin), args.bound, args.budget)
    _emit(v.to_dict(), args.format, out)
    return _verdict_exit(v.kind)


def cmd_is_verbally_closed(args, out, stdin):
    v = is_verbally_closed(_graph(args, stdin), args.bound, args.budget)
    _emit(v.to_dict(), args.format, out)
    return _verdict_exit(v.kind)


def cmd_vcl(args, out, stdin):
    result = vcl(_graph(args, stdin), args.bound, args.budget, args.limit)
    _emit(result.to_dict(), args.format, out)
    return EXIT_OK if result.status == "exact" else EXIT_INCONCLUSIVE


def cmd_solve(args, out, stdin):
    text = args.system
    if text == "-":
        text = stdin.read()
    elif text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"system is not valid JSON: {exc.msg} at position {exc.pos}") from None
    system = CoefficientSystem.from_dict(data, args.rank)
    domain = _graph(args, stdin) if args.gens else SubgroupGraph.full(args.rank)
    sol = solve_in_subgroup(system, domain, args.bound, args.budget)
    if sol is None:
        _emit({"result": "not-found-up-to-bound", "bound": args.bound}, args.format, out)
        return EXIT_INCONCLUSIVE
    _emit({"result": "found", "solution": sol.to_dict(), "bound": args.bound}, args.format, out)
    return EXIT_OK


def cmd_nil_collect(args, out, stdin):
    basis = hall_basis(args.rank, args.nclass)
    g = collect(Word.parse(args.word, args.rank), basis)
    data = g.to_dict()
    data["names"] = basis.names()
    _emit(data, args.format, out)
    return EXIT_OK


def cmd_nil_width(args, out, stdin):
    basis = hall_basis(args.rank, args.nclass)
    exps = [int(x) for x in args.exps.replace(",", " ").split()]
    g = NilElement.from_dict({"basis": repr(basis), "exps": exps})
    if args.generator_form:
        form = verify_commutator_form(g, basis, args.coord_bound, args.budget)
        if form is None:
            _emit({"result": "not-found-within-bound", "coord_bound": args.coord_bound}, args.format, out)
            return EXIT_INCONCLUSIVE
        data = form.to_dict()
        data["result"] = "found"
        _emit(data, args.format, out)
        return EXIT_OK
    res = commutator_width_bounded(g, args.commutators, args.coord_bound, args.budget)
    _emit(res.to_dict(), args.format, out)
    return EXIT_OK if res.representable else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vclosure", description="Retracts and verbal closures of subgroups of free groups.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, gens=True):
        p.add_argument("--rank", type=int, required=True)
        if gens:
            p.add_argument("--gens", required=True, help='comma-separated words, or "-" for stdin')
        p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--format", choices=["json", "dot", "text"], default="json")
        return p

    common(sub.add_parser("fold")).set_defaults(func=cmd_fold)
    p = common(sub.add_parser("member"))
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_member)
    common(sub.add_parser("basis")).set_defaults(func=cmd_basis)
    p = common(sub.add_parser("intersect"))
    p.add_argument("--gens2", required=True)
    p.set_defaults(func=cmd_intersect)
    p = common(sub.add_parser("fringe"))
    p.add_argument("--limit", type=int, default=DEFAULT_FRINGE_LIMIT)
    p.set_defaults(func=cmd_fringe)
    common(sub.add_parser("abelianize")).set_defaults(func=cmd_abelianize)
    common(sub.add_parser("is-retract")).set_defaults(func=cmd_is_retract)
    common(sub.add_parser("is-verbally-closed")).set_defaults(func=cmd_is_verbally_closed)
    p = common(sub.add_parser("vcl"))
    p.add_argument("--limit", type=int, default=DEFAULT_FRINGE_LIMIT)
    p.set_defaults(func=cmd_vcl)
    p = common(sub.add_parser("solve"), gens=False)
    p.add_argument("--system", required=True, help='JSON text, "@file" or "-" for stdin')
    p.add_argument("--gens", default=None, help="domain subgroup (default: the whole free group)")
    p.set_defaults(func=cmd_solve)

    nil = sub.add_parser("nilpotent")
    nsub = nil.add_subparsers(dest="nil_command", required=True, parser_class=_Parser)
    p = common(nsub.add_parser("collect"), gens=False)
    p.add_argument("--class", dest="nclass", type=int, required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_nil_collect)
    p = common(nsub.add_parser("width"), gens=False)
    p.add_argument("--class", dest="nclass", type=int, required=True)
    p.add_argument("--exps", required=True, help="Mal'cev coordinates, comma-separated")
    p.add_argument("--commutators", type=int, default=1)
    p.add_argument("--coord-bound", type=int, default=3)
    p.add_argument("--generator-form", action="store_true", help="search g = [g_1,z_1]...[g_r,z_r] instead")
    p.set_defaults(func=cmd_nil_width, budget=10**7)
    return parser


def main(argv=None, out=None, err=None, stdin=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "rank", 1) < 1 or getattr(args, "bound", 0) < 0:
            raise UsageError("--rank must be >= 1 and --bound >= 0")
        return args.func(args, out, stdin)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
    except VClosureError as exc:
        err.write(f"error: {exc}\n")
    except (OSError, KeyError, ValueError) as exc:
        err.write(f"error: {exc}\n")
    return EXIT_ERROR


run = main

if __name__ == "__main__":
    sys.exit(main())
