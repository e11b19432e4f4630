"""Command-line front end: roots, chevalley, gens, frattini-module, verify, galois.

Results go to stdout (one JSON document with --format json), diagnostics to
stderr.  Exit codes: 0 success, 1 domain rejection or usage error, 2
resource overflow.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .errors import RejectionError, ResourceLimitError
from .rootdata import build_root_system, build_root_datum, pro_p_cochar_basis, root_chain
from .chevalley import structure_constants, commutator_expansion, collect_product
from .generators import minimal_generators, frattini_module, is_multiplicity_free
from .reps import AdjointRep
from .verify import (
    DEFAULT_BOUND,
    simple_descent_experiment,
    verify_generation,
    verify_g2_span,
    verify_torus_identity,
)
from .galois import evaluate_criterion, search_assignment, threshold_constant


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _datum_from_args(args):
    group = getattr(args, "group", None)
    if group is None and args.type is not None:
        group = "adjoint"
    if group in ("SL", "PGL", "GL"):
        n = args.rank
        if n is None or n < 2:
            raise RejectionError(f"--group {group} needs --rank n >= 2")
        rs = build_root_system("A", n - 1)
        preset = {"SL": "simply-connected", "PGL": "adjoint", "GL": "gl"}[group]
        return build_root_datum(rs, preset)
    if group == "Sp":
        n = args.rank
        if n is None or n % 2 or n < 4:
            raise RejectionError("--group Sp needs an even --rank n >= 4")
        rs = build_root_system("C", n // 2)
        return build_root_datum(rs, "simply-connected")
    if group in ("adjoint", "sc", "simply-connected"):
        if args.type is None or args.rank is None:
            raise RejectionError(f"--group {group} needs --type and --rank")
        rs = build_root_system(args.type, args.rank)
        return build_root_datum(rs, "adjoint" if group == "adjoint" else "simply-connected")
    raise RejectionError("specify --group SL|PGL|GL|Sp|adjoint|sc or --type/--rank")


def _emit(args, doc, text):
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)


def _cmd_roots(args):
    rs = build_root_system(args.type, args.rank)
    datum = None
    if args.group or args.p:
        if not args.p:
            raise RejectionError("--group output needs --p")
        datum = _datum_from_args(args)
    doc = rs.to_dict(datum, args.p) if datum else rs.to_dict()
    lines = [f"type {args.type}{args.rank}: {len(rs.roots)} roots"]
    for r in rs.positive_roots():
        lines.append(f"  + {list(r.coeffs)} height {r.height} {r.length}")
    lines.append(f"highest root {list(rs.highest_root(0).coeffs)}")
    if datum:
        cs = pro_p_cochar_basis(datum, args.p)
        lines.append(f"cocharacter basis mod {args.p}: {[list(v) for v in cs.vectors]}")
    _emit(args, doc, "\n".join(lines))
    return 0


def _parse_vec(s):
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError:
        raise RejectionError(f"expected a comma-separated integer vector, got {s!r}")


def _cmd_chevalley(args):
    rs = build_root_system(args.type, args.rank)
    sc = structure_constants(rs)
    alpha = rs.find(0, _parse_vec(args.alpha))
    beta = rs.find(0, _parse_vec(args.beta))
    if alpha is None or beta is None:
        raise RejectionError("--alpha/--beta must be roots in simple-root coordinates")
    exp = commutator_expansion(sc, alpha, beta)
    doc = exp.to_dict()
    terms = " ".join(
        f"x_{list(t.root.coeffs)}({t.coeff}*u^{t.deg[0]}*v^{t.deg[1]})" for t in exp.terms
    )
    text = (
        f"[x_{list(beta.coeffs)}(v) : x_{list(alpha.coeffs)}(u)] chain (r,s)={exp.chain}\n"
        f"  = {terms if terms else '1'}"
    )
    _emit(args, doc, text)
    return 0


def _cmd_gens(args):
    if args.p is None:
        raise RejectionError("gens needs --p")
    rd = _datum_from_args(args)
    spec = minimal_generators(rd, args.p)
    doc = spec.to_dict()
    doc["count"] = spec.count
    lines = [f"{spec.count} generators for {rd.preset} datum, p = {args.p}"]
    for d in spec.all_descriptors():
        lines.append(f"  {d.to_dict()}")
    _emit(args, doc, "\n".join(lines))
    return 0


def _cmd_frattini(args):
    if args.p is None:
        raise RejectionError("frattini-module needs --p")
    rd = _datum_from_args(args)
    fm = frattini_module(rd, args.p)
    doc = fm.to_dict()
    if len(rd.rs.components) == 1:
        doc["multiplicity_free"] = is_multiplicity_free(rd, args.p)
    lines = [
        f"dimension {fm.dimension} = {fm.trivial_rank} trivial + {len(fm.characters)} characters mod {args.p - 1}"
    ]
    for c in fm.characters:
        lines.append(f"  {list(c)}")
    if "multiplicity_free" in doc:
        lines.append(f"multiplicity_free={doc['multiplicity_free']}")
    _emit(args, doc, "\n".join(lines))
    return 0


def _cmd_verify(args):
    if args.experiment == "hasse":
        if args.type is None or args.rank is None:
            raise RejectionError("--experiment hasse needs --type and --rank")
        rs = build_root_system(args.type, args.rank)
        bad = simple_descent_experiment(rs)
        doc = {"experiment": "hasse", "counterexamples": [[list(v) for v in c] for c in bad]}
        ok = all(not c for c in bad)
        _emit(args, doc, f"simple-root descent holds: {ok}; counterexamples: {doc['counterexamples']}")
        return 0
    if args.p is None:
        raise RejectionError("verify needs --p")
    if args.torus:
        ok = verify_torus_identity(args.p, args.level if args.level >= 2 else 3)
        _emit(args, {"torus_identity": ok}, f"torus identity holds: {ok}")
        return 0 if ok else 1
    if args.g2:
        rep = verify_g2_span(args.p, k=3, bound=args.bound)
        _emit(args, rep.to_dict(), f"G2 span checks pass: {rep.passed} {rep.to_dict()}")
        return 0 if rep.passed else 1
    if args.random_products:
        return _cross_oracle(args)
    rd = _datum_from_args(args)
    report = verify_generation(rd, args.p, k=args.level, bound=args.bound)
    if args.drop is not None:
        doc = report.to_dict()
        if not 0 <= args.drop < len(report.drop_one):
            raise RejectionError("--drop index out of range")
        doc["drop_one"] = [doc["drop_one"][args.drop]]
        _emit(args, doc, str(doc))
    else:
        _emit(args, report.to_dict(), str(report.to_dict()))
    if any("inconclusive" in n for n in report.notes):
        return 2
    return 0 if report.passed else 1


def _cross_oracle(args):
    """Random unipotent products: collection vs adjoint matrices."""
    if args.type is None or args.rank is None:
        raise RejectionError("--random-products needs --type and --rank")
    rs = build_root_system(args.type, args.rank)
    sc = structure_constants(rs)
    rep = AdjointRep(rs, args.p, args.level)
    rng = random.Random(args.seed)
    pos = [r for r in rs.roots if r.height > 0]
    mod = args.p**args.level
    mismatches = 0
    for _ in range(args.random_products):
        letters = [(rng.choice(pos), rng.randrange(mod)) for _ in range(6)]
        word = collect_product(sc, letters, args.p, args.level)
        lhs = rep.word_matrix(word)
        rhs_arg = None
        for root, t in letters:
            m = rep.x(root, t)
            rhs_arg = m if rhs_arg is None else rhs_arg * m
        if lhs != rhs_arg:
            mismatches += 1
    doc = {"instances": args.random_products, "mismatches": mismatches, "seed": args.seed}
    _emit(args, doc, f"cross-oracle mismatches: {mismatches}/{args.random_products}")
    return 0 if mismatches == 0 else 1


def _cmd_galois(args):
    if args.p is None:
        raise RejectionError("galois needs --p")
    if args.type is None or args.rank is None:
        raise RejectionError("galois needs --type and --rank")
    rs = build_root_system(args.type, args.rank)
    rd = build_root_datum(rs, "adjoint")
    report = evaluate_criterion(rd, args.p, check_regular=args.check_regular)
    doc = report.to_dict()
    text = [
        f"type {args.type}{args.rank}, p={args.p}: criterion satisfied: {report.satisfied}"
    ]
    if report.assignment is not None:
        text.append(f"  witness characters: {list(report.assignment.phis)}")
    if not report.b_condition:
        text.append(f"  note: {report.note}")
    if report.regular is not None:
        text.append(f"  p regular: {report.regular}")
    _emit(args, doc, "\n".join(text))
    return 0


def build_parser():
    parser = _Parser(prog="iwahori", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *, group=True):
        sp.add_argument("--type", choices=list("ABCDEFG"))
        sp.add_argument("--rank", type=int)
        if group:
            sp.add_argument("--group", choices=["SL", "PGL", "GL", "Sp", "adjoint", "sc"])
        sp.add_argument("--p", type=int)
        sp.add_argument("--format", choices=["text", "json"], default="text")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("roots", help="root system data, optionally with cocharacter basis")
    common(sp)

    sp = sub.add_parser("chevalley", help="rank-2 commutator expansion for a root pair")
    common(sp)
    sp.add_argument("--alpha", required=True, help="comma-separated simple-root coefficients")
    sp.add_argument("--beta", required=True)

    sp = sub.add_parser("gens", help="minimal topological generator set")
    common(sp)

    sp = sub.add_parser("frattini-module", help="Frattini quotient character decomposition")
    common(sp)

    sp = sub.add_parser("verify", help="finite-level generation and minimality checks")
    common(sp)
    sp.add_argument("--level", type=int, default=2)
    sp.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    sp.add_argument("--drop", type=int, default=None)
    sp.add_argument("--torus", action="store_true", help="check the pro-p torus identity")
    sp.add_argument("--g2", action="store_true", help="run the G2 span checks")
    sp.add_argument("--random-products", type=int, default=0,
                    help="cross-check collection against adjoint matrices on N random words")
    sp.add_argument("--experiment", choices=["hasse"], default=None)

    sp = sub.add_parser("galois", help="character criterion and regularity")
    common(sp, group=False)
    sp.add_argument("--check-regular", action="store_true")
    sp.add_argument("--json", dest="format", action="store_const", const="json")

    return parser


_HANDLERS = {
    "roots": _cmd_roots,
    "chevalley": _cmd_chevalley,
    "gens": _cmd_gens,
    "frattini-module": _cmd_frattini,
    "verify": _cmd_verify,
    "galois": _cmd_galois,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return _HANDLERS[args.command](args)
    except RejectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"resource limit: {exc} (count={exc.count})", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
