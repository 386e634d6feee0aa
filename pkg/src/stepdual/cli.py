"""Command-line entry point: ``stepdual <subcommand> ...``.

Exit codes: 0 ok, 1 property violated, 2 usage error, 3 cap exceeded or other error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import duality as du
from . import fo, gamma, layers, modal, order, presented
from .errors import CapExceeded, InconsistentPresentation, ParseError, StepDualError, UnsupportedFormat

SCHEMA = "stepdual.report/1"

OK = "ok"
VIOLATED = "property-violated"
CAP = "cap-exceeded"
ERROR = "error"
EXIT_CODES = {OK: 0, VIOLATED: 1, CAP: 3, ERROR: 3}
USAGE_EXIT = 2

PROVENANCE = {
    "verify exists": "the image of R in the Vietoris space of the dual of B is the dual space of the existential layer",
    "verify semiring": "the image of R in the S-valued measures on the dual of B is the dual space of the semiring layer",
    "verify fbox": "the dual of F_box(L) is the space of filters of L",
    "verify farrow": "the dual of F_to(L x M) is the monotone maps from J(L) to the Smyth space of J(M); at primes, to J(M)",
    "verify erp": "a sublattice inclusion has an e-r-p retraction iff principal down-sets and join-primes are preserved; the dual pair is an e-r-p",
    "verify rules": "soundness of the probabilistic inference rules for Gamma-valued measures of finite structures",
}


class UsageError(Exception):
    """Invalid command line; exits with status 2."""


@dataclass(frozen=True)
class Command:
    name: str
    args: argparse.Namespace


@dataclass
class Report:
    status: str
    payload: dict = field(default_factory=dict)
    provenance: str | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "status": self.status, "provenance": self.provenance, "payload": self.payload}


# -- parsing ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "table", "dot"), default="json", help="output format")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised case generation")
    p.add_argument("--cap", type=int, default=None, help="override the size cap (prints a blow-up warning)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stepdual", description="Finite dualities, step-by-step constructions and logic layers.")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)

    def add(name, help, **kw):
        p = sub.add_parser(name, help=help, **kw)
        _common(p)
        return p

    p = add("dual", "dual space of a finite Boolean algebra or distributive lattice")
    p.add_argument("kind", choices=("ba", "dl"))
    p.add_argument("--in", dest="input", required=True, help="lattice as poset JSON (file or inline)")

    for name, text in (("vietoris", "Vietoris space of a finite discrete space"), ("smyth", "Smyth space of a finite poset")):
        p = add(name, text)
        p.add_argument("--in", dest="input", required=True, help="space as poset JSON")

    p = add("ma", "MA(B) via the Vietoris space, checked against its presentation")
    p.add_argument("--in", dest="input", required=True, help="Boolean algebra as poset JSON")

    p = add("tower", "dual levels of the step-wise free modal algebra")
    p.add_argument("--vars", required=True, help="variable count or comma-separated names")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--formula", help="modal formula to interpret")

    p = add("fbox", "F_box(L) and its dual points")
    p.add_argument("--in", dest="input", required=True, help="lattice as poset JSON")
    p.add_argument("--expansion", choices=("full", "binary"), default="full")

    p = add("farrow", "F_to(L x M) and its dual points")
    p.add_argument("--in", dest="input", required=True, help="source lattice L")
    p.add_argument("--target", required=True, help="target lattice M")
    p.add_argument("--at-primes", action="store_true", help="also impose joins at join-primes")
    p.add_argument("--expansion", choices=("full", "binary"), default="full")

    p = add("erp", "decide whether a sublattice inclusion has an e-r-p retraction")
    p.add_argument("--in", dest="input", required=True, help="lattice L as poset JSON")
    p.add_argument("--sub", required=True, help="JSON list of elements of the sublattice K")

    p = sub.add_parser("fo", help="first-order structures and formulas")
    fsub = p.add_subparsers(dest="action", metavar="ACTION", required=True, parser_class=_Parser)
    q = fsub.add_parser("eval", help="evaluate a formula in a structure")
    _common(q)
    q.add_argument("--in", dest="input", required=True, help="structure JSON")
    q.add_argument("--sig", help="signature JSON (default: read off the structure)")
    q.add_argument("--phi", required=True)
    q.add_argument("--assign", default="", help="values of v1,v2,... as a comma list")
    q.add_argument("--semiring", default=None, help="bool, Z<q> or a table JSON, for counting quantifiers")
    q = fsub.add_parser("enum", help="enumerate finite structures")
    _common(q)
    q.add_argument("--sig", required=True)
    q.add_argument("--max-size", type=int, required=True)
    q.add_argument("--theory", action="append", default=[], help="sentence the structures must satisfy")
    q.add_argument("--raw", action="store_true", help="keep isomorphic copies")

    p = sub.add_parser("layer", help="one step of the quantifier layers")
    lsub = p.add_subparsers(dest="action", metavar="ACTION", required=True, parser_class=_Parser)
    for name in ("exists", "semiring"):
        q = lsub.add_parser(name, help=f"{name} layer over an algebra generated by formulas")
        _common(q)
        _layer_flags(q)

    p = sub.add_parser("verify", help="run a duality or soundness sweep")
    vsub = p.add_subparsers(dest="action", metavar="ACTION", required=True, parser_class=_Parser)
    for name in ("exists", "semiring"):
        q = vsub.add_parser(name)
        _common(q)
        q.add_argument("--sig", default='{"relations": {"P": 1}}')
        q.add_argument("--max-size", type=int, default=3)
        q.add_argument("--window", type=int, default=2)
        q.add_argument("--index", type=int, default=None, help="variable to quantify (default: every one)")
        q.add_argument("--pool", action="append", default=None, help="candidate generating formula (repeatable)")
        q.add_argument("--max-generators", type=int, default=2)
        q.add_argument("--samples", type=int, default=None, help="random generator choices instead of all")
        if name == "semiring":
            q.add_argument("--semiring", action="append", default=None, help="bool, Z<q> or table JSON (repeatable)")
    q = vsub.add_parser("fbox")
    _common(q)
    q.add_argument("--max-ji", type=int, default=4)
    q.add_argument("--expansion", choices=("full", "binary"), default="full")
    q = vsub.add_parser("farrow")
    _common(q)
    q.add_argument("--max-ji", type=int, default=3)
    q = vsub.add_parser("erp")
    _common(q)
    q.add_argument("--max-size", type=int, default=6)
    q = vsub.add_parser("rules")
    _common(q)
    q.add_argument("--sig", default='{"relations": {"P": 1}}')
    q.add_argument("--sizes", type=int, default=3, help="largest structure size")
    q.add_argument("--qgrid", type=int, default=4, help="largest threshold denominator")
    q.add_argument("--window", type=int, default=1)
    q.add_argument("--formula", action="append", default=None, help="formula generating the algebra (repeatable)")
    q.add_argument("--synthetic", type=int, default=0, help="also check all measures with this atom denominator")

    p = add("pairing", "Stone pairing of a formula with a finite structure")
    p.add_argument("--in", dest="input", required=True, help="structure JSON")
    p.add_argument("--sig", help="signature JSON (default: read off the structure)")
    p.add_argument("--phi", required=True)
    p.add_argument("--window", type=int, required=True)

    p = sub.add_parser("prob", help="probabilistic formulas")
    psub = p.add_subparsers(dest="action", metavar="ACTION", required=True, parser_class=_Parser)
    q = psub.add_parser("sat", help="does the pairing measure of a structure satisfy a probabilistic formula")
    _common(q)
    q.add_argument("--in", dest="input", required=True, help="structure JSON")
    q.add_argument("--sig", help="signature JSON (default: read off the structure)")
    q.add_argument("--pi", required=True)
    q.add_argument("--window", type=int, required=True)
    return parser


def _layer_flags(q):
    q.add_argument("--sig", required=True)
    q.add_argument("--max-size", type=int, required=True)
    q.add_argument("--window", type=int, required=True)
    q.add_argument("--formula", action="append", required=True, help="formula generating B (repeatable)")
    q.add_argument("--index", type=int, required=True, help="variable to quantify")
    q.add_argument("--semiring", default="bool", help="bool, Z<q> or table JSON")
    q.add_argument("--generators", choices=("all", "atoms"), default="all")


def parse_command(argv: Sequence[str]) -> Command:
    """Validate ``argv``; raises :class:`UsageError` on anything malformed."""
    argv = list(argv)
    if not argv:
        raise UsageError("no subcommand given (try --help)")
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("no subcommand given (try --help)")
    sub = getattr(args, "action", None) or getattr(args, "kind", None)
    name = args.command + (f" {sub}" if sub else "")
    return Command(name, args)


# -- input helpers ---------------------------------------------------------


def _load(source: str):
    text = source.strip()
    if text[:1] in "{[":
        return json.loads(text)
    return json.loads(Path(source).read_text())


def _lattice(source: str) -> order.FinDistLattice:
    return order.FinDistLattice.from_poset(order.FinPoset.from_json(_load(source)))


def _boolalg(source: str) -> order.FinBoolAlg:
    return order.FinBoolAlg.from_lattice(_lattice(source))


def _space(source: str) -> du.FinSpace:
    return du.FinSpace(order.FinPoset.from_json(_load(source)))


def _signature(source: str | None, structure: fo.FinStructure | None = None) -> fo.Signature:
    if source is not None:
        return fo.Signature.from_json(_load(source))
    rels = []
    for name, tuples in structure.relations:
        arities = {len(t) for t in tuples}
        if len(arities) > 1:
            raise UsageError(f"relation {name} has mixed arities; pass --sig")
        if not arities:
            raise UsageError(f"arity of empty relation {name} is unknown; pass --sig")
        rels.append((name, arities.pop()))
    return fo.Signature(tuple(rels), tuple(c for c, _ in structure.constants))


def _structure(source: str) -> fo.FinStructure:
    return fo.FinStructure.from_json(_load(source))


def _semiring(spec: str) -> layers.SemiringTable:
    s = spec.strip()
    if s[:1] == "{" or s.endswith(".json"):
        return layers.SemiringTable.from_json(_load(s))
    return layers.semiring_by_name(s)


def _cap(args, default: int) -> int:
    if args.cap is None:
        return default
    if args.cap > default:
        print(f"warning: cap raised from {default} to {args.cap}; sizes can grow as towers of exponentials", file=sys.stderr)
    return args.cap


def _frac(q: Fraction) -> str:
    return str(q)


def _poset_payload(P: order.FinPoset) -> dict:
    return {"size": len(P), "poset": P.to_json(), "dot": P.to_dot()}


def _lattices_up_to(max_ji: int) -> list[tuple[order.FinPoset, order.FinDistLattice]]:
    out = []
    for n in range(max_ji + 1):
        for P in order.enumerate_posets(n):
            out.append((P, order.downset_lattice(P)))
    return out


def _lattice_name(P: order.FinPoset) -> str:
    return f"D({len(P)} points, {len(P.covers())} covers)"


# -- handlers --------------------------------------------------------------


def _run_dual(args) -> Report:
    if args.kind == "ba":
        B = _boolalg(args.input)
        X, hat = du.dual_ba(B)
        payload = _poset_payload(X.poset)
        payload["clopen_map"] = [[order._jsonable(a), order._jsonable(hat[a])] for a in B.elements]
    else:
        payload = _poset_payload(du.dual_dl(_lattice(args.input)).poset)
    return Report(OK, payload)


def _run_vietoris(args) -> Report:
    return Report(OK, _poset_payload(du.vietoris(_space(args.input), cap=_cap(args, du.DEFAULT_POINT_CAP)).poset))


def _run_smyth(args) -> Report:
    return Report(OK, _poset_payload(du.smyth(_space(args.input)).poset))


def _run_ma(args) -> Report:
    B = _boolalg(args.input)
    M = du.ma_functor(B, cap=_cap(args, 1 << 12))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InconsistentPresentation)
        R, _ = presented.realize(presented.quotient(du.ma_presentation(B)))
    iso = order.is_isomorphic(M.algebra.lattice.carrier, R.lattice.carrier)
    failures = M.equation_failures()
    payload = {
        "atoms": len(M.algebra.atoms()),
        "elements": len(M.algebra),
        "presented_elements": len(R),
        "isomorphic_to_presentation": iso,
        "equation_failures": failures[:5],
    }
    if not iso or failures:
        payload["counterexample"] = failures[0] if failures else "MA(B) and the presented algebra differ in size or order"
        return Report(VIOLATED, payload)
    return Report(OK, payload)


def _run_tower(args) -> Report:
    names = [f"p{k}" for k in range(1, int(args.vars) + 1)] if args.vars.isdigit() else [v.strip() for v in args.vars.split(",") if v.strip()]
    T = modal.build_tower(names, args.depth, cap=_cap(args, modal.DEFAULT_TOWER_CAP))
    payload = {"variables": names, "depth": T.depth, "sizes": T.sizes}
    if args.formula:
        phi = modal.parse_modal(args.formula)
        extent = modal.interpret(phi, T)
        payload["formula"] = {"text": str(phi), "rank": modal.rank(phi), "satisfying_points": len(extent), "level_points": T.sizes[modal.rank(phi)]}
    return Report(OK, payload)


def _presented_payload(theta: presented.PresentedLattice) -> dict:
    pts = theta.dual_points()
    return {"points": len(theta.points), "elements": len(theta), "dual_points": len(pts), "poset": pts.to_json(), "dot": pts.to_dot()}


def _run_fbox(args) -> Report:
    L = _lattice(args.input)
    theta = du.f_box(L, args.expansion, cap=_cap(args, du.DEFAULT_POINT_CAP))
    payload = _presented_payload(theta)
    payload["filters"] = len(L)
    return Report(OK, payload)


def _run_farrow(args) -> Report:
    L, M = _lattice(args.input), _lattice(args.target)
    build = du.f_arrow_at_primes if args.at_primes else du.f_arrow
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InconsistentPresentation)
        theta = build(L, M, args.expansion, cap=_cap(args, du.DEFAULT_POINT_CAP))
    payload = _presented_payload(theta)
    payload["joins_at_primes"] = bool(du.joins_at_primes(theta, L, M, args.expansion))
    return Report(OK, payload)


def _run_erp(args) -> Report:
    L = _lattice(args.input)
    sub = [order._hashable(x) for x in _load(args.sub)]
    r = du.erp_retraction(L, sub)
    payload = {
        "principal": r.principal,
        "principal_witness": order._jsonable(r.principal_witness),
        "primes": r.primes,
        "primes_witness": order._jsonable(r.primes_witness),
        "retraction": None if r.retraction is None else [[order._jsonable(a), order._jsonable(b)] for a, b in r.retraction.mapping.items()],
    }
    return Report(OK, payload)


def _run_fo_eval(args) -> Report:
    A = _structure(args.input)
    sig = _signature(args.sig, A)
    A.check_signature(sig)
    phi = fo.parse_fo(args.phi, sig)
    alpha = [int(x) for x in args.assign.split(",") if x.strip()]
    S = _semiring(args.semiring) if args.semiring else None
    return Report(OK, {"formula": str(phi), "value": fo.evaluate(A, alpha, phi, S)})


def _run_fo_enum(args) -> Report:
    sig = fo.Signature.from_json(_load(args.sig))
    theory = [fo.parse_fo(t, sig) for t in args.theory]
    structs = fo.enumerate_structures(sig, args.max_size, theory, up_to_iso=not args.raw, cap=_cap(args, 1 << 16))
    counts = {}
    for A in structs:
        counts[A.size] = counts.get(A.size, 0) + 1
    return Report(OK, {"count": len(structs), "by_size": {str(k): v for k, v in sorted(counts.items())}, "structures": [A.to_json() for A in structs]})


def _layer_setup(args):
    sig = fo.Signature.from_json(_load(args.sig))
    structs = fo.enumerate_structures(sig, args.max_size)
    space = fo.model_space(structs, args.window)
    phis = [fo.parse_fo(t, sig) for t in args.formula]
    B = fo.generated_subalgebra([fo.semantics_set(phi, space) for phi in phis], space)
    return space, B


def _run_layer(args) -> Report:
    space, B = _layer_setup(args)
    cap = _cap(args, layers.DEFAULT_ALGEBRA_CAP)
    if args.action == "exists":
        res = layers.exists_layer(B, space, args.index, generators=args.generators, cap=cap)
    else:
        res = layers.semiring_layer(B, space, _semiring(args.semiring), args.index, generators=args.generators, cap=cap)
    return Report(
        OK,
        {
            "source_atoms": len(B.atoms),
            "target_points": len(res.space),
            "layer_atoms": len(res.algebra.atoms),
            "generators": len(res.generators),
            "atom_sizes": sorted(len(a) for a in res.algebra.atoms),
        },
    )


DEFAULT_POOL = ("P(v1)", "P(v2)", "P(v1) & P(v2)", "v1 = v2", "exists v1. P(v1)", "forall v1. P(v1)")


def _generator_choices(pool: list, k_max: int, samples: int | None, seed: int) -> list[tuple]:
    choices = [c for k in range(1, k_max + 1) for c in itertools.combinations(pool, k)]
    if samples is not None and samples < len(choices):
        choices = random.Random(seed).sample(choices, samples)
    return choices


def _verify_layers(args) -> Report:
    sig = fo.Signature.from_json(_load(args.sig))
    structs = fo.enumerate_structures(sig, args.max_size)
    space = fo.model_space(structs, args.window)
    pool = [fo.parse_fo(t, sig) for t in (args.pool or DEFAULT_POOL)]
    pool = [phi for phi in pool if fo.free_variables(phi) <= set(space.variables)]
    sets = {phi: fo.semantics_set(phi, space) for phi in pool}
    indices = [args.index] if args.index is not None else list(space.variables)
    cap = _cap(args, layers.DEFAULT_ALGEBRA_CAP)
    semirings = None
    if args.action == "semiring":
        semirings = [_semiring(s) for s in (args.semiring or ["bool", "Z2", "Z3"])]
    rows = []
    for gens in _generator_choices(pool, args.max_generators, args.samples, args.seed):
        B = fo.generated_subalgebra([sets[phi] for phi in gens], space)
        for i in indices:
            label = " ; ".join(str(phi) for phi in gens)
            if semirings is None:
                r = layers.verify_exists_duality(B, space, i, cap=cap)
                rows.append({"generators": label, "index": i, "ok": r.ok, "image": r.details.get("image_size"), "counterexample": r.counterexample})
            else:
                base = layers.exists_layer(B, space, i, cap=cap).algebra.partition()
                for S in semirings:
                    r = layers.verify_semiring_duality(B, space, S, i, cap=cap)
                    row = {"generators": label, "index": i, "semiring": S.name, "ok": r.ok, "image": r.details.get("image_size"), "counterexample": r.counterexample}
                    if S.name == "bool":
                        same = layers.semiring_layer(B, space, S, i, cap=cap).algebra.partition() == base
                        row["matches_exists"] = same
                        if not same:
                            row["ok"] = False
                            row["counterexample"] = row["counterexample"] or "Boolean semiring layer differs from the existential layer"
                    rows.append(row)
    bad = [r for r in rows if not r["ok"]]
    cols = ["generators", "index"] + (["semiring", "matches_exists"] if semirings else []) + ["image", "ok", "counterexample"]
    payload = {"checked": len(rows), "points": len(space), "columns": cols, "rows": rows}
    if bad:
        payload["counterexample"] = bad[0]
        return Report(VIOLATED, payload)
    return Report(OK, payload)


def _verify_fbox(args) -> Report:
    rows, bad = [], None
    for P, L in _lattices_up_to(args.max_ji):
        theta = du.f_box(L, args.expansion, cap=_cap(args, du.DEFAULT_POINT_CAP))
        pts = theta.dual_points()
        filt = order.filters(L)
        iso = order.is_isomorphic(pts, filt)
        rows.append({"lattice": _lattice_name(P), "elements": len(L), "filters": len(filt), "dual_points": len(pts), "isomorphic": iso})
        if not iso and bad is None:
            bad = rows[-1]
    payload = {"columns": ["lattice", "elements", "filters", "dual_points", "isomorphic"], "rows": rows}
    if bad:
        payload["counterexample"] = bad
        return Report(VIOLATED, payload)
    return Report(OK, payload)


def _verify_farrow(args) -> Report:
    rows, bad = [], None
    lats = _lattices_up_to(args.max_ji)
    cap = _cap(args, du.DEFAULT_POINT_CAP)
    for (P, L), (Q, M) in itertools.product(lats, repeat=2):
        JL, JM = order.join_irreducibles(L), order.join_irreducibles(M)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", InconsistentPresentation)
            plain = du.f_arrow(L, M, cap=cap).dual_points()
            primes = du.f_arrow_at_primes(L, M, cap=cap).dual_points()
        smyth_maps = order.map_poset(JL, du.smyth(du.FinSpace(JM)).poset)
        plain_maps = order.map_poset(JL, JM)
        row = {
            "L": _lattice_name(P),
            "M": _lattice_name(Q),
            "points": len(plain),
            "smyth_maps": len(smyth_maps),
            "primes_points": len(primes),
            "maps": len(plain_maps),
            "isomorphic": order.is_isomorphic(plain, smyth_maps),
            "primes_isomorphic": order.is_isomorphic(primes, plain_maps),
        }
        rows.append(row)
        if not (row["isomorphic"] and row["primes_isomorphic"]) and bad is None:
            bad = row
    payload = {"columns": ["L", "M", "points", "smyth_maps", "primes_points", "maps", "isomorphic", "primes_isomorphic"], "rows": rows}
    if bad:
        payload["counterexample"] = bad
        return Report(VIOLATED, payload)
    return Report(OK, payload)


def _all_lattices(max_size: int) -> list[order.FinDistLattice]:
    """Distributive lattices with at most ``max_size`` elements, up to isomorphism."""
    out = []
    n = 0
    while True:
        found = [L for P in order.enumerate_posets(n) if len(L := order.downset_lattice(P)) <= max_size]
        if not found and n > 0:
            break
        out.extend(found)
        n += 1
    return out


def _verify_erp(args) -> Report:
    pairs = positives = 0
    bad = None
    for L in _all_lattices(args.max_size):
        els = L.elements
        inner = [e for e in els if e not in (L.bottom, L.top)]
        for r in range(len(inner) + 1):
            for extra in itertools.combinations(inner, r):
                subset = (L.bottom, L.top) + extra
                if not L.is_sublattice(subset):
                    continue
                pairs += 1
                report = du.erp_retraction(L, subset)
                K = L.sublattice(subset)
                found = du.erp_by_search(L, K)
                if report.ok != bool(found):
                    bad = bad or {"lattice_size": len(L), "sublattice": order._jsonable(list(subset)), "conditions": report.ok, "search": bool(found)}
                    continue
                if report.ok:
                    positives += 1
                    e = du.inclusion(K, L)
                    f, g = du.dual_erp(e, report.retraction)
                    if not du.is_erp(f, g):
                        bad = bad or {"lattice_size": len(L), "sublattice": order._jsonable(list(subset)), "dual_erp": False}
    payload = {"pairs": pairs, "positive": positives}
    if bad:
        payload["counterexample"] = bad
        return Report(VIOLATED, payload)
    return Report(OK, payload)


DEFAULT_RULE_FORMULAS = ("P(v1)", "exists v1. P(v1)", "forall v1. P(v1)")


def _verify_rules(args) -> Report:
    sig = fo.Signature.from_json(_load(args.sig))
    formulas = [fo.parse_fo(t, sig) for t in (args.formula or DEFAULT_RULE_FORMULAS)]
    measures = gamma.pairing_universe(sig, args.sizes, args.window, formulas)
    if args.synthetic:
        measures += gamma.synthetic_measures(measures[0].algebra, measures[0].space, args.synthetic)
    report = gamma.check_rules(measures, gamma.qgrid(args.qgrid))
    payload = report.to_json()
    payload["columns"] = ["rule", "sound", "instances", "counterexample"]
    payload["rows"] = [{"rule": k, **v} for k, v in payload["rules"].items()]
    if not report.ok:
        payload["counterexample"] = next(r for r in payload["rows"] if not r["sound"])
        return Report(VIOLATED, payload)
    return Report(OK, payload)


def _run_pairing(args) -> Report:
    A = _structure(args.input)
    sig = _signature(args.sig, A)
    phi = fo.parse_fo(args.phi, sig)
    value = gamma.stone_pairing(phi, A, args.window)
    g = gamma.stone_pairing_gamma(phi, A, args.window)
    return Report(OK, {"formula": str(phi), "value": _frac(value), "gamma": str(g)})


def _run_prob_sat(args) -> Report:
    A = _structure(args.input)
    sig = _signature(args.sig, A)
    pi = gamma.parse_prob(args.pi, sig)
    atoms = []

    def collect(f):
        if isinstance(f, gamma.ProbAtom):
            atoms.append(f.phi)
        for c in f.children():
            collect(c)

    collect(pi)
    mu = gamma.measure_of(A, atoms, args.window)
    values = {str(phi): str(mu(phi)) for phi in atoms}
    return Report(OK, {"formula": str(pi), "satisfied": gamma.prob_sat(mu, pi), "measures": values})


HANDLERS = {
    "dual ba": _run_dual,
    "dual dl": _run_dual,
    "vietoris": _run_vietoris,
    "smyth": _run_smyth,
    "ma": _run_ma,
    "tower": _run_tower,
    "fbox": _run_fbox,
    "farrow": _run_farrow,
    "erp": _run_erp,
    "fo eval": _run_fo_eval,
    "fo enum": _run_fo_enum,
    "layer exists": _run_layer,
    "layer semiring": _run_layer,
    "verify exists": _verify_layers,
    "verify semiring": _verify_layers,
    "verify fbox": _verify_fbox,
    "verify farrow": _verify_farrow,
    "verify erp": _verify_erp,
    "verify rules": _verify_rules,
    "pairing": _run_pairing,
    "prob sat": _run_prob_sat,
}


def run(command: Command) -> Report:
    """Dispatch; errors become reports with the matching status."""
    try:
        report = HANDLERS[command.name](command.args)
    except CapExceeded as exc:
        report = Report(CAP, {"error": str(exc), "what": exc.what, "cap": exc.cap, "level": exc.level})
    except (StepDualError, ParseError, ValueError, KeyError, OSError) as exc:
        report = Report(ERROR, {"error": f"{type(exc).__name__}: {exc}"})
    report.provenance = PROVENANCE.get(command.name, report.provenance)
    return report


# -- rendering -------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, list):
        return ", ".join(_cell(x) for x in v)
    if v is None:
        return "-"
    return str(v)


def render(report: Report, fmt: str = "json") -> str:
    """``json`` (schema-versioned, key-sorted), ``table`` or ``dot`` (poset payloads only)."""
    if fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, indent=2, default=str)
    if fmt == "dot":
        if "dot" not in report.payload:
            raise UnsupportedFormat("dot output is only available for poset and space payloads")
        return report.payload["dot"]
    if fmt != "table":
        raise UnsupportedFormat(f"unknown format {fmt!r}")
    lines = [f"status: {report.status}"]
    if report.provenance:
        lines.append(f"provenance: {report.provenance}")
    rows = report.payload.get("rows")
    for k in sorted(report.payload):
        if k in ("rows", "columns", "dot", "poset", "rules", "structures"):
            continue
        lines.append(f"{k}: {_cell(report.payload[k])}")
    if rows:
        cols = report.payload.get("columns") or sorted(rows[0])
        cells = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[j]) for row in cells)) for j, c in enumerate(cols)]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        lines.extend("  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        command = parse_command(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE_EXIT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    report = run(command)
    try:
        print(render(report, command.args.format))
    except UnsupportedFormat as exc:
        print(f"stepdual: {exc}", file=sys.stderr)
        return USAGE_EXIT
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
