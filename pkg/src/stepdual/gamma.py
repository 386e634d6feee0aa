"""The doubled unit interval at its rational points, the Stone pairing, and a
probabilistic logic over finite structures.

A :class:`GammaValue` is a rational ``q`` tagged ``UP`` (the point that
stabilises at ``q``) or ``DOWN`` (the point approaching ``q`` strictly from
below).  Points are ordered by value, with ``DOWN`` before ``UP`` at equal
values.  Only rational points are representable; every value computed from
finite structures is rational.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce, total_ordering
from typing import Iterable, Sequence

from .errors import EmptyStructure, ParseError, FormulaNotInDomain, InvalidStructure, NotADivisor, OutOfRange, UnboundVariable
from .fo import FinStructure, ModelSpace, Signature, evaluate, free_variables, generated_subalgebra, model_space, parse_fo, semantics_set
from .layers import Measure, dual_map, integrate_pushforward
from .setalgebra import SetAlgebra
from .syntax import And, Bot, BoolParser, Formula, Implies, Not, Or, Top

UP = "up"
DOWN = "down"


def _fraction(q) -> Fraction:
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise OutOfRange(f"{q} is outside [0, 1]")
    return q


@total_ordering
@dataclass(frozen=True)
class GammaValue:
    value: Fraction
    tag: str = UP

    def __post_init__(self):
        object.__setattr__(self, "value", _fraction(self.value))
        if self.tag not in (UP, DOWN):
            raise InvalidStructure(f"tag must be {UP!r} or {DOWN!r}")
        if self.tag == DOWN and self.value == 0:
            raise InvalidStructure("0 has no point approaching it from below")

    @property
    def _key(self) -> tuple:
        return (self.value, self.tag == UP)

    def __lt__(self, other: "GammaValue") -> bool:
        return self._key < other._key

    def __add__(self, other: "GammaValue") -> "GammaValue":
        return gamma_add(self, other)

    def __str__(self) -> str:
        return f"{self.value}{'^' if self.tag == UP else 'v'}"

    @classmethod
    def parse(cls, text: str) -> "GammaValue":
        """``"1/2^"`` (stabilising) or ``"1/2v"`` (from below); a bare rational means ``^``."""
        text = text.strip()
        if text.endswith("^"):
            return cls(Fraction(text[:-1]), UP)
        if text.endswith("v"):
            return cls(Fraction(text[:-1]), DOWN)
        return cls(Fraction(text), UP)


def up(q) -> GammaValue:
    return GammaValue(Fraction(q), UP)


def down(q) -> GammaValue:
    return GammaValue(Fraction(q), DOWN)


def gamma_compare(x: GammaValue, y: GammaValue) -> int:
    """-1, 0 or 1 as ``x`` is below, equal to or above ``y``."""
    return (x._key > y._key) - (x._key < y._key)


def gamma_add(x: GammaValue, y: GammaValue) -> GammaValue:
    """Values add; the result stabilises only if both summands do."""
    total = x.value + y.value
    if total > 1:
        raise OutOfRange(f"{x} + {y} exceeds 1")
    return GammaValue(total, UP if x.tag == UP and y.tag == UP else DOWN)


def gamma_floor(m: int, n: int, a_over_m) -> Fraction:
    """Largest ``b/n`` at most ``a/m`` (``n`` must divide ``m``)."""
    if n < 1 or m < 1 or m % n:
        raise NotADivisor(f"{n} does not divide {m}")
    x = Fraction(a_over_m)
    if not 0 <= x <= 1 or (x * m).denominator != 1:
        raise OutOfRange(f"{x} is not a point of the chain with denominator {m}")
    return Fraction(math.floor(x * n), n)


def gamma_approx(x: GammaValue, n: int) -> Fraction:
    """The ``n``-th approximation: largest ``a/n`` below (``DOWN``) or at most (``UP``) the value."""
    if n < 1:
        raise InvalidStructure("n must be positive")
    qn = x.value * n
    if x.tag == UP:
        return Fraction(math.floor(qn), n)
    return Fraction(math.ceil(qn) - 1, n)


def gamma_retract(x: GammaValue) -> Fraction:
    return x.value


def gamma_section(q) -> GammaValue:
    """Rationals go to their stabilising point."""
    return GammaValue(Fraction(q), UP)


class GammaMonoid:
    """The additive structure on Gamma, in the interface :class:`Measure` expects."""

    zero = GammaValue(Fraction(0), UP)

    @staticmethod
    def add(x: GammaValue, y: GammaValue) -> GammaValue:
        return gamma_add(x, y)

    def sum(self, items: Iterable[GammaValue]) -> GammaValue:
        return reduce(gamma_add, items, self.zero)


GAMMA = GammaMonoid()


# -- the Stone pairing -----------------------------------------------------


def _check_pairing_input(phi: Formula, A: FinStructure, window: int):
    if A.size == 0:
        raise EmptyStructure("the Stone pairing needs a nonempty structure")
    outside = free_variables(phi) - set(range(1, window + 1))
    if outside:
        raise UnboundVariable(f"free variables {sorted(f'v{i}' for i in outside)} lie outside the window v1..v{window}")


def stone_pairing(phi: Formula, A: FinStructure, window: int) -> Fraction:
    """Fraction of assignments of ``v1..v_window`` in ``A`` satisfying ``phi``."""
    _check_pairing_input(phi, A, window)
    hits = sum(evaluate(A, alpha, phi) for alpha in itertools.product(A.universe, repeat=window))
    return Fraction(hits, A.size**window)


def delta(A: FinStructure, space: ModelSpace) -> dict:
    """``(1/|A|^n)^`` on each point over ``A``, ``0^`` elsewhere."""
    if A.size == 0:
        raise EmptyStructure("the Stone pairing needs a nonempty structure")
    w = up(Fraction(1, A.size ** len(space.variables)))
    return {p: (w if p.structure == A else GAMMA.zero) for p in space.points}


@dataclass(frozen=True, eq=False)
class FormulaMeasure:
    """A Gamma-valued measure on a Boolean algebra of sets of model points.

    ``measure`` lives on the dual space of ``algebra`` (its atom indices);
    formulas are looked up through their sets of satisfying points.
    """

    algebra: SetAlgebra
    space: ModelSpace
    measure: Measure
    structure: FinStructure | None = None

    def of_set(self, subset) -> GammaValue:
        subset = frozenset(subset)
        if subset not in self.algebra:
            raise FormulaNotInDomain("set is not an element of the measure's algebra")
        return self.measure(self.algebra.hat(subset))

    def __call__(self, phi: Formula) -> GammaValue:
        try:
            s = semantics_set(phi, self.space)
        except UnboundVariable as exc:
            raise FormulaNotInDomain(str(exc)) from None
        if s not in self.algebra:
            raise FormulaNotInDomain(f"{phi} is not in the measure's algebra")
        return self.measure(self.algebra.hat(s))

    def retract(self) -> dict:
        """The real-valued measure obtained by forgetting tags, on atom-index sets."""
        return {a: gamma_retract(v) for a, v in self.measure.values.items()}


def measure_of(A: FinStructure, formulas: Sequence[Formula], window: int, structures: Sequence[FinStructure] | None = None) -> FormulaMeasure:
    """The Gamma-valued pairing of ``A`` on the algebra generated by ``formulas``.

    Built as the pushforward of the integral of ``delta(A)`` along the dual
    map of the algebra; ``structures`` fixes the ambient model space
    (default: just ``A``).
    """
    space = model_space(list(structures) if structures is not None else [A], window)
    algebra = generated_subalgebra([semantics_set(phi, space) for phi in formulas], space)
    return measure_on(A, algebra, space)


def measure_on(A: FinStructure, algebra: SetAlgebra, space: ModelSpace) -> FormulaMeasure:
    atoms_algebra = SetAlgebra.powerset(range(len(algebra.atoms)))
    mu = integrate_pushforward(delta(A, space), dual_map(algebra), atoms_algebra, GAMMA)
    return FormulaMeasure(algebra, space, mu, A)


def stone_pairing_gamma(phi: Formula, A: FinStructure, window: int) -> GammaValue:
    """The Gamma-valued pairing, computed through :func:`measure_of`."""
    _check_pairing_input(phi, A, window)
    return measure_of(A, [phi], window)(phi)


# -- probabilistic formulas ------------------------------------------------


@dataclass(frozen=True)
class ProbAtom(Formula):
    """``P>=q {phi}`` (``op == ">="``) or ``P<q {phi}`` (``op == "<"``)."""

    op: str
    q: Fraction
    phi: Formula

    def __str__(self) -> str:
        return f"P{self.op}{self.q} {{ {self.phi} }}"


def prob_ge(q, phi: Formula) -> ProbAtom:
    return ProbAtom(">=", _fraction(q), phi)


def prob_lt(q, phi: Formula) -> ProbAtom:
    return ProbAtom("<", _fraction(q), phi)


class ProbParser(BoolParser):
    rules = [
        ("pge", r"P>="),
        ("plt", r"P<"),
        ("num", r"[0-9]+(?:/[0-9]+)?"),
        ("fo", r"\{[^{}]*\}"),
        ("name", r"[a-z]+"),
        ("arrow", r"->"),
        ("op", r"[~&|()]"),
    ]

    def __init__(self, text: str, signature: Signature):
        super().__init__(text)
        self.sig = signature

    def atom(self):
        tok = self.accept("pge") or self.accept("plt")
        if tok is None:
            self.fail(("'P>='", "'P<'", "'~'", "'('"))
        num = self.expect("num")
        q = Fraction(num.text)
        if not 0 <= q <= 1:
            raise OutOfRange(f"threshold {q} at position {num.pos} is outside [0, 1]")
        body = self.expect("fo")
        try:
            phi = parse_fo(body.text[1:-1], self.sig)
        except ParseError as exc:
            raise ParseError(f"in formula body: {exc.reason}", self.text, body.pos + 1 + exc.position, exc.expected) from None
        return ProbAtom(">=" if tok.kind == "pge" else "<", q, phi)


def parse_prob(text: str, signature: Signature) -> Formula:
    """Parse e.g. ``P>=1/2 { P(v1) } & ~P<1/4 { exists v1. P(v1) }``."""
    return ProbParser(text, signature).parse()


def prob_sat(mu: FormulaMeasure, pi: Formula) -> bool:
    """``mu |= pi``: ``P>=q phi`` iff ``mu(phi) >= q^``, ``P<q phi`` iff ``mu(phi) < q^``."""
    if isinstance(pi, ProbAtom):
        c = gamma_compare(mu(pi.phi), up(pi.q))
        return c >= 0 if pi.op == ">=" else c < 0
    if isinstance(pi, Top):
        return True
    if isinstance(pi, Bot):
        return False
    if isinstance(pi, Not):
        return not prob_sat(mu, pi.body)
    if isinstance(pi, And):
        return prob_sat(mu, pi.left) and prob_sat(mu, pi.right)
    if isinstance(pi, Or):
        return prob_sat(mu, pi.left) or prob_sat(mu, pi.right)
    if isinstance(pi, Implies):
        return (not prob_sat(mu, pi.left)) or prob_sat(mu, pi.right)
    raise InvalidStructure(f"not a probabilistic formula: {pi!r}")


# -- rule soundness --------------------------------------------------------


def qgrid(max_denominator: int) -> list[Fraction]:
    """All rationals in ``[0, 1]`` with denominator at most ``max_denominator``."""
    return sorted({Fraction(a, b) for b in range(1, max_denominator + 1) for a in range(b + 1)})


RULES = (
    "monotonicity",
    "entailment",
    "ge0_bot",
    "lt_bot",
    "ge_top",
    "not_lt_to_ge",
    "ge_to_not_lt",
    "additivity_split",
    "additivity_merge",
)


@dataclass
class RuleResult:
    sound: bool = True
    instances: int = 0
    counterexample: str | None = None


@dataclass
class RulesReport:
    rules: dict
    measures: int
    elements: int

    @property
    def ok(self) -> bool:
        return all(r.sound for r in self.rules.values())

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "measures": self.measures,
            "elements": self.elements,
            "rules": {k: {"sound": r.sound, "instances": r.instances, "counterexample": r.counterexample} for k, r in self.rules.items()},
        }


def check_rules(measures: Sequence[FormulaMeasure], grid: Sequence[Fraction], elements: Sequence[frozenset] | None = None) -> RulesReport:
    """Check each inference rule on every instance over the given measures.

    Formulas range over ``elements`` (default: every element of the shared
    algebra); ``phi |- psi`` means inclusion of satisfying sets.  Instances
    whose thresholds fall outside ``[0, 1]`` are not formulas and are skipped.
    """
    if not measures:
        return RulesReport({name: RuleResult() for name in RULES}, 0, 0)
    algebra = measures[0].algebra
    if any(m.algebra != algebra for m in measures):
        raise InvalidStructure("all measures must share one algebra")
    els = list(elements) if elements is not None else list(algebra.elements())
    hats = [algebra.hat(e) for e in els]
    grid = sorted(set(Fraction(q) for q in grid))
    bounds = {q: (q, True) for q in grid}
    results = {name: RuleResult() for name in RULES}
    top_hat = frozenset(range(len(algebra.atoms)))
    bot_hat = frozenset()

    def record(rule: str, ok: bool, describe):
        r = results[rule]
        r.instances += 1
        if not ok and r.sound:
            r.sound = False
            r.counterexample = describe()

    for k, m in enumerate(measures):
        vals = [m.measure(h)._key for h in hats]
        ge = [{q: v >= bounds[q] for q in grid} for v in vals]
        label = lambda: str(m.structure) if m.structure is not None else f"measure #{k}"
        top_v, bot_v = m.measure(top_hat)._key, m.measure(bot_hat)._key
        for q in grid:
            record("ge_top", top_v >= bounds[q], lambda: f"{label()}: P>={q} top fails")
            if q > 0:
                record("lt_bot", bot_v < bounds[q], lambda: f"{label()}: P<{q} bot fails")
        record("ge0_bot", bot_v >= (Fraction(0), True), lambda: f"{label()}: P>=0 bot fails")
        for a, va in enumerate(vals):
            for q in grid:
                ge_q = ge[a][q]
                lt_q = vals[a] < bounds[q]
                record("not_lt_to_ge", (lt_q or ge_q), lambda: f"{label()}: ~P<{q} holds but P>={q} fails at element {a}")
                record("ge_to_not_lt", (not ge_q or not lt_q), lambda: f"{label()}: P>={q} holds but ~P<{q} fails at element {a}")
                if not ge_q:
                    continue
                for p in grid:
                    if p <= q:
                        record("monotonicity", ge[a][p], lambda: f"{label()}: P>={q} but not P>={p} at element {a}")
                for b, hb in enumerate(hats):
                    if hats[a] <= hb:
                        record("entailment", ge[b][q], lambda: f"{label()}: P>={q} phi but not P>={q} psi with phi |- psi")
        join_idx = {h: i for i, h in enumerate(hats)}
        for a, b in itertools.product(range(len(hats)), repeat=2):
            jo, me = join_idx.get(hats[a] | hats[b]), join_idx.get(hats[a] & hats[b])
            if jo is None or me is None:
                continue
            for p, q, r in itertools.product(grid, repeat=3):
                s = p + q - r
                if not 0 <= s <= 1:
                    continue
                sb = (s, True)
                ge_s_join = vals[jo] >= sb
                ge_r_meet = ge[me][r]
                if ge[a][p] and ge[b][q]:
                    record(
                        "additivity_split",
                        ge_s_join or ge_r_meet,
                        lambda: f"{label()}: P>={p} phi & P>={q} psi but neither P>={s}(phi|psi) nor P>={r}(phi&psi)",
                    )
                if ge_s_join and ge_r_meet:
                    record(
                        "additivity_merge",
                        ge[a][p] or ge[b][q],
                        lambda: f"{label()}: P>={s}(phi|psi) & P>={r}(phi&psi) but neither P>={p} phi nor P>={q} psi",
                    )
    return RulesReport(results, len(measures), len(els))


def pairing_universe(sig: Signature, max_size: int, window: int, formulas: Sequence[Formula]) -> list[FormulaMeasure]:
    """One Gamma-valued measure per structure of size ``<= max_size`` (up to isomorphism),
    all on the algebra generated by ``formulas`` over the shared model space."""
    from .fo import enumerate_structures

    structures = enumerate_structures(sig, max_size)
    space = model_space(structures, window)
    algebra = generated_subalgebra([semantics_set(phi, space) for phi in formulas], space)
    return [measure_on(A, algebra, space) for A in structures]


def synthetic_measures(algebra: SetAlgebra, space: ModelSpace, denominator: int) -> list[FormulaMeasure]:
    """Every probability measure whose atom values are multiples of ``1/denominator``."""
    k = len(algebra.atoms)
    atoms_algebra = SetAlgebra.powerset(range(k))
    out = []
    for combo in itertools.combinations_with_replacement(range(k), denominator):
        counts = [combo.count(i) for i in range(k)]
        mu = Measure.from_atoms(atoms_algebra, [up(Fraction(c, denominator)) for c in counts], GAMMA)
        out.append(FormulaMeasure(algebra, space, mu, None))
    return out
