"""Typing judgments, the checker for the eleven rules, and derivations.

A judgment has the shape ``gamma |- t : A ; delta`` where gamma binds
lambda-variables and delta binds mu-variables (names).  Checking is
syntax-directed: every Abs, Mu, Inj1 and Inj2 node must carry its
annotation (Abs: argument type, Mu: result type, Inj: the other
disjunct).  Case branches need no annotation; the branch binder types
come from the scrutinee's disjunction and the result type comes from
the first branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .syntax import print_formula, print_term
from .terms import (
    Abs, App, Arg, Arrow, BOT, Case, Conj, Disj, Formula, Inj1, Inj2, Mu,
    Named, Pair, Proj1, Proj2, Term, Var,
)

Context = Mapping[str, Formula]

RULES = ("ax", "arrow-i", "arrow-e", "and-i", "and-e1", "and-e2",
         "or-i1", "or-i2", "or-e", "abs-i", "abs-e")


class TypeCheckError(Exception):
    """A term does not check; carries the offending subterm and rule."""

    def __init__(self, message: str, term: Optional[Term] = None,
                 rule: Optional[str] = None,
                 expected: Optional[Formula] = None,
                 found: Optional[Formula] = None):
        self.term = term
        self.rule = rule
        self.expected = expected
        self.found = found
        parts = [message]
        if term is not None:
            parts.append(f"in {print_term(term)}")
        if rule is not None:
            parts.append(f"(rule {rule})")
        if expected is not None and found is not None:
            parts.append(f"expected {print_formula(expected)}, "
                         f"found {print_formula(found)}")
        super().__init__(": ".join(parts))


class UnboundVariableError(TypeCheckError):
    pass


class MissingAnnotationError(TypeCheckError):
    pass


class Mismatch(TypeCheckError):
    pass


@dataclass(frozen=True)
class Judgment:
    gamma: tuple[tuple[str, Formula], ...]
    term: Term
    formula: Formula
    delta: tuple[tuple[str, Formula], ...]

    def __str__(self):
        g = ", ".join(f"{x}:{print_formula(a)}" for x, a in self.gamma)
        d = ", ".join(f"{a}:{print_formula(b)}" for a, b in self.delta)
        return f"{g} |- {print_term(self.term)} : {print_formula(self.formula)} ; {d}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgment
    premises: tuple["Derivation", ...] = ()


def _freeze(ctx: Context) -> tuple[tuple[str, Formula], ...]:
    return tuple(sorted(ctx.items()))


def infer(gamma: Context, delta: Context, t: Term) -> Derivation:
    """Infer the unique type of t and return the full derivation tree."""
    gamma = dict(gamma)
    delta = dict(delta)
    return _infer(gamma, delta, t)


def check(gamma: Context, delta: Context, t: Term, a: Formula) -> Derivation:
    """Like infer, but the result must be structurally equal to a."""
    d = infer(gamma, delta, t)
    if d.conclusion.formula != a:
        raise Mismatch("type mismatch", term=t,
                       expected=a, found=d.conclusion.formula)
    return d


def _node(rule, gamma, delta, t, a, premises=()):
    return Derivation(rule, Judgment(_freeze(gamma), t, a, _freeze(delta)),
                      tuple(premises))


def _infer(gamma, delta, t) -> Derivation:
    match t:
        case Var(x):
            if x not in gamma:
                raise UnboundVariableError(f"unbound variable {x!r}", term=t)
            return _node("ax", gamma, delta, t, gamma[x])

        case Abs(x, ann, body):
            if ann is None:
                raise MissingAnnotationError(
                    "lambda binder needs a type annotation", term=t, rule="arrow-i")
            d = _infer({**gamma, x: ann}, delta, body)
            return _node("arrow-i", gamma, delta, t,
                         Arrow(ann, d.conclusion.formula), [d])

        case Pair(fst, snd):
            d1 = _infer(gamma, delta, fst)
            d2 = _infer(gamma, delta, snd)
            return _node("and-i", gamma, delta, t,
                         Conj(d1.conclusion.formula, d2.conclusion.formula),
                         [d1, d2])

        case Inj1(body, ann):
            if ann is None:
                raise MissingAnnotationError(
                    "in1 needs the other disjunct as annotation", term=t, rule="or-i1")
            d = _infer(gamma, delta, body)
            return _node("or-i1", gamma, delta, t,
                         Disj(d.conclusion.formula, ann), [d])

        case Inj2(body, ann):
            if ann is None:
                raise MissingAnnotationError(
                    "in2 needs the other disjunct as annotation", term=t, rule="or-i2")
            d = _infer(gamma, delta, body)
            return _node("or-i2", gamma, delta, t,
                         Disj(ann, d.conclusion.formula), [d])

        case Mu(a, ann, body):
            if ann is None:
                raise MissingAnnotationError(
                    "mu binder needs a type annotation", term=t, rule="abs-e")
            d = _infer(gamma, {**delta, a: ann}, body)
            if d.conclusion.formula != BOT:
                raise Mismatch("mu body must prove _|_", term=t, rule="abs-e",
                               expected=BOT, found=d.conclusion.formula)
            return _node("abs-e", gamma, delta, t, ann, [d])

        case Named(a, body):
            if a not in delta:
                raise UnboundVariableError(f"unbound name {a!r}", term=t)
            d = _infer(gamma, delta, body)
            if d.conclusion.formula != delta[a]:
                raise Mismatch(f"named term disagrees with {a!r}", term=t,
                               rule="abs-i", expected=delta[a],
                               found=d.conclusion.formula)
            return _node("abs-i", gamma, delta, t, BOT, [d])

        case App(fun, Arg(arg)):
            d1 = _infer(gamma, delta, fun)
            fty = d1.conclusion.formula
            if not isinstance(fty, Arrow):
                raise Mismatch("applied term is not a function", term=t,
                               rule="arrow-e", expected=Arrow(BOT, BOT), found=fty)
            d2 = _infer(gamma, delta, arg)
            if d2.conclusion.formula != fty.left:
                raise Mismatch("argument type mismatch", term=t, rule="arrow-e",
                               expected=fty.left, found=d2.conclusion.formula)
            return _node("arrow-e", gamma, delta, t, fty.right, [d1, d2])

        case App(fun, Proj1()):
            d1 = _infer(gamma, delta, fun)
            fty = d1.conclusion.formula
            if not isinstance(fty, Conj):
                raise Mismatch("p1 needs a conjunction", term=t, rule="and-e1",
                               expected=Conj(BOT, BOT), found=fty)
            return _node("and-e1", gamma, delta, t, fty.left, [d1])

        case App(fun, Proj2()):
            d1 = _infer(gamma, delta, fun)
            fty = d1.conclusion.formula
            if not isinstance(fty, Conj):
                raise Mismatch("p2 needs a conjunction", term=t, rule="and-e2",
                               expected=Conj(BOT, BOT), found=fty)
            return _node("and-e2", gamma, delta, t, fty.right, [d1])

        case App(fun, Case(x1, u1, x2, u2, ann)):
            d1 = _infer(gamma, delta, fun)
            fty = d1.conclusion.formula
            if not isinstance(fty, Disj):
                raise Mismatch("case scrutinee is not a disjunction", term=t,
                               rule="or-e", expected=Disj(BOT, BOT), found=fty)
            d2 = _infer({**gamma, x1: fty.left}, delta, u1)
            result = d2.conclusion.formula
            if ann is not None and ann != result:
                raise Mismatch("case annotation disagrees with first branch",
                               term=t, rule="or-e", expected=ann, found=result)
            d3 = _infer({**gamma, x2: fty.right}, delta, u2)
            if d3.conclusion.formula != result:
                raise Mismatch("case branches disagree", term=t, rule="or-e",
                               expected=result, found=d3.conclusion.formula)
            return _node("or-e", gamma, delta, t, result, [d1, d2, d3])

    raise TypeCheckError(f"not a term: {t!r}")


def erase(t: Term) -> Term:
    """Strip all binder annotations; idempotent."""
    match t:
        case Var(_):
            return t
        case Abs(x, _, b):
            return Abs(x, None, erase(b))
        case App(f, e):
            return App(erase(f), _erase_e(e))
        case Pair(f, s):
            return Pair(erase(f), erase(s))
        case Inj1(b, _):
            return Inj1(erase(b), None)
        case Inj2(b, _):
            return Inj2(erase(b), None)
        case Mu(a, _, b):
            return Mu(a, None, erase(b))
        case Named(a, b):
            return Named(a, erase(b))
    raise TypeCheckError(f"not a term: {t!r}")


def _erase_e(e):
    match e:
        case Arg(t):
            return Arg(erase(t))
        case Proj1() | Proj2():
            return e
        case Case(x1, u1, x2, u2, _):
            return Case(x1, erase(u1), x2, erase(u2), None)


# --------------------------------------------------------------------------
# Derivation validation and export
# --------------------------------------------------------------------------

def validate_derivation(d: Derivation) -> None:
    """Re-check every node locally against its rule schema.

    Independent of the checker: only looks at the recorded judgments.
    Raises ValueError on the first malformed node.
    """
    g = dict(d.conclusion.gamma)
    dl = dict(d.conclusion.delta)
    t = d.conclusion.term
    a = d.conclusion.formula
    ps = d.premises

    def pj(i):
        return ps[i].conclusion

    def fail(why):
        raise TypeCheckError(f"invalid {d.rule} node ({why}): {d.conclusion}")

    match d.rule:
        case "ax":
            if ps or not isinstance(t, Var) or g.get(t.name) != a:
                fail("axiom shape")
        case "arrow-i":
            if (len(ps) != 1 or not isinstance(t, Abs)
                    or a != Arrow(t.ann, pj(0).formula)
                    or pj(0).term != t.body
                    or dict(pj(0).gamma) != {**g, t.var: t.ann}
                    or pj(0).delta != d.conclusion.delta):
                fail("arrow-i shape")
        case "arrow-e":
            if (len(ps) != 2 or not isinstance(t, App)
                    or not isinstance(t.arg, Arg)
                    or pj(0).formula != Arrow(pj(1).formula, a)
                    or pj(0).term != t.fun or pj(1).term != t.arg.term
                    or any(p.gamma != d.conclusion.gamma
                           or p.delta != d.conclusion.delta for p in pj_all(ps))):
                fail("arrow-e shape")
        case "and-i":
            if (len(ps) != 2 or not isinstance(t, Pair)
                    or a != Conj(pj(0).formula, pj(1).formula)
                    or pj(0).term != t.fst or pj(1).term != t.snd
                    or any(p.gamma != d.conclusion.gamma
                           or p.delta != d.conclusion.delta for p in pj_all(ps))):
                fail("and-i shape")
        case "and-e1" | "and-e2":
            ok = (len(ps) == 1 and isinstance(t, App)
                  and isinstance(t.arg, Proj1 if d.rule == "and-e1" else Proj2)
                  and isinstance(pj(0).formula, Conj)
                  and pj(0).term == t.fun
                  and pj(0).gamma == d.conclusion.gamma
                  and pj(0).delta == d.conclusion.delta)
            if ok:
                conj = pj(0).formula
                ok = a == (conj.left if d.rule == "and-e1" else conj.right)
            if not ok:
                fail("projection shape")
        case "or-i1":
            if (len(ps) != 1 or not isinstance(t, Inj1)
                    or a != Disj(pj(0).formula, t.ann)
                    or pj(0).term != t.body
                    or pj(0).gamma != d.conclusion.gamma
                    or pj(0).delta != d.conclusion.delta):
                fail("or-i1 shape")
        case "or-i2":
            if (len(ps) != 1 or not isinstance(t, Inj2)
                    or a != Disj(t.ann, pj(0).formula)
                    or pj(0).term != t.body
                    or pj(0).gamma != d.conclusion.gamma
                    or pj(0).delta != d.conclusion.delta):
                fail("or-i2 shape")
        case "or-e":
            ok = (len(ps) == 3 and isinstance(t, App)
                  and isinstance(t.arg, Case)
                  and isinstance(pj(0).formula, Disj)
                  and pj(0).term == t.fun
                  and pj(1).term == t.arg.left
                  and pj(2).term == t.arg.right
                  and pj(1).formula == a and pj(2).formula == a)
            if ok:
                disj = pj(0).formula
                ok = (dict(pj(1).gamma) == {**g, t.arg.left_var: disj.left}
                      and dict(pj(2).gamma) == {**g, t.arg.right_var: disj.right}
                      and pj(0).gamma == d.conclusion.gamma
                      and all(p.delta == d.conclusion.delta for p in pj_all(ps)))
            if not ok:
                fail("or-e shape")
        case "abs-i":
            if (len(ps) != 1 or not isinstance(t, Named)
                    or a != BOT
                    or pj(0).term != t.body
                    or dl.get(t.name) != pj(0).formula
                    or pj(0).gamma != d.conclusion.gamma
                    or pj(0).delta != d.conclusion.delta):
                fail("abs-i shape")
        case "abs-e":
            if (len(ps) != 1 or not isinstance(t, Mu)
                    or a != t.ann
                    or pj(0).formula != BOT
                    or pj(0).term != t.body
                    or dict(pj(0).delta) != {**dl, t.var: t.ann}
                    or pj(0).gamma != d.conclusion.gamma):
                fail("abs-e shape")
        case _:
            fail("unknown rule")

    for p in d.premises:
        validate_derivation(p)


def pj_all(premises):
    return [p.conclusion for p in premises]


def derivation_to_json(d: Derivation) -> dict:
    """Derivation as a JSON-serializable tree in the concrete syntax."""
    j = d.conclusion
    return {
        "rule": d.rule,
        "judgment": {
            "gamma": {x: print_formula(a) for x, a in j.gamma},
            "term": print_term(j.term),
            "formula": print_formula(j.formula),
            "delta": {a: print_formula(b) for a, b in j.delta},
        },
        "premises": [derivation_to_json(p) for p in d.premises],
    }
