"""Abstract syntax and binding operations for the proof-term language.

Terms extend the lambda-calculus with mu-abstraction and named terms,
plus pairs and injections; arguments (E-terms) are terms, projections,
or case brackets.  Lambda-variables and mu-variables are drawn from
disjoint namespaces.  All values are immutable; every operation here is
a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional


# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class PropVar(Formula):
    name: str


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Arrow(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Conj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Disj(Formula):
    left: Formula
    right: Formula


BOT = Bottom()


def neg(a: Formula) -> Formula:
    """~A is sugar for A -> _|_, never a separate constructor."""
    return Arrow(a, BOT)


def is_neg(a: Formula) -> bool:
    return isinstance(a, Arrow) and a.right == BOT


def formula_size(a: Formula) -> int:
    match a:
        case PropVar(_) | Bottom():
            return 1
        case Arrow(l, r) | Conj(l, r) | Disj(l, r):
            return 1 + formula_size(l) + formula_size(r)
    raise TypeError(f"not a formula: {a!r}")


# --------------------------------------------------------------------------
# Terms and E-terms
# --------------------------------------------------------------------------

class Term:
    __slots__ = ()


class ETerm:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Abs(Term):
    var: str
    ann: Optional[Formula]
    body: Term


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: ETerm


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Inj1(Term):
    body: Term
    ann: Optional[Formula] = None  # the right disjunct of the result


@dataclass(frozen=True)
class Inj2(Term):
    body: Term
    ann: Optional[Formula] = None  # the left disjunct of the result


@dataclass(frozen=True)
class Mu(Term):
    var: str
    ann: Optional[Formula]
    body: Term


@dataclass(frozen=True)
class Named(Term):
    """A named term (a t), with a a mu-variable."""

    name: str
    body: Term


@dataclass(frozen=True)
class Arg(ETerm):
    term: Term


@dataclass(frozen=True)
class Proj1(ETerm):
    pass


@dataclass(frozen=True)
class Proj2(ETerm):
    pass


@dataclass(frozen=True)
class Case(ETerm):
    """A case bracket [x.u, y.v]; x is bound in u only, y in v only.

    The optional annotation records the common result type of the two
    branches.  It makes annotation repair under reduction syntactic:
    when a mu-abstraction consumes a case bracket, the new binder type
    is exactly this formula.
    """

    left_var: str
    left: Term
    right_var: str
    right: Term
    ann: Optional[Formula] = None


PROJ1 = Proj1()
PROJ2 = Proj2()


def apply_sequence(t: Term, es: Iterable[ETerm]) -> Term:
    """(t w1 ... wn), left to right; the empty sequence is the identity."""
    for e in es:
        t = App(t, e)
    return t


# --------------------------------------------------------------------------
# Free variables and name collection
# --------------------------------------------------------------------------

def free_variables(t: Term) -> tuple[frozenset[str], frozenset[str]]:
    """Free lambda-variables and free mu-variables of t, in that order."""
    lam: set[str] = set()
    mu: set[str] = set()
    _free(t, frozenset(), frozenset(), lam, mu)
    return frozenset(lam), frozenset(mu)


def free_variables_eterm(e: ETerm) -> tuple[frozenset[str], frozenset[str]]:
    lam: set[str] = set()
    mu: set[str] = set()
    _free_e(e, frozenset(), frozenset(), lam, mu)
    return frozenset(lam), frozenset(mu)


def _free(t, lbound, mbound, lam, mu):
    match t:
        case Var(x):
            if x not in lbound:
                lam.add(x)
        case Abs(x, _, b):
            _free(b, lbound | {x}, mbound, lam, mu)
        case App(f, e):
            _free(f, lbound, mbound, lam, mu)
            _free_e(e, lbound, mbound, lam, mu)
        case Pair(f, s):
            _free(f, lbound, mbound, lam, mu)
            _free(s, lbound, mbound, lam, mu)
        case Inj1(b, _) | Inj2(b, _):
            _free(b, lbound, mbound, lam, mu)
        case Mu(a, _, b):
            _free(b, lbound, mbound | {a}, lam, mu)
        case Named(a, b):
            if a not in mbound:
                mu.add(a)
            _free(b, lbound, mbound, lam, mu)
        case _:
            raise TypeError(f"not a term: {t!r}")


def _free_e(e, lbound, mbound, lam, mu):
    match e:
        case Arg(t):
            _free(t, lbound, mbound, lam, mu)
        case Proj1() | Proj2():
            pass
        case Case(x1, u1, x2, u2):
            _free(u1, lbound | {x1}, mbound, lam, mu)
            _free(u2, lbound | {x2}, mbound, lam, mu)
        case _:
            raise TypeError(f"not an E-term: {e!r}")


def is_closed(t: Term) -> bool:
    lam, mu = free_variables(t)
    return not lam and not mu


def all_names(t: Term) -> set[str]:
    """Every identifier occurring in t, bound or free, both namespaces."""
    out: set[str] = set()
    _names(t, out)
    return out


def all_names_eterm(e: ETerm) -> set[str]:
    out: set[str] = set()
    _names_e(e, out)
    return out


def _names(t, out):
    match t:
        case Var(x):
            out.add(x)
        case Abs(x, _, b):
            out.add(x)
            _names(b, out)
        case App(f, e):
            _names(f, out)
            _names_e(e, out)
        case Pair(f, s):
            _names(f, out)
            _names(s, out)
        case Inj1(b, _) | Inj2(b, _):
            _names(b, out)
        case Mu(a, _, b):
            out.add(a)
            _names(b, out)
        case Named(a, b):
            out.add(a)
            _names(b, out)


def _names_e(e, out):
    match e:
        case Arg(t):
            _names(t, out)
        case Case(x1, u1, x2, u2):
            out.add(x1)
            out.add(x2)
            _names(u1, out)
            _names(u2, out)


class FreshSupply:
    """Deterministic fresh-name generator avoiding a given set of names.

    The start offset is the only seedable knob in the library: different
    offsets give different concrete names but identical structure.
    """

    def __init__(self, avoid: Iterable[str] = (), start: int = 0):
        self.avoid = set(avoid)
        self.counter = start

    def fresh(self, base: str) -> str:
        stem = base.rstrip("0123456789") or base
        while True:
            candidate = f"{stem}{self.counter}"
            self.counter += 1
            if candidate not in self.avoid:
                self.avoid.add(candidate)
                return candidate


# --------------------------------------------------------------------------
# Substitution
# --------------------------------------------------------------------------

def substitute(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding replacement of free occurrences of x in t by v."""
    v_lam, v_mu = free_variables(v)
    supply = FreshSupply(all_names(t) | all_names(v) | {x})

    def go(t):
        match t:
            case Var(y):
                return v if y == x else t
            case Abs(y, ann, b):
                if y == x:
                    return t
                if y in v_lam:
                    y2 = supply.fresh(y)
                    b = substitute(b, y, Var(y2))
                    y = y2
                return Abs(y, ann, go(b))
            case App(f, e):
                return App(go(f), go_e(e))
            case Pair(f, s):
                return Pair(go(f), go(s))
            case Inj1(b, ann):
                return Inj1(go(b), ann)
            case Inj2(b, ann):
                return Inj2(go(b), ann)
            case Mu(a, ann, b):
                if a in v_mu:
                    a2 = supply.fresh(a)
                    b = _rename_mu(b, a, a2)
                    a = a2
                return Mu(a, ann, go(b))
            case Named(a, b):
                return Named(a, go(b))

    def go_e(e):
        match e:
            case Arg(t):
                return Arg(go(t))
            case Proj1() | Proj2():
                return e
            case Case(x1, u1, x2, u2, ann):
                if x1 != x:
                    if x1 in v_lam:
                        y = supply.fresh(x1)
                        u1, x1 = substitute(u1, x1, Var(y)), y
                    u1 = go(u1)
                if x2 != x:
                    if x2 in v_lam:
                        y = supply.fresh(x2)
                        u2, x2 = substitute(u2, x2, Var(y)), y
                    u2 = go(u2)
                return Case(x1, u1, x2, u2, ann)

    return go(t)


def _rename_mu(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of the mu-variable old to new (new is fresh)."""
    match t:
        case Var(_):
            return t
        case Abs(x, ann, b):
            return Abs(x, ann, _rename_mu(b, old, new))
        case App(f, e):
            return App(_rename_mu(f, old, new), _rename_mu_e(e, old, new))
        case Pair(f, s):
            return Pair(_rename_mu(f, old, new), _rename_mu(s, old, new))
        case Inj1(b, ann):
            return Inj1(_rename_mu(b, old, new), ann)
        case Inj2(b, ann):
            return Inj2(_rename_mu(b, old, new), ann)
        case Mu(a, ann, b):
            if a == old:
                return t
            return Mu(a, ann, _rename_mu(b, old, new))
        case Named(a, b):
            return Named(new if a == old else a, _rename_mu(b, old, new))


def _rename_mu_e(e: ETerm, old: str, new: str) -> ETerm:
    match e:
        case Arg(t):
            return Arg(_rename_mu(t, old, new))
        case Proj1() | Proj2():
            return e
        case Case(x1, u1, x2, u2, ann):
            return Case(x1, _rename_mu(u1, old, new),
                        x2, _rename_mu(u2, old, new), ann)


def mu_substitute(t: Term, a: str, es: Iterable[ETerm]) -> Term:
    """Structural substitution t[a := *es].

    Replaces, inductively, each free subterm (a v) by (a (v es)); the
    replacement also applies inside the v of a replaced occurrence.
    Occurrences rebound by an inner mu-binder are untouched, and the
    empty sequence is the identity.
    """
    es = tuple(es)
    if not es:
        return t
    es_lam: set[str] = set()
    es_mu: set[str] = set()
    avoid = all_names(t) | {a}
    for e in es:
        l, m = free_variables_eterm(e)
        es_lam |= l
        es_mu |= m
        avoid |= all_names_eterm(e)
    supply = FreshSupply(avoid)

    def go(t):
        match t:
            case Var(_):
                return t
            case Abs(y, ann, b):
                if y in es_lam:
                    y2 = supply.fresh(y)
                    b = substitute(b, y, Var(y2))
                    y = y2
                return Abs(y, ann, go(b))
            case App(f, e):
                return App(go(f), go_e(e))
            case Pair(f, s):
                return Pair(go(f), go(s))
            case Inj1(b, ann):
                return Inj1(go(b), ann)
            case Inj2(b, ann):
                return Inj2(go(b), ann)
            case Mu(m, ann, b):
                if m == a:
                    return t
                if m in es_mu:
                    m2 = supply.fresh(m)
                    b = _rename_mu(b, m, m2)
                    m = m2
                return Mu(m, ann, go(b))
            case Named(m, b):
                b = go(b)
                if m == a:
                    return Named(a, apply_sequence(b, es))
                return Named(m, b)

    def go_e(e):
        match e:
            case Arg(t):
                return Arg(go(t))
            case Proj1() | Proj2():
                return e
            case Case(x1, u1, x2, u2, ann):
                if x1 in es_lam:
                    y = supply.fresh(x1)
                    u1, x1 = substitute(u1, x1, Var(y)), y
                if x2 in es_lam:
                    y = supply.fresh(x2)
                    u2, x2 = substitute(u2, x2, Var(y)), y
                return Case(x1, go(u1), x2, go(u2), ann)

    return go(t)


# --------------------------------------------------------------------------
# Alpha equivalence and canonical renaming
# --------------------------------------------------------------------------

def alpha_equal(t: Term, u: Term) -> bool:
    """Equality up to consistent renaming of bound variables.

    Annotations are compared structurally (None only matches None).
    """
    return _alpha(t, u, {}, {}, {}, {}, 0)


def alpha_equal_eterm(e: ETerm, f: ETerm) -> bool:
    return _alpha_e(e, f, {}, {}, {}, {}, 0)


def _alpha(t, u, l1, l2, m1, m2, lvl):
    match t, u:
        case Var(x), Var(y):
            return _same(x, y, l1, l2)
        case Abs(x, a1, b1), Abs(y, a2, b2):
            return a1 == a2 and _alpha(b1, b2, {**l1, x: lvl}, {**l2, y: lvl},
                                       m1, m2, lvl + 1)
        case App(f1, e1), App(f2, e2):
            return (_alpha(f1, f2, l1, l2, m1, m2, lvl)
                    and _alpha_e(e1, e2, l1, l2, m1, m2, lvl))
        case Pair(a1, b1), Pair(a2, b2):
            return (_alpha(a1, a2, l1, l2, m1, m2, lvl)
                    and _alpha(b1, b2, l1, l2, m1, m2, lvl))
        case Inj1(b1, a1), Inj1(b2, a2):
            return a1 == a2 and _alpha(b1, b2, l1, l2, m1, m2, lvl)
        case Inj2(b1, a1), Inj2(b2, a2):
            return a1 == a2 and _alpha(b1, b2, l1, l2, m1, m2, lvl)
        case Mu(a, a1, b1), Mu(b, a2, b2):
            return a1 == a2 and _alpha(b1, b2, l1, l2, {**m1, a: lvl},
                                       {**m2, b: lvl}, lvl + 1)
        case Named(a, b1), Named(b, b2):
            return _same(a, b, m1, m2) and _alpha(b1, b2, l1, l2, m1, m2, lvl)
        case _:
            return False


def _alpha_e(e, f, l1, l2, m1, m2, lvl):
    match e, f:
        case Arg(t1), Arg(t2):
            return _alpha(t1, t2, l1, l2, m1, m2, lvl)
        case Proj1(), Proj1():
            return True
        case Proj2(), Proj2():
            return True
        case Case(x1, u1, y1, v1, a1), Case(x2, u2, y2, v2, a2):
            return (a1 == a2
                    and _alpha(u1, u2, {**l1, x1: lvl}, {**l2, x2: lvl},
                               m1, m2, lvl + 1)
                    and _alpha(v1, v2, {**l1, y1: lvl}, {**l2, y2: lvl},
                               m1, m2, lvl + 1))
        case _:
            return False


def _same(x, y, env1, env2):
    if x in env1 or y in env2:
        return env1.get(x) == env2.get(y) and env1.get(x) is not None
    return x == y


def canonicalize(t: Term) -> Term:
    """Rename bound variables to a canonical scheme (x0, x1, ... / a0, a1, ...).

    Deterministic: alpha-equal terms canonicalize to identical terms.
    Free variables keep their names; canonical names skip any name that
    occurs free in the input.
    """
    fl, fm = free_variables(t)
    taken = set(fl) | set(fm)
    counters = {"x": 0, "a": 0}

    def fresh(kind):
        while True:
            name = f"{kind}{counters[kind]}"
            counters[kind] += 1
            if name not in taken:
                return name

    def go(t, lmap, mmap):
        match t:
            case Var(x):
                return Var(lmap.get(x, x))
            case Abs(x, ann, b):
                x2 = fresh("x")
                return Abs(x2, ann, go(b, {**lmap, x: x2}, mmap))
            case App(f, e):
                return App(go(f, lmap, mmap), go_e(e, lmap, mmap))
            case Pair(f, s):
                return Pair(go(f, lmap, mmap), go(s, lmap, mmap))
            case Inj1(b, ann):
                return Inj1(go(b, lmap, mmap), ann)
            case Inj2(b, ann):
                return Inj2(go(b, lmap, mmap), ann)
            case Mu(a, ann, b):
                a2 = fresh("a")
                return Mu(a2, ann, go(b, lmap, {**mmap, a: a2}))
            case Named(a, b):
                return Named(mmap.get(a, a), go(b, lmap, mmap))

    def go_e(e, lmap, mmap):
        match e:
            case Arg(t):
                return Arg(go(t, lmap, mmap))
            case Proj1() | Proj2():
                return e
            case Case(x1, u1, x2, u2, ann):
                y1 = fresh("x")
                u1 = go(u1, {**lmap, x1: y1}, mmap)
                y2 = fresh("x")
                u2 = go(u2, {**lmap, x2: y2}, mmap)
                return Case(y1, u1, y2, u2, ann)

    return go(t, {}, {})
