"""Mu-spine matching and the three operational behavior probes.

A mu-spine over a leaf t is any term built from t by repeatedly
prefixing ``mu a.`` or ``(a .)``.  The probes feed a closed subject of
one of the three classical types fresh, inert arguments and search its
reduction graph (breadth-first, cap-bounded) for a spine whose leaf has
the shape the corresponding behavior law predicts:

* ex falso, type ``_|_ -> P``: ((T t*) u*...) reduces to a spine over t*;
* Peirce, type ``(~P -> P) -> P``: ((T u*) t*...) yields a chain of
  continuations theta_1, ..., theta_m, each extracted from a leaf
  ((u* theta) t*...), ending when some theta applied to a fresh v*
  reaches a spine over (v*_i0 t*...);
* excluded middle, type ``~P \\/ P`` (either disjunct order): the
  subject is scrutinized with probe branches (c*_i x_i) so each staged
  continuation is extractable from a leaf (c*_i theta); a theta from
  the P branch is fed a fresh E-sequence, one from the ~P branch a
  fresh term, until a spine over (v*_p t*_q...) appears.

The probe terms are open and usually untypable as a whole, so every
search is cap-bounded and a cap hit yields an inconclusive verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .reduction import (
    DEFAULT_NODE_CAP, ReductionStep, Trace, redexes, step_at,
)
from .syntax import canonical_form, parse_term, print_term
from .terms import (
    Abs, App, Arg, Arrow, BOT, Bottom, Case, Disj, ETerm, Formula,
    FreshSupply, Mu, Named, PropVar, Term, Var, all_names, alpha_equal,
    alpha_equal_eterm, apply_sequence, is_closed,
)
from .typecheck import Derivation, TypeCheckError, check, infer


# --------------------------------------------------------------------------
# Mu-spines
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Wrapper:
    kind: str  # "mu" | "name"
    name: str
    ann: Optional[Formula] = None


@dataclass(frozen=True)
class SpineWitness:
    wrappers: tuple[Wrapper, ...]
    leaf: Term

    def rebuild(self) -> Term:
        t = self.leaf
        for w in reversed(self.wrappers):
            t = Mu(w.name, w.ann, t) if w.kind == "mu" else Named(w.name, t)
        return t


def is_mu_spine(s: Term, leaf: Term) -> Optional[SpineWitness]:
    """Witness that s is the leaf under mu-/name-wrappers, else None.

    The leaf is compared by alpha-equality; the shortest wrapper list
    wins when the leaf itself starts with a wrapper shape.
    """
    wrappers: list[Wrapper] = []
    current = s
    while True:
        if alpha_equal(current, leaf):
            return SpineWitness(tuple(wrappers), current)
        match current:
            case Mu(a, ann, body):
                wrappers.append(Wrapper("mu", a, ann))
                current = body
            case Named(a, body):
                wrappers.append(Wrapper("name", a))
                current = body
            case _:
                return None


# --------------------------------------------------------------------------
# Leaf patterns
# --------------------------------------------------------------------------

class LeafPattern:
    """A syntactic matcher (up to alpha) over spine leaves, with slots."""

    def match(self, t: Term) -> Optional[dict]:
        raise NotImplementedError


@dataclass(frozen=True)
class ExactLeaf(LeafPattern):
    term: Term

    def match(self, t):
        return {} if alpha_equal(t, self.term) else None


@dataclass(frozen=True)
class ProbeApplied(LeafPattern):
    """Matches (probe slot) for a fixed free head variable."""

    probe: str

    def match(self, t):
        match t:
            case App(Var(h), Arg(s)) if h == self.probe:
                return {"slot": s}
        return None


def _peel_tail(t: Term, tail: tuple[ETerm, ...]) -> Optional[Term]:
    """Strip (. w1 ... wn) applications matching tail, outside in."""
    for e in reversed(tail):
        match t:
            case App(f, arg) if alpha_equal_eterm(arg, e):
                t = f
            case _:
                return None
    return t


@dataclass(frozen=True)
class HeadApplied(LeafPattern):
    """Matches ((head slot) tail) for a fixed head variable and tail."""

    head: str
    tail: tuple[ETerm, ...]

    def match(self, t):
        core = _peel_tail(t, self.tail)
        if core is None:
            return None
        match core:
            case App(Var(h), Arg(s)) if h == self.head:
                return {"slot": s}
        return None


@dataclass(frozen=True)
class AppliedTo(LeafPattern):
    """Matches (slot tail); optionally the slot must be one of some vars."""

    tail: tuple[ETerm, ...]
    allowed: Optional[frozenset[str]] = None

    def match(self, t):
        core = _peel_tail(t, self.tail)
        if core is None:
            return None
        if self.allowed is not None:
            match core:
                case Var(v) if v in self.allowed:
                    return {"slot": core}
            return None
        return {"slot": core}


# --------------------------------------------------------------------------
# Spine search over the reduction graph
# --------------------------------------------------------------------------

@dataclass
class SpineSearch:
    status: str  # "found" | "not-found" | "cap-exceeded"
    witness: Optional[SpineWitness] = None
    bindings: Optional[dict] = None
    trace: Optional[Trace] = None
    label: Optional[str] = None   # which pattern matched
    explored: int = 0


def _match_spine(t: Term, patterns: list[tuple[str, LeafPattern]]):
    """First (label, witness, bindings) whose pattern matches a spine leaf."""
    wrappers: list[Wrapper] = []
    current = t
    while True:
        for label, pattern in patterns:
            bound = pattern.match(current)
            if bound is not None:
                return label, SpineWitness(tuple(wrappers), current), bound
        match current:
            case Mu(a, ann, body):
                wrappers.append(Wrapper("mu", a, ann))
                current = body
            case Named(a, body):
                wrappers.append(Wrapper("name", a))
                current = body
            case _:
                return None


def search_spine_reduct(t: Term, patterns: list[tuple[str, LeafPattern]],
                        node_cap: int = DEFAULT_NODE_CAP) -> SpineSearch:
    """Breadth-first search of the reducts of t for a matching spine."""
    if node_cap < 1:
        raise ValueError("node_cap must be >= 1")
    root = canonical_form(t)
    parents: dict[str, tuple[str, ReductionStep] | None] = {root: None}
    terms: dict[str, Term] = {root: t}
    queue = [root]
    qi = 0
    capped = False

    def trace_to(key: str) -> Trace:
        steps = []
        while parents[key] is not None:
            parent, step = parents[key]
            steps.append(step)
            key = parent
        steps.reverse()
        return Trace(t, steps)

    while qi < len(queue):
        key = queue[qi]
        qi += 1
        current = terms[key]
        hit = _match_spine(current, patterns)
        if hit is not None:
            label, witness, bound = hit
            return SpineSearch("found", witness, bound, trace_to(key),
                               label, explored=len(terms))
        for p, _ in redexes(current):
            step = step_at(current, p)
            dst = canonical_form(step.after)
            if dst not in terms:
                if len(terms) >= node_cap:
                    capped = True
                    continue
                terms[dst] = step.after
                parents[dst] = (key, step)
                queue.append(dst)
    status = "cap-exceeded" if capped else "not-found"
    return SpineSearch(status, explored=len(terms))


def find_spine_reduct(t: Term, pattern: LeafPattern,
                      node_cap: int = DEFAULT_NODE_CAP) -> SpineSearch:
    return search_spine_reduct(t, [("leaf", pattern)], node_cap)


# --------------------------------------------------------------------------
# Behavior reports and probes
# --------------------------------------------------------------------------

@dataclass
class BehaviorReport:
    law: str                     # "exfalso" | "peirce" | "tertium"
    subject: Term
    verdict: str                 # "confirmed" | "refuted" | "inconclusive"
    m: int = 0
    thetas: list[Term] = field(default_factory=list)
    traces: list[Trace] = field(default_factory=list)
    detail: str = ""
    stages: list[dict] = field(default_factory=list)
    fresh_names: dict = field(default_factory=dict)

    @property
    def confirmed(self) -> bool:
        return self.verdict == "confirmed"

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "subject": print_term(self.subject),
            "verdict": self.verdict,
            "m": self.m,
            "thetas": [print_term(t) for t in self.thetas],
            "traces": [t.to_json_lines() for t in self.traces],
            "detail": self.detail,
        }


def _supply_for(subject: Term, seed: int) -> FreshSupply:
    return FreshSupply(all_names(subject), start=seed)


def probe_exfalso(subject: Term, n_args: int = 1,
                  node_cap: int = DEFAULT_NODE_CAP,
                  seed: int = 0,
                  extra_args: tuple[ETerm, ...] | None = None) -> BehaviorReport:
    """Check that ((subject t*) u*...) reduces to a mu-spine over t*.

    The subject must be closed and of type _|_ -> A.  By default the
    extra arguments are fresh term variables; arbitrary E-terms can be
    supplied instead of the fresh ones via extra_args.
    """
    _require_closed(subject)
    d = infer({}, {}, subject)
    ty = d.conclusion.formula
    if not (isinstance(ty, Arrow) and ty.left == BOT):
        raise TypeCheckError("subject must have type _|_ -> A",
                             term=subject, found=ty)
    supply = _supply_for(subject, seed)
    t_star = supply.fresh("t")
    if extra_args is None:
        args = tuple(Arg(Var(supply.fresh("u"))) for _ in range(n_args))
    else:
        args = tuple(extra_args)
    probe = apply_sequence(App(subject, Arg(Var(t_star))), args)
    result = find_spine_reduct(probe, ExactLeaf(Var(t_star)), node_cap)
    report = BehaviorReport("exfalso", subject, "inconclusive",
                            fresh_names={"t": t_star})
    if result.status == "found":
        report.verdict = "confirmed"
        report.traces.append(result.trace)
        report.stages.append({"witness": result.witness})
    elif result.status == "not-found":
        report.verdict = "refuted"
        report.detail = "complete reduction graph contains no spine over t*"
    else:
        report.detail = f"node cap {node_cap} exhausted"
    return report


def probe_peirce(subject: Term, n_args: int = 1,
                 node_cap: int = DEFAULT_NODE_CAP, max_m: int = 8,
                 seed: int = 0) -> BehaviorReport:
    """Stage through the continuation chain of a Peirce-typed subject."""
    _require_closed(subject)
    d = infer({}, {}, subject)
    ty = d.conclusion.formula
    p = _peirce_propvar(ty)
    if p is None:
        raise TypeCheckError("subject must have type (~P -> P) -> P",
                             term=subject, found=ty)
    supply = _supply_for(subject, seed)
    u_star = supply.fresh("u")
    tail = tuple(Arg(Var(supply.fresh("t"))) for _ in range(n_args))
    report = BehaviorReport("peirce", subject, "inconclusive",
                            fresh_names={"u": u_star,
                                         "tail": [print_term(a.term) for a in tail]})
    continuation = HeadApplied(u_star, tail)

    current = apply_sequence(App(subject, Arg(Var(u_star))), tail)
    issued_vs: list[str] = []
    for stage in range(max_m + 1):
        patterns: list[tuple[str, LeafPattern]] = [("continue", continuation)]
        if issued_vs:
            patterns.append(
                ("terminal", AppliedTo(tail, frozenset(issued_vs))))
        result = search_spine_reduct(current, patterns, node_cap)
        if result.status == "cap-exceeded":
            report.detail = f"node cap {node_cap} exhausted at stage {stage}"
            return report
        if result.status == "not-found":
            report.verdict = "refuted"
            report.detail = f"no continuation or terminal leaf at stage {stage}"
            return report
        report.traces.append(result.trace)
        report.stages.append({"label": result.label, "witness": result.witness})
        if result.label == "terminal":
            report.verdict = "confirmed"
            report.m = stage
            report.detail = f"terminal ({print_term(result.bindings['slot'])} ...)"
            return report
        theta = result.bindings["slot"]
        report.thetas.append(theta)
        if stage == max_m:
            break
        v = supply.fresh("v")
        issued_vs.append(v)
        current = App(theta, Arg(Var(v)))
    report.detail = f"no terminal leaf within max_m={max_m} stages"
    return report


def probe_tertium(subject: Term, seq_len: int = 1,
                  node_cap: int = DEFAULT_NODE_CAP, max_m: int = 8,
                  seed: int = 0) -> BehaviorReport:
    """Stage through the case-branch continuations of an excluded-middle
    subject (type ~P \\/ P or P \\/ ~P)."""
    _require_closed(subject)
    d = infer({}, {}, subject)
    ty = d.conclusion.formula
    kinds = _tertium_branch_kinds(ty)
    if kinds is None:
        raise TypeCheckError("subject must have type ~P \\/ P or P \\/ ~P",
                             term=subject, found=ty)
    supply = _supply_for(subject, seed)
    c1, c2 = supply.fresh("c"), supply.fresh("c")
    x1, x2 = supply.fresh("x"), supply.fresh("x")
    probe = App(subject, Case(x1, App(Var(c1), Arg(Var(x1))),
                              x2, App(Var(c2), Arg(Var(x2)))))
    report = BehaviorReport("tertium", subject, "inconclusive",
                            fresh_names={"c1": c1, "c2": c2})
    branch_patterns = [("branch1", ProbeApplied(c1)),
                       ("branch2", ProbeApplied(c2))]
    issued_vs: list[str] = []
    issued_tails: list[tuple[ETerm, ...]] = []

    current = probe
    for stage in range(max_m + 1):
        patterns = list(branch_patterns)
        for q, tail in enumerate(issued_tails):
            if issued_vs:
                patterns.append(
                    (f"terminal{q}", AppliedTo(tail, frozenset(issued_vs))))
        result = search_spine_reduct(current, patterns, node_cap)
        if result.status == "cap-exceeded":
            report.detail = f"node cap {node_cap} exhausted at stage {stage}"
            return report
        if result.status == "not-found":
            report.verdict = "refuted"
            report.detail = f"no continuation or terminal leaf at stage {stage}"
            return report
        report.traces.append(result.trace)
        if result.label.startswith("terminal"):
            report.verdict = "confirmed"
            report.m = stage
            report.stages.append({"label": result.label,
                                  "witness": result.witness})
            report.detail = f"terminal ({print_term(result.bindings['slot'])} ...)"
            return report
        branch = 1 if result.label == "branch1" else 2
        theta = result.bindings["slot"]
        report.thetas.append(theta)
        report.stages.append({"label": result.label, "branch": branch,
                              "kind": kinds[branch - 1],
                              "witness": result.witness})
        if stage == max_m:
            break
        if kinds[branch - 1] == "pos":
            # the P-side continuation consumes an E-sequence
            tail = tuple(Arg(Var(supply.fresh("t"))) for _ in range(seq_len))
            issued_tails.append(tail)
            current = apply_sequence(theta, tail)
        else:
            # the ~P-side continuation consumes a term
            v = supply.fresh("v")
            issued_vs.append(v)
            current = App(theta, Arg(Var(v)))
    report.detail = f"no terminal leaf within max_m={max_m} stages"
    return report


def _require_closed(subject: Term) -> None:
    if not is_closed(subject):
        raise TypeCheckError("probe subject must be closed", term=subject)


def _peirce_propvar(ty: Formula) -> Optional[str]:
    match ty:
        case Arrow(Arrow(Arrow(PropVar(p1), Bottom()), PropVar(p2)), PropVar(p3)) \
                if p1 == p2 == p3:
            return p1
    return None


def _tertium_branch_kinds(ty: Formula) -> Optional[tuple[str, str]]:
    """("pos"|"neg") per disjunct when ty is ~P \\/ P or P \\/ ~P."""
    match ty:
        case Disj(Arrow(PropVar(p1), Bottom()), PropVar(p2)) if p1 == p2:
            return ("neg", "pos")
        case Disj(PropVar(p1), Arrow(PropVar(p2), Bottom())) if p1 == p2:
            return ("pos", "neg")
    return None


# --------------------------------------------------------------------------
# Canonical term library
# --------------------------------------------------------------------------

_CANONICAL_SOURCES = {
    "T": "\\z:_|_. mu a:P. z",
    "C1": "\\z:~P -> P. mu a:P. [a] (z \\y:P. [a] y)",
    "C2": "\\z:~P -> P. mu a:P. [a] (z \\x:P. [a] (z \\y:P. [a] x))",
    "W": "mu b:P \\/ ~P. [b] in1{~P} mu a:P. [b] in2{P} \\y:P. [a] y",
    "Wprime": "mu b:~P \\/ P. [b] in2{~P} mu a:P. [b] in1{P} \\y:P. [a] y",
    "Tvar": "\\z:_|_. mu a:P. mu b:_|_. z",
}


def canonical_terms() -> dict[str, tuple[Term, Formula]]:
    """The named library: each term with its checker-verified type.

    Note the injection order: W checks at P \\/ ~P, and its
    injection-swapped twin Wprime at ~P \\/ P.
    """
    out = {}
    for name, src in _CANONICAL_SOURCES.items():
        t = parse_term(src)
        d = infer({}, {}, t)
        out[name] = (t, d.conclusion.formula)
    return out
