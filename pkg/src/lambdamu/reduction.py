"""Redexes, single-step contraction, normalization, and reduction graphs.

The five contraction rules::

    beta       (\\x.u v)                  > u[x:=v]
    proj       (<t1,t2> pi)               > ti
    case-inj   (ini t [x1.u1,x2.u2])      > ui[xi:=t]
    case-perm  ((t [x1.u1,x2.u2]) e)      > (t [x1.(u1 e), x2.(u2 e)])
    mu-struct  (mu a.t e)                 > mu a.t[a:=*e]

Reduction is closed under all term and E-term contexts: under binders,
inside pairs, injections, case branches, and named terms.  Positions
are paths of child indices from the root; for an application the
function is child 0 and the E-term payload occupies children 1 (and 2
for the second case branch).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .syntax import canonical_form, print_term
from .terms import (
    Abs, App, Arg, Arrow, Case, Conj, ETerm, Formula, FreshSupply, Inj1,
    Inj2, Mu, Named, Pair, Proj1, Proj2, Term, Var, all_names,
    all_names_eterm, free_variables_eterm, mu_substitute, substitute,
)

RULE_IDS = ("beta", "proj", "case-inj", "case-perm", "mu-struct")

DEFAULT_FUEL = 10_000
DEFAULT_NODE_CAP = 100_000

Position = tuple[int, ...]


class InvalidPosition(Exception):
    pass


class FuelExhausted(Exception):
    """Raised by normalize when the step budget runs out; carries the trace."""

    def __init__(self, trace: "Trace"):
        self.trace = trace
        super().__init__(f"fuel exhausted after {len(trace.steps)} steps")


@dataclass(frozen=True)
class ReductionStep:
    before: Term
    position: Position
    rule: str
    after: Term


@dataclass
class Trace:
    initial: Term
    steps: list[ReductionStep] = field(default_factory=list)

    @property
    def final(self) -> Term:
        return self.steps[-1].after if self.steps else self.initial

    def to_json_lines(self) -> list[dict]:
        return [
            {
                "index": i,
                "rule": s.rule,
                "position": list(s.position),
                "before": canonical_form(s.before),
                "after": canonical_form(s.after),
            }
            for i, s in enumerate(self.steps)
        ]


# --------------------------------------------------------------------------
# Positions
# --------------------------------------------------------------------------

def term_children(t: Term) -> list[tuple[int, Term]]:
    match t:
        case Var(_):
            return []
        case Abs(_, _, b) | Mu(_, _, b) | Named(_, b) | Inj1(b, _) | Inj2(b, _):
            return [(0, b)]
        case Pair(f, s):
            return [(0, f), (1, s)]
        case App(f, e):
            out = [(0, f)]
            match e:
                case Arg(u):
                    out.append((1, u))
                case Case(_, u1, _, u2):
                    out.append((1, u1))
                    out.append((2, u2))
            return out
    raise TypeError(f"not a term: {t!r}")


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        for j, child in term_children(t):
            if j == i:
                t = child
                break
        else:
            raise InvalidPosition(f"no child {i} at {print_term(t)}")
    return t


def replace_at(t: Term, p: Position, new: Term) -> Term:
    if not p:
        return new
    i, rest = p[0], p[1:]
    match t, i:
        case Abs(x, ann, b), 0:
            return Abs(x, ann, replace_at(b, rest, new))
        case Mu(a, ann, b), 0:
            return Mu(a, ann, replace_at(b, rest, new))
        case Named(a, b), 0:
            return Named(a, replace_at(b, rest, new))
        case Inj1(b, ann), 0:
            return Inj1(replace_at(b, rest, new), ann)
        case Inj2(b, ann), 0:
            return Inj2(replace_at(b, rest, new), ann)
        case Pair(f, s), 0:
            return Pair(replace_at(f, rest, new), s)
        case Pair(f, s), 1:
            return Pair(f, replace_at(s, rest, new))
        case App(f, e), 0:
            return App(replace_at(f, rest, new), e)
        case App(f, Arg(u)), 1:
            return App(f, Arg(replace_at(u, rest, new)))
        case App(f, Case(x1, u1, x2, u2, ann)), 1:
            return App(f, Case(x1, replace_at(u1, rest, new), x2, u2, ann))
        case App(f, Case(x1, u1, x2, u2, ann)), 2:
            return App(f, Case(x1, u1, x2, replace_at(u2, rest, new), ann))
    raise InvalidPosition(f"no child {i} at {print_term(t)}")


# --------------------------------------------------------------------------
# Redexes and contraction
# --------------------------------------------------------------------------

def rule_at(t: Term) -> Optional[str]:
    """The rule whose left-hand side matches at the root of t, if any."""
    match t:
        case App(Abs(), Arg()):
            return "beta"
        case App(Pair(), Proj1() | Proj2()):
            return "proj"
        case App(Inj1() | Inj2(), Case()):
            return "case-inj"
        case App(App(_, Case()), _):
            return "case-perm"
        case App(Mu(), _):
            return "mu-struct"
    return None


def redexes(t: Term) -> list[tuple[Position, str]]:
    """All redex positions, in leftmost-outermost (pre-)order."""
    out: list[tuple[Position, str]] = []

    def walk(t, path):
        r = rule_at(t)
        if r is not None:
            out.append((path, r))
        for i, child in term_children(t):
            walk(child, path + (i,))

    walk(t, ())
    return out


def _result_ann(ann: Optional[Formula], e: ETerm) -> Optional[Formula]:
    """The type annotation left after applying a term of type ann to e.

    Arguments and projections decompose the annotation; a case bracket
    supplies its own result annotation.  None when underivable, which
    only happens on unannotated or untypable inputs.
    """
    match e:
        case Arg(_):
            return ann.right if isinstance(ann, Arrow) else None
        case Proj1():
            return ann.left if isinstance(ann, Conj) else None
        case Proj2():
            return ann.right if isinstance(ann, Conj) else None
        case Case(_, _, _, _, c):
            return c
    return None


def contract_root(t: Term) -> Term:
    rule = rule_at(t)
    if rule is None:
        raise InvalidPosition(f"no redex at root of {print_term(t)}")
    match rule, t:
        case "beta", App(Abs(x, _, body), Arg(v)):
            return substitute(body, x, v)
        case "proj", App(Pair(f, s), proj):
            return f if isinstance(proj, Proj1) else s
        case "case-inj", App(Inj1(v, _), Case(x1, u1, _, _)):
            return substitute(u1, x1, v)
        case "case-inj", App(Inj2(v, _), Case(_, _, x2, u2)):
            return substitute(u2, x2, v)
        case "case-perm", App(App(s, Case(x1, u1, x2, u2, ann)), e):
            e_lam, _ = free_variables_eterm(e)
            supply = FreshSupply(all_names(t) | all_names_eterm(e))
            if x1 in e_lam:
                y = supply.fresh(x1)
                u1, x1 = substitute(u1, x1, Var(y)), y
            if x2 in e_lam:
                y = supply.fresh(x2)
                u2, x2 = substitute(u2, x2, Var(y)), y
            return App(s, Case(x1, App(u1, e), x2, App(u2, e),
                               _result_ann(ann, e)))
        case "mu-struct", App(Mu(a, ann, body), e):
            _, e_mu = free_variables_eterm(e)
            if a in e_mu:
                supply = FreshSupply(all_names(t) | all_names_eterm(e))
                a2 = supply.fresh(a)
                from .terms import _rename_mu
                body, a = _rename_mu(body, a, a2), a2
            return Mu(a, _result_ann(ann, e), mu_substitute(body, a, (e,)))
    raise InvalidPosition(f"unmatched redex at {print_term(t)}")


def contract(t: Term, p: Position) -> Term:
    """Contract the redex at position p (capture-avoiding)."""
    return replace_at(t, p, contract_root(subterm_at(t, p)))


def step_at(t: Term, p: Position) -> ReductionStep:
    sub = subterm_at(t, p)
    rule = rule_at(sub)
    if rule is None:
        raise InvalidPosition(f"no redex at {p} in {print_term(t)}")
    return ReductionStep(t, p, rule, replace_at(t, p, contract_root(sub)))


def successors(t: Term) -> list[Term]:
    """One-step reducts from every redex position; empty iff t is normal."""
    return [contract(t, p) for p, _ in redexes(t)]


def is_normal(t: Term) -> bool:
    return not redexes(t)


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> tuple[Term, Trace]:
    """Reduce the leftmost-outermost redex until normal or out of fuel."""
    trace = Trace(t)
    current = t
    for _ in range(fuel):
        rs = redexes(current)
        if not rs:
            return current, trace
        step = step_at(current, rs[0][0])
        trace.steps.append(step)
        current = step.after
    if not redexes(current):
        return current, trace
    raise FuelExhausted(trace)


# --------------------------------------------------------------------------
# Reduction graphs
# --------------------------------------------------------------------------

@dataclass
class ReductionGraph:
    """Breadth-first closure of a term under one-step reduction.

    Nodes are keyed by their alpha-canonical printed form; ``complete``
    is False when the node cap interrupted exploration.
    """

    root: str
    nodes: dict[str, Term]
    edges: list[tuple[str, ReductionStep, str]]
    complete: bool

    def successor_map(self) -> dict[str, set[str]]:
        succ: dict[str, set[str]] = {k: set() for k in self.nodes}
        for src, _, dst in self.edges:
            succ[src].add(dst)
        return succ

    def normal_forms(self) -> list[str]:
        succ = self.successor_map()
        return [k for k in self.nodes if not succ[k]]

    def descendants(self) -> dict[str, set[str]]:
        """Reflexive-transitive reachability per node."""
        succ = self.successor_map()
        out: dict[str, set[str]] = {}
        for start in self.nodes:
            seen = {start}
            frontier = [start]
            while frontier:
                nxt = []
                for k in frontier:
                    for s in succ[k]:
                        if s not in seen:
                            seen.add(s)
                            nxt.append(s)
                frontier = nxt
            out[start] = seen
        return out

    def is_acyclic(self) -> bool:
        succ = self.successor_map()
        state: dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(k) -> bool:
            state[k] = 1
            for s in succ[k]:
                mark = state.get(s)
                if mark == 1:
                    return False
                if mark is None and not visit(s):
                    return False
            state[k] = 2
            return True

        return all(state.get(k) == 2 or visit(k) for k in self.nodes)

    def longest_path_length(self) -> int:
        """Length of the longest reduction sequence (graph must be acyclic)."""
        succ = self.successor_map()
        memo: dict[str, int] = {}

        def depth(k) -> int:
            if k not in memo:
                memo[k] = max((1 + depth(s) for s in succ[k]), default=0)
            return memo[k]

        return depth(self.root)

    def to_dot(self) -> str:
        ids = {k: f"n{i}" for i, k in enumerate(self.nodes)}
        lines = ["digraph reduction {"]
        for k, i in ids.items():
            label = k.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  {i} [label="{label}"];')
        for src, step, dst in self.edges:
            lines.append(f'  {ids[src]} -> {ids[dst]} [label="{step.rule}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "complete": self.complete,
            "nodes": list(self.nodes),
            "edges": [
                {"from": src, "to": dst, "rule": step.rule,
                 "position": list(step.position)}
                for src, step, dst in self.edges
            ],
        }


def reduction_graph(t: Term, node_cap: int = DEFAULT_NODE_CAP) -> ReductionGraph:
    """Explore all reducts of t, deduplicating alpha-equal nodes.

    The cap applies to the deduplicated node count; hitting it returns
    the partial graph flagged incomplete.
    """
    if node_cap < 1:
        raise ValueError("node_cap must be >= 1")
    root = canonical_form(t)
    nodes: dict[str, Term] = {root: t}
    edges: list[tuple[str, ReductionStep, str]] = []
    queue: list[str] = [root]
    qi = 0
    complete = True
    while qi < len(queue):
        key = queue[qi]
        qi += 1
        current = nodes[key]
        overflow = False
        for p, _ in redexes(current):
            step = step_at(current, p)
            dst = canonical_form(step.after)
            if dst not in nodes:
                if len(nodes) >= node_cap:
                    overflow = True
                    continue
                nodes[dst] = step.after
                queue.append(dst)
            edges.append((key, step, dst))
        if overflow:
            complete = False
            break
    return ReductionGraph(root, nodes, edges, complete)
