"""First-order-logic formulas over a finite object universe.

Terms are strings; a leading ``?`` marks a variable, anything else is an
object id. Quantifier domains are the whole universe, with a fast path for
the ubiquitous ``exists x. cat(x) & ...`` / ``forall x. cat(x) -> ...``
shapes. ``in``/``on`` atoms test direct relations only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import catalog
from .world import WorldState


class FreeVariableError(Exception):
    pass


@dataclass(frozen=True)
class Cat:
    term: str
    name: str  # class, subclass, or category


@dataclass(frozen=True)
class Flag:
    term: str
    attr: str


@dataclass(frozen=True)
class In:
    a: str
    b: str


@dataclass(frozen=True)
class On:
    a: str
    b: str


@dataclass(frozen=True)
class Neq:
    a: str
    b: str


@dataclass(frozen=True)
class Not:
    f: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Cat, Flag, In, On, Neq, Not, And, Implies, Forall, Exists]


def _resolve(term: str, env: dict[str, str]) -> str:
    if term.startswith("?"):
        try:
            return env[term]
        except KeyError:
            raise FreeVariableError(f"free variable {term!r}") from None
    return term


def _restricted_domain(f: Formula, var: str, state: WorldState,
                       universal: bool) -> tuple[str, ...]:
    """Domain restriction when the quantifier body pins the var's category.

    Sound only for the guarded shapes: ``forall x. cat(x) -> ...`` and
    ``exists x. cat(x) & ...`` (or a bare ``exists x. cat(x)``).
    """
    probe = None
    if universal:
        if isinstance(f, Implies) and isinstance(f.left, Cat) and f.left.term == var:
            probe = f.left.name
    else:
        if isinstance(f, And) and f.parts and isinstance(f.parts[0], Cat) \
                and f.parts[0].term == var:
            probe = f.parts[0].name
        elif isinstance(f, Cat) and f.term == var:
            probe = f.name
    if probe is None:
        return state.universe.ids
    return state.universe.instances_matching(probe)


def evaluate(state: WorldState, formula: Formula, env: dict[str, str] | None = None) -> bool:
    """Standard FOL semantics over the state's finite universe."""
    env = env or {}
    if isinstance(formula, Cat):
        obj = _resolve(formula.term, env)
        return state.universe.category(obj) in catalog.categories_matching(formula.name)
    if isinstance(formula, Flag):
        return state.has_flag(_resolve(formula.term, env), formula.attr)
    if isinstance(formula, In):
        p = state.pos.get(_resolve(formula.a, env))
        return p is not None and p == ("in", _resolve(formula.b, env))
    if isinstance(formula, On):
        p = state.pos.get(_resolve(formula.a, env))
        return p is not None and p == ("on", _resolve(formula.b, env))
    if isinstance(formula, Neq):
        return _resolve(formula.a, env) != _resolve(formula.b, env)
    if isinstance(formula, Not):
        return not evaluate(state, formula.f, env)
    if isinstance(formula, And):
        return all(evaluate(state, p, env) for p in formula.parts)
    if isinstance(formula, Implies):
        return (not evaluate(state, formula.left, env)) or evaluate(state, formula.right, env)
    if isinstance(formula, (Forall, Exists)):
        want_all = isinstance(formula, Forall)
        domain = _restricted_domain(formula.body, formula.var, state, want_all)
        missing = object()
        outer = env.get(formula.var, missing)
        try:
            for obj in domain:
                env[formula.var] = obj
                ok = evaluate(state, formula.body, env)
                if ok != want_all:
                    return not want_all
            return want_all
        finally:
            if outer is missing:
                env.pop(formula.var, None)
            else:
                env[formula.var] = outer
    raise TypeError(f"not a formula: {formula!r}")


def free_variables(formula: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(formula, Cat):
        return {formula.term} - bound if formula.term.startswith("?") else set()
    if isinstance(formula, Flag):
        return {formula.term} - bound if formula.term.startswith("?") else set()
    if isinstance(formula, (In, On, Neq)):
        return {t for t in (formula.a, formula.b) if t.startswith("?")} - bound
    if isinstance(formula, Not):
        return free_variables(formula.f, bound)
    if isinstance(formula, And):
        return set().union(*(free_variables(p, bound) for p in formula.parts)) if formula.parts else set()
    if isinstance(formula, Implies):
        return free_variables(formula.left, bound) | free_variables(formula.right, bound)
    if isinstance(formula, (Forall, Exists)):
        return free_variables(formula.body, bound | {formula.var})
    raise TypeError(f"not a formula: {formula!r}")


def closed(formula: Formula) -> bool:
    return not free_variables(formula)


def render(formula: Formula) -> str:
    """Compact text form, used for labels and audits."""
    if isinstance(formula, Cat):
        return f"{formula.name}({formula.term.lstrip('?')})"
    if isinstance(formula, Flag):
        return f"{formula.attr}({formula.term.lstrip('?')})"
    if isinstance(formula, In):
        return f"in({formula.a.lstrip('?')}, {formula.b.lstrip('?')})"
    if isinstance(formula, On):
        return f"on({formula.a.lstrip('?')}, {formula.b.lstrip('?')})"
    if isinstance(formula, Neq):
        return f"{formula.a.lstrip('?')} != {formula.b.lstrip('?')}"
    if isinstance(formula, Not):
        return f"not {render(formula.f)}"
    if isinstance(formula, And):
        return " & ".join(render(p) for p in formula.parts)
    if isinstance(formula, Implies):
        return f"({render(formula.left)} -> {render(formula.right)})"
    if isinstance(formula, Forall):
        return f"forall {formula.var.lstrip('?')}. ({render(formula.body)})"
    if isinstance(formula, Exists):
        return f"exists {formula.var.lstrip('?')}. ({render(formula.body)})"
    raise TypeError(f"not a formula: {formula!r}")
