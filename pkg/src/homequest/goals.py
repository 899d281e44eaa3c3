"""Goal templates and ground goals.

Templates carry subclass placeholders written ``?[subclass]`` or
``?[subclass]_k``; instantiation replaces each with a concrete category of
that subclass, distinct categories for distinct indices of the same subclass.
A ground goal compiles to a single prenex formula: the shared existential
variables bind distinct objects, and every conjunct must hold under one common
binding.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import product
from typing import Optional

from . import catalog, logic, rng as rngmod
from .logic import And, Cat, Exists, Flag, Forall, Implies, In, Neq, Not, On
from .world import WorldState

_PLACEHOLDER = re.compile(r"^\?\[(?P<sub>[^\]]+)\](?:_(?P<idx>\d+))?$")


class GoalError(Exception):
    pass


@dataclass(frozen=True)
class Conjunct:
    quant: str  # forall | exists | forall_exists
    test: str
    rel: Optional[str] = None
    y_ref: Optional[str] = None
    y_test: Optional[str] = None
    outer_test: Optional[str] = None
    x_flags: tuple[tuple[str, bool], ...] = ()
    y_flags: tuple[tuple[str, bool], ...] = ()


@dataclass(frozen=True)
class GoalTemplate:
    name: str
    v2: bool
    shared: tuple[tuple[str, str], ...]  # (var, test)
    conjuncts: tuple[Conjunct, ...]

    def placeholders(self) -> list[str]:
        seen: list[str] = []
        for token in self._tokens():
            if _PLACEHOLDER.match(token) and token not in seen:
                seen.append(token)
        return seen

    def _tokens(self) -> list[str]:
        toks = [t for _, t in self.shared]
        for c in self.conjuncts:
            toks.append(c.test)
            if c.y_test:
                toks.append(c.y_test)
            if c.outer_test:
                toks.append(c.outer_test)
        return toks


@lru_cache(maxsize=1)
def load_templates() -> tuple[GoalTemplate, ...]:
    raw = json.loads(resources.files("homequest.data").joinpath("goal_templates.json").read_text())
    out = []
    for t in raw["templates"]:
        conjs = []
        for c in t["conjuncts"]:
            if c["quant"] == "forall_exists":
                conjs.append(Conjunct(quant="forall_exists", test=c["test"],
                                      outer_test=c["outer_test"], rel=c["rel"]))
            else:
                conjs.append(Conjunct(
                    quant=c["quant"], test=c["test"], rel=c.get("rel"),
                    y_ref=c.get("y_ref"), y_test=c.get("y_test"),
                    x_flags=tuple((a, b) for a, b in c.get("x_flags", [])),
                    y_flags=tuple((a, b) for a, b in c.get("y_flags", [])),
                ))
        out.append(GoalTemplate(
            name=t["name"], v2=t["v2"],
            shared=tuple((s["var"], s["test"]) for s in t["shared"]),
            conjuncts=tuple(conjs),
        ))
    return tuple(out)


def templates(version: str = "v1") -> tuple[GoalTemplate, ...]:
    all_templates = load_templates()
    if version == "v1":
        return all_templates
    if version == "v2":
        return tuple(t for t in all_templates if t.v2)
    raise ValueError(f"unknown version {version!r}")


def template_by_name(name: str) -> GoalTemplate:
    for t in load_templates():
        if t.name == name:
            return t
    raise GoalError(f"unknown template {name!r}")


def _subst(token: str, binding: dict[str, str]) -> str:
    return binding.get(token, token)


@dataclass(frozen=True)
class GroundGoal:
    """A template with all placeholders bound to concrete categories."""

    template: GoalTemplate
    binding: tuple[tuple[str, str], ...]  # placeholder token -> category

    @property
    def name(self) -> str:
        return self.template.name

    def binding_map(self) -> dict[str, str]:
        return dict(self.binding)

    def resolved_conjuncts(self) -> list[Conjunct]:
        b = self.binding_map()
        out = []
        for c in self.template.conjuncts:
            out.append(Conjunct(
                quant=c.quant, test=_subst(c.test, b), rel=c.rel, y_ref=c.y_ref,
                y_test=_subst(c.y_test, b) if c.y_test else None,
                outer_test=_subst(c.outer_test, b) if c.outer_test else None,
                x_flags=c.x_flags, y_flags=c.y_flags,
            ))
        return out

    def resolved_shared(self) -> list[tuple[str, str]]:
        b = self.binding_map()
        return [(v, _subst(t, b)) for v, t in self.template.shared]

    def _conjunct_formula(self, c: Conjunct, idx: int) -> logic.Formula:
        xv = f"?x{idx}"
        atoms: list[logic.Formula] = []
        yv: Optional[str] = None
        if c.y_ref:
            yv = f"?{c.y_ref}"
        elif c.y_test:
            yv = f"?yl{idx}"
        if c.rel and yv:
            atoms.append(In(xv, yv) if c.rel == "in" else On(xv, yv))
        for attr, val in c.x_flags:
            atoms.append(Flag(xv, attr) if val else Not(Flag(xv, attr)))
        for attr, val in c.y_flags:
            assert yv is not None
            atoms.append(Flag(yv, attr) if val else Not(Flag(yv, attr)))
        body: logic.Formula = atoms[0] if len(atoms) == 1 else And(tuple(atoms))
        if c.quant == "forall":
            f: logic.Formula = Forall(xv, Implies(Cat(xv, c.test), body))
        elif c.quant == "exists":
            f = Exists(xv, And((Cat(xv, c.test),) + tuple(atoms)))
        else:
            raise GoalError(f"bad conjunct quant {c.quant!r}")
        if c.y_test:
            f = Exists(yv, And((Cat(yv, c.y_test), f)))
        return f

    def conjunct_formula(self, idx: int) -> logic.Formula:
        c = self.resolved_conjuncts()[idx]
        if c.quant == "forall_exists":
            xv, yv = f"?x{idx}", f"?yo{idx}"
            rel = In(xv, yv) if c.rel == "in" else On(xv, yv)
            return Forall(yv, Exists(xv, And((
                Cat(xv, c.test), Implies(Cat(yv, c.outer_test), rel)))))
        return self._conjunct_formula(c, idx)

    def to_formula(self) -> logic.Formula:
        parts = [self.conjunct_formula(i) for i in range(len(self.template.conjuncts))]
        body: logic.Formula = And(tuple(parts))
        shared = self.resolved_shared()
        for i, (v1, _) in enumerate(shared):
            for v2, _ in shared[i + 1:]:
                body = And((Neq(f"?{v1}", f"?{v2}"), body))
        for var, test in reversed(shared):
            body = Exists(f"?{var}", And((Cat(f"?{var}", test), body)))
        return body

    # -- binding-level evaluation (used by the planner heuristic) ----------

    def shared_domains(self, state: WorldState) -> list[tuple[str, ...]]:
        return [state.universe.instances_matching(t) for _, t in self.resolved_shared()]

    def bindings(self, state: WorldState) -> list[tuple[str, ...]]:
        domains = self.shared_domains(state)
        if not domains:
            return [()]
        out = []
        for combo in product(*domains):
            if len(set(combo)) == len(combo):
                out.append(combo)
        return out

    def conjunct_holds(self, state: WorldState, c: Conjunct, env: dict[str, str]) -> bool:
        uni = state.universe
        if c.quant == "forall_exists":
            inner = uni.instances_matching(c.test)
            if not inner:
                return False
            for y in uni.instances_matching(c.outer_test):
                if not any(state.pos.get(x) == (c.rel, y) for x in inner):
                    return False
            return True

        def ok_y(y: str) -> bool:
            return all(state.has_flag(y, a) == v for a, v in c.y_flags)

        def ok_x(x: str, y: Optional[str]) -> bool:
            if c.rel and y is not None and state.pos.get(x) != (c.rel, y):
                return False
            return all(state.has_flag(x, a) == v for a, v in c.x_flags)

        xs = uni.instances_matching(c.test)
        if c.y_ref:
            ys: list[Optional[str]] = [env[c.y_ref]]
        elif c.y_test:
            ys = list(uni.instances_matching(c.y_test))
        else:
            ys = [None]
        for y in ys:
            if c.quant == "forall":
                if all(ok_x(x, y) and (y is None or ok_y(y)) for x in xs):
                    return True
            else:
                if any(ok_x(x, y) and (y is None or ok_y(y)) for x in xs):
                    return True
        return False

    def satisfied_count(self, state: WorldState, env: dict[str, str]) -> int:
        return sum(
            1 for c in self.resolved_conjuncts() if self.conjunct_holds(state, c, env)
        )

    def holds(self, state: WorldState) -> bool:
        return logic.evaluate(state, self.to_formula())

    def to_json_obj(self) -> dict:
        return {"template": self.template.name, "binding": {k: v for k, v in self.binding}}

    @classmethod
    def from_json_obj(cls, data: dict) -> "GroundGoal":
        t = template_by_name(data["template"])
        return cls(template=t, binding=tuple(sorted(data["binding"].items())))

    def describe(self) -> str:
        return logic.render(self.to_formula())


def instantiate(template: GoalTemplate, rng) -> GroundGoal:
    """Bind each placeholder uniformly; same-subclass indices get distinct
    categories."""
    tokens = template.placeholders()
    by_sub: dict[str, list[str]] = {}
    for token in tokens:
        m = _PLACEHOLDER.match(token)
        by_sub.setdefault(m.group("sub"), []).append(token)
    binding: dict[str, str] = {}
    for sub, toks in by_sub.items():
        cats = sorted(catalog.categories_matching(sub))
        if len(cats) < len(toks):
            raise GoalError(f"subclass {sub!r} has fewer categories than placeholders")
        chosen = rngmod.sample_distinct(rng, cats, len(toks))
        for token, cat in zip(toks, chosen):
            binding[token] = cat
    return GroundGoal(template=template, binding=tuple(sorted(binding.items())))


def sample_goal(version: str, rng) -> GroundGoal:
    pool = templates(version)
    return instantiate(rngmod.pick(rng, pool), rng)
