"""Lifted subgoals, specifier matching, grounding sets, and quest costs.

A lifted subgoal describes objects by properties instead of ids: an optional
category tier (class / subclass / category), attribute literals, the source
position, a target position (move-to only), and a verb (change-state only).
Its grounding set is every concrete subgoal consistent with the description
at the quest-time state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from . import catalog
from .catalog import CATALOG
from .world import HUMAN, WorldState

QUEST_TYPES = ("bring-me", "move-to", "change-state")

TIER_COST = {"class": 1, "subclass": 2, "category": 3}

# change-state verbs and the attribute literals their completion requires
VERB_EFFECTS: dict[str, tuple[tuple[str, bool], ...]] = {
    "heat": (("cooked", True),),
    "cool": (("frozen", True),),
    "soak": (("soaked", True),),
    "slice": (("sliced", True),),
    "clean": (("dusty", False), ("stained", False)),
    "open": (("open", True),),
    "close": (("open", False),),
    "toggle-on": (("toggled", True),),
    "toggle-off": (("toggled", False),),
}


def verb_applicable(category: str, verb: str) -> bool:
    spec = CATALOG[category]
    if verb == "clean":
        return spec.has("dustyable") or spec.has("stainable")
    attr = VERB_EFFECTS[verb][0][0]
    return spec.has(catalog.ATTRIBUTE_META[attr])


class QuestError(Exception):
    pass


@dataclass(frozen=True, order=True)
class LiftedSubgoal:
    """A quest with property specifiers; doubles as the utterance type."""

    quest_type: str
    tier: Optional[tuple[str, str]] = None  # (level, name)
    attributes: tuple[tuple[str, object], ...] = ()
    source: Optional[str] = None
    target: Optional[str] = None  # move-to only: a position category
    verb: Optional[str] = None  # change-state only

    def specifier_count(self) -> int:
        n = len(self.attributes)
        if self.source is not None:
            n += 1
        if self.target is not None:
            n += 1
        return n

    def entries(self) -> list[tuple]:
        """Individually removable specifier entries (for relaxations)."""
        out: list[tuple] = []
        if self.tier is not None:
            out.append(("tier", self.tier))
        for lit in self.attributes:
            out.append(("attr", lit))
        if self.source is not None:
            out.append(("source", self.source))
        if self.target is not None:
            out.append(("target", self.target))
        return out

    def without(self, removed: set[int]) -> "LiftedSubgoal":
        """Relaxation dropping the entries at the given indices."""
        ent = self.entries()
        keep = [e for i, e in enumerate(ent) if i not in removed]
        tier = None
        attrs = []
        source = target = None
        for kind, val in keep:
            if kind == "tier":
                tier = val
            elif kind == "attr":
                attrs.append(val)
            elif kind == "source":
                source = val
            elif kind == "target":
                target = val
        return LiftedSubgoal(
            quest_type=self.quest_type, tier=tier, attributes=tuple(sorted(attrs)),
            source=source, target=target, verb=self.verb,
        )

    def relaxations(self) -> list["LiftedSubgoal"]:
        """Every utterance obtainable by removing a portion of the
        specifiers, including the empty one and the subgoal itself."""
        n = len(self.entries())
        out = []
        for k in range(n + 1):
            for combo in combinations(range(n), k):
                out.append(self.without(set(combo)))
        # dedupe, stable order
        seen = set()
        uniq = []
        for u in out:
            if u not in seen:
                seen.add(u)
                uniq.append(u)
        return uniq

    def to_json_obj(self) -> dict:
        return {
            "type": self.quest_type,
            "tier": list(self.tier) if self.tier else None,
            "attributes": [[a, v] for a, v in self.attributes],
            "source": self.source,
            "target": self.target,
            "verb": self.verb,
        }

    @classmethod
    def from_json_obj(cls, data: dict) -> "LiftedSubgoal":
        return cls(
            quest_type=data["type"],
            tier=tuple(data["tier"]) if data.get("tier") else None,
            attributes=tuple(sorted((a, v) for a, v in data.get("attributes", []))),
            source=data.get("source"),
            target=data.get("target"),
            verb=data.get("verb"),
        )


@dataclass(frozen=True)
class GroundedSubgoal:
    """A concrete achievement condition."""

    quest_type: str
    obj: str
    target: Optional[str] = None
    verb: Optional[str] = None

    def holds(self, state: WorldState) -> bool:
        if self.quest_type == "bring-me":
            return state.holding.get(HUMAN) == self.obj
        if self.quest_type == "move-to":
            p = state.pos.get(self.obj)
            if p is None:
                return False
            rel = "in" if state.universe.spec(self.target).has("has-inside") else "on"
            return p == (rel, self.target)
        spec = state.universe.spec(self.obj)
        for attr, want in VERB_EFFECTS[self.verb]:
            if spec.has(catalog.ATTRIBUTE_META[attr]) and state.has_flag(self.obj, attr) != want:
                return False
        return True


class GroundingSet:
    """A(x): the grounded subgoals consistent with a lifted description.

    move-to sets factor into object ids x target ids with x != y pairs;
    bring-me and change-state sets are plain object id sets.
    """

    def __init__(self, quest_type: str, objs: frozenset[str],
                 targets: Optional[frozenset[str]] = None, verb: Optional[str] = None):
        self.quest_type = quest_type
        self.objs = objs
        self.targets = targets
        self.verb = verb

    def __len__(self) -> int:
        if self.quest_type != "move-to":
            return len(self.objs)
        overlap = len(self.objs & self.targets)
        return len(self.objs) * len(self.targets) - overlap

    def is_empty(self) -> bool:
        return len(self) == 0

    def members(self) -> list[GroundedSubgoal]:
        if self.quest_type == "bring-me":
            return [GroundedSubgoal("bring-me", o) for o in sorted(self.objs)]
        if self.quest_type == "change-state":
            return [GroundedSubgoal("change-state", o, verb=self.verb) for o in sorted(self.objs)]
        return [
            GroundedSubgoal("move-to", o, target=t)
            for o in sorted(self.objs) for t in sorted(self.targets) if o != t
        ]

    def pair_set(self) -> frozenset:
        if self.quest_type == "move-to":
            return frozenset((o, t) for o in self.objs for t in self.targets if o != t)
        if self.quest_type == "change-state":
            return frozenset((o, self.verb) for o in self.objs)
        return frozenset(self.objs)

    def issubset(self, other: "GroundingSet") -> bool:
        if self.quest_type != other.quest_type:
            return False
        if self.quest_type == "change-state" and self.verb != other.verb:
            return False
        if self.quest_type == "move-to":
            if self.is_empty():
                return True
            return self.objs <= other.objs and self.targets <= other.targets
        return self.objs <= other.objs

    def equals(self, other: "GroundingSet") -> bool:
        return self.pair_set() == other.pair_set() and self.quest_type == other.quest_type

    def contains(self, mg: GroundedSubgoal) -> bool:
        if mg.quest_type != self.quest_type:
            return False
        if self.quest_type == "move-to":
            return mg.obj in self.objs and mg.target in self.targets and mg.obj != mg.target
        if self.quest_type == "change-state":
            return mg.obj in self.objs and mg.verb == self.verb
        return mg.obj in self.objs


# ---------------------------------------------------------------------------
# Matching and lattice enumeration
# ---------------------------------------------------------------------------


def object_literals(state: WorldState, obj: str) -> frozenset[tuple[str, object]]:
    """The attribute literals realized by an object at a state: static size
    and color values plus the current value of every supported boolean."""
    inst = state.universe.get(obj)
    spec = inst.spec
    lits: set[tuple[str, object]] = set()
    if inst.size is not None:
        lits.add(("size", inst.size))
    if inst.color is not None:
        lits.add(("color", inst.color))
    for attr in catalog.ATTRIBUTES:
        if spec.has(catalog.ATTRIBUTE_META[attr]):
            lits.add((attr, state.has_flag(obj, attr)))
    return frozenset(lits)


def matches(state: WorldState, obj: str, m: LiftedSubgoal) -> bool:
    """Whether an object satisfies every object-side specifier of ``m`` at
    the given state (positions are direct)."""
    spec = state.universe.spec(obj)
    if not spec.movable:
        return False
    if m.tier is not None:
        level, name = m.tier
        got = {"class": spec.cls, "subclass": spec.subclass, "category": spec.name}[level]
        if got != name:
            return False
    lits = object_literals(state, obj)
    for lit in m.attributes:
        if lit not in lits:
            return False
    if m.source is not None:
        p = state.pos.get(obj)
        if p is None or state.universe.category(p[1]) != m.source:
            return False
    if m.quest_type == "change-state" and not verb_applicable(spec.name, m.verb):
        return False
    return True


def position_capable_ids(state: WorldState) -> list[str]:
    """Every instance that can hold an object (all locations + receptacles)."""
    uni = state.universe
    return [o for o in uni.ids if uni.spec(o).cls in ("location", "receptacle")]


def target_instances(state: WorldState, target: Optional[str]) -> frozenset[str]:
    if target is None:
        return frozenset(position_capable_ids(state))
    return frozenset(state.universe.instances_of(target))


def grounding_set(state: WorldState, m: LiftedSubgoal) -> GroundingSet:
    """A(m), evaluated against direct positions at ``state``."""
    objs = frozenset(o for o in state.universe.movables if matches(state, o, m))
    if m.quest_type == "move-to":
        return GroundingSet("move-to", objs, targets=target_instances(state, m.target))
    if m.quest_type == "change-state":
        return GroundingSet("change-state", objs, verb=m.verb)
    return GroundingSet("bring-me", objs)


def quest_cost(m: LiftedSubgoal) -> int:
    """Communication cost: 1/2/3 for a class/subclass/category tier plus one
    per attribute or position specifier. Verbs are free."""
    cost = TIER_COST[m.tier[0]] if m.tier is not None else 0
    return cost + m.specifier_count()


def literal_meaning(u: LiftedSubgoal, m: LiftedSubgoal,
                    state: WorldState,
                    cache: Optional[dict] = None) -> int:
    """1 iff A(m) is contained in A(u); 0 across quest types or verbs."""
    if u.quest_type != m.quest_type or u.verb != m.verb:
        return 0
    if cache is not None:
        am = cache.setdefault(m, grounding_set(state, m))
        au = cache.setdefault(u, grounding_set(state, u))
    else:
        am = grounding_set(state, m)
        au = grounding_set(state, u)
    return 1 if am.issubset(au) else 0


MAX_ATTR_SPECIFIERS = 2
MAX_DYNAMIC_SPECIFIERS = 1
MAX_NON_TIER_ENTRIES = 3


@dataclass
class MeaningLattice:
    """All candidate lifted subgoals of one quest type realized by the scene.

    Enumerated per object so every meaning has a nonempty grounding set, and
    grounding sets come out of the enumeration for free. ``objs[i]`` is the
    frozenset of matched object ids for descriptor part of meaning i.
    """

    quest_type: str
    meanings: list[LiftedSubgoal]
    objs: list[frozenset[str]]
    targets: list[frozenset[str]]  # move-to only; frozenset() otherwise
    index: dict[LiftedSubgoal, int] = field(default_factory=dict)

    def __post_init__(self):
        self.index = {m: i for i, m in enumerate(self.meanings)}

    def __len__(self) -> int:
        return len(self.meanings)

    def grounding(self, i: int) -> GroundingSet:
        m = self.meanings[i]
        if self.quest_type == "move-to":
            return GroundingSet("move-to", self.objs[i], targets=self.targets[i])
        if self.quest_type == "change-state":
            return GroundingSet("change-state", self.objs[i], verb=m.verb)
        return GroundingSet("bring-me", self.objs[i])


def _object_descriptors(state: WorldState, obj: str, with_target_budget: bool):
    """Descriptor variants (tier, attrs, source) realized by one object."""
    uni = state.universe
    spec = uni.spec(obj)
    tiers: list[Optional[tuple[str, str]]] = [
        None, ("class", spec.cls), ("subclass", spec.subclass), ("category", spec.name)]
    lits = sorted(object_literals(state, obj), key=lambda t: (t[0], str(t[1])))
    p = state.pos.get(obj)
    sources: list[Optional[str]] = [None]
    if p is not None:
        sources.append(uni.category(p[1]))
    budget = MAX_NON_TIER_ENTRIES - (1 if with_target_budget else 0)
    out = []
    for tier in tiers:
        for k in range(0, min(MAX_ATTR_SPECIFIERS, budget) + 1):
            for combo in combinations(lits, k):
                if sum(1 for name, _ in combo if name not in ("size", "color")) > MAX_DYNAMIC_SPECIFIERS:
                    continue
                for src in sources:
                    if k + (1 if src else 0) > budget:
                        continue
                    out.append((tier, tuple(combo), src))
    return out


def enumerate_lattice(state: WorldState, quest_type: str) -> MeaningLattice:
    """Candidate meanings of a quest type with their grounding sets."""
    uni = state.universe
    desc_objs: dict[tuple, set[str]] = {}
    for obj in uni.movables:
        if quest_type == "change-state":
            verbs = [v for v in sorted(VERB_EFFECTS) if verb_applicable(uni.category(obj), v)]
        else:
            verbs = [None]
        for desc in _object_descriptors(state, obj, with_target_budget=(quest_type == "move-to")):
            for verb in verbs:
                desc_objs.setdefault(desc + (verb,), set()).add(obj)

    meanings: list[LiftedSubgoal] = []
    objs: list[frozenset[str]] = []
    targets: list[frozenset[str]] = []
    if quest_type == "move-to":
        seen_cat = {uni.category(o) for o in position_capable_ids(state)}
        target_cats: list[Optional[str]] = [None] + sorted(seen_cat)
        tgt_sets = {c: target_instances(state, c) for c in target_cats}
    for key in sorted(desc_objs, key=lambda k: repr(k)):
        tier, attrs, src, verb = key
        matched = frozenset(desc_objs[key])
        if quest_type == "move-to":
            for tc in target_cats:
                if (len(attrs) + (1 if src else 0) + (1 if tc else 0)) > MAX_NON_TIER_ENTRIES:
                    continue
                meanings.append(LiftedSubgoal(
                    quest_type="move-to", tier=tier, attributes=attrs, source=src, target=tc))
                objs.append(matched)
                targets.append(tgt_sets[tc])
        else:
            meanings.append(LiftedSubgoal(
                quest_type=quest_type, tier=tier, attributes=attrs, source=src, verb=verb))
            objs.append(matched)
            targets.append(frozenset())
    return MeaningLattice(quest_type=quest_type, meanings=meanings, objs=objs, targets=targets)
