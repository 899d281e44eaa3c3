"""Subgoal utilities: how much a robot-achieved subgoal shortens the human's
remaining work.

The utility of a lifted subgoal is the current human cost-to-go minus the
mean cost-to-go over the landing states of its groundings. Cost-to-go calls
are memoized by a digest of the goal-relevant part of the state (relevant
objects, their holder chains, the human's position and hand), so the many
landings that differ only in irrelevant detail share one planner call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from . import world
from .catalog import CATALOG, CLEAN_TOOLS, SLICE_TOOLS
from .goals import GroundGoal
from .planner import (
    ConditionGoalAdapter,
    ConjunctiveGoalAdapter,
    NoPlanFound,
    PlannerConfig,
    PlanError,
    RelaxedUnreachable,
    plan,
    plan_for_goal,
)
from .quests import (
    GroundedSubgoal,
    GroundingSet,
    LiftedSubgoal,
    MeaningLattice,
    VERB_EFFECTS,
)
from .world import GroundedAction, HUMAN, ROBOT, WorldState

log = logging.getLogger(__name__)

JUNK = "<other>"


def subgoal_condition(mg: GroundedSubgoal, state: WorldState) -> tuple:
    if mg.quest_type == "bring-me":
        return ("human-holding", mg.obj)
    if mg.quest_type == "move-to":
        rel = "in" if state.universe.spec(mg.target).has("has-inside") else "on"
        return ("pos", mg.obj, rel, mg.target)
    attr, want = VERB_EFFECTS[mg.verb][0]
    return ("flag", mg.obj, attr, want)


# ---------------------------------------------------------------------------
# Canonical robot plans for grounded subgoals
# ---------------------------------------------------------------------------


class MacroError(Exception):
    pass


def _open_chain(state: WorldState, obj: str, agent: str) -> list[GroundedAction]:
    """Actions opening whatever blocks access to ``obj`` (agent colocated)."""
    acts = []
    p = state.pos.get(obj)
    if p is None:
        return acts
    holder = p[1]
    uni = state.universe
    if uni.spec(holder).cls == "receptacle":
        rp = state.pos.get(holder)
        loc = rp[1]
        if rp[0] == "in" and uni.spec(loc).has("openable") and not state.has_flag(loc, "open"):
            acts.append(GroundedAction("open-loc", agent, (loc,)))
        if uni.spec(holder).has("openable") and not state.has_flag(holder, "open"):
            acts.append(GroundedAction("open-rec-at-loc", agent, (holder, loc)))
    else:
        if uni.spec(holder).has("openable") and not state.has_flag(holder, "open"):
            acts.append(GroundedAction("open-loc", agent, (holder,)))
    return acts


def _goto(state: WorldState, agent: str, loc: str) -> list[GroundedAction]:
    at = state.agent_at[agent]
    return [] if at == loc else [GroundedAction("move", agent, (at, loc))]


def _pick(state: WorldState, agent: str, obj: str) -> list[GroundedAction]:
    """Move to, expose, and pick up ``obj`` (agent's hands must be free)."""
    if state.holding.get(HUMAN) == obj:
        acts = _goto(state, agent, state.agent_at[HUMAN])
        acts.append(GroundedAction("take-from-human", agent, (obj,)))
        return acts
    loc = state.location_of(obj)
    if loc is None:
        raise MacroError(f"{obj} is out of reach")
    acts = _goto(state, agent, loc)
    cur = world.apply_all(state, acts)
    acts += _open_chain(cur, obj, agent)
    p = state.pos[obj]
    if state.universe.spec(p[1]).cls == "receptacle":
        acts.append(GroundedAction("pick-up-from-rec-at-loc", agent, (obj, p[1], loc)))
    else:
        acts.append(GroundedAction("pick-up-at-loc", agent, (obj, loc)))
    return acts


def _put_down_here(state: WorldState, agent: str) -> list[GroundedAction]:
    """Free the agent's hands at its current location."""
    held = state.holding.get(agent)
    if held is None:
        return []
    at = state.agent_at[agent]
    spec = state.universe.spec(at)
    acts: list[GroundedAction] = []
    if spec.has("has-ontop"):
        acts.append(GroundedAction("put-ontop-loc", agent, (held, at)))
        return acts
    if spec.has("openable") and not state.has_flag(at, "open"):
        acts.append(GroundedAction("open-loc", agent, (at,)))
    acts.append(GroundedAction("put-inside-loc", agent, (held, at)))
    return acts


def _place(state: WorldState, agent: str, obj: str, dest: str) -> list[GroundedAction]:
    """Put the held ``obj`` in/on ``dest`` (location or placed receptacle)."""
    uni = state.universe
    dspec = uni.spec(dest)
    acts: list[GroundedAction] = []
    if dspec.cls == "location":
        acts += _goto(state, agent, dest)
        if dspec.has("openable") and not state.has_flag(dest, "open"):
            acts.append(GroundedAction("open-loc", agent, (dest,)))
        schema = "put-inside-loc" if dspec.has("has-inside") else "put-ontop-loc"
        acts.append(GroundedAction(schema, agent, (obj, dest)))
        return acts
    dp = state.pos.get(dest)
    if dp is None:
        raise MacroError(f"{dest} is not placed anywhere")
    loc = dp[1]
    acts += _goto(state, agent, loc)
    cur = world.apply_all(state, acts)
    if dp[0] == "in" and uni.spec(loc).has("openable") and not cur.has_flag(loc, "open"):
        acts.append(GroundedAction("open-loc", agent, (loc,)))
        cur = world.apply(cur, acts[-1])
    if dspec.has("openable") and not cur.has_flag(dest, "open"):
        acts.append(GroundedAction("open-rec-at-loc", agent, (dest, loc)))
    schema = "put-inside-rec-at-loc" if dspec.has("has-inside") else "put-ontop-rec-at-loc"
    acts.append(GroundedAction(schema, agent, (obj, dest, loc)))
    return acts


APPLIANCE_FOR = {"heat": "stove", "cool": "refrigerator", "soak": "sink"}


def quest_macro(state: WorldState, mg: GroundedSubgoal,
                agent: str = ROBOT) -> list[GroundedAction]:
    """A canonical plan achieving ``mg``: fetch, act, hand over or place,
    then free the hands. Raises MacroError when a step is impossible."""
    uni = state.universe
    acts: list[GroundedAction] = []
    cur = state

    def do(more: list[GroundedAction]):
        nonlocal cur, acts
        for a in more:
            cur = world.apply(cur, a)
            acts.append(a)

    held = state.holding.get(agent)
    if held is not None:
        do(_put_down_here(cur, agent))

    if mg.quest_type == "bring-me":
        if cur.holding.get(HUMAN) is not None:
            do(_pick(cur, agent, cur.holding[HUMAN]))
            do(_put_down_here(cur, agent))
        do(_pick(cur, agent, mg.obj))
        do(_goto(cur, agent, cur.agent_at[HUMAN]))
        do([GroundedAction("bring-to-human", agent, (mg.obj,))])
        return acts

    if mg.quest_type == "move-to":
        if cur.pos.get(mg.obj, (None, None))[1] == mg.target:
            return acts
        do(_pick(cur, agent, mg.obj))
        do(_place(cur, agent, mg.obj, mg.target))
        return acts

    # change-state
    verb = mg.verb
    if mg.holds(cur):
        return acts
    if verb in APPLIANCE_FOR:
        do(_pick(cur, agent, mg.obj))
        appliance = uni.location_of_category(APPLIANCE_FOR[verb])
        do(_place(cur, agent, mg.obj, appliance))
        do([GroundedAction(f"{verb}-obj", agent, (mg.obj, appliance))])
        return acts
    if verb in ("slice", "clean"):
        tools = SLICE_TOOLS if verb == "slice" else CLEAN_TOOLS
        tool_ids = [o for c in tools for o in uni.instances_of(c)]
        if not tool_ids:
            raise MacroError(f"no tool available for {verb}")
        tool = sorted(tool_ids)[0]
        do(_pick(cur, agent, tool))
        if uni.spec(mg.obj).cls == "location":
            do(_goto(cur, agent, mg.obj))
            do([GroundedAction("clean-loc", agent, (tool, mg.obj))])
        else:
            loc = cur.location_of(mg.obj)
            if loc is None:
                raise MacroError(f"{mg.obj} is out of reach")
            do(_goto(cur, agent, loc))
            do(_open_chain(cur, mg.obj, agent))
            schema = "slice-obj" if verb == "slice" else "clean-obj-at-loc"
            do([GroundedAction(schema, agent, (mg.obj, tool, loc))])
        do(_put_down_here(cur, agent))
        return acts
    # open / close / toggle family
    if uni.spec(mg.obj).cls == "location":
        do(_goto(cur, agent, mg.obj))
        schema = {"open": "open-loc", "close": "close-loc",
                  "toggle-on": "toggle-on-loc", "toggle-off": "toggle-off-loc"}[verb]
        do([GroundedAction(schema, agent, (mg.obj,))])
        return acts
    loc = cur.location_of(mg.obj)
    if loc is None:
        raise MacroError(f"{mg.obj} is out of reach")
    do(_goto(cur, agent, loc))
    if verb in ("open", "close"):
        p = cur.pos.get(mg.obj)
        if p is not None and p[0] == "in" and uni.spec(p[1]).has("openable") \
                and not cur.has_flag(p[1], "open"):
            do([GroundedAction("open-loc", agent, (p[1],))])
        schema = "open-rec-at-loc" if verb == "open" else "close-rec-at-loc"
        do([GroundedAction(schema, agent, (mg.obj, loc))])
    else:
        do(_open_chain(cur, mg.obj, agent))
        schema = "toggle-on-obj-at-loc" if verb == "toggle-on" else "toggle-off-obj-at-loc"
        do([GroundedAction(schema, agent, (mg.obj, loc))])
    return acts


def unroll_subgoal(state: WorldState, mg: GroundedSubgoal,
                   config: PlannerConfig = PlannerConfig()) -> tuple[WorldState, list[GroundedAction]]:
    """Landing state after the robot achieves ``mg``, hands freed afterwards.

    Tries the canonical macro first, falls back to search.
    """
    if mg.holds(state):
        return state, []
    try:
        acts = quest_macro(state, mg)
        return world.apply_all(state, acts), acts
    except (MacroError, world.WorldError):
        pass
    p = plan(state, ConditionGoalAdapter(subgoal_condition(mg, state)), ROBOT, config)
    cur = world.apply_all(state, p.actions)
    acts = list(p.actions)
    extra = _put_down_here(cur, ROBOT)
    for a in extra:
        cur = world.apply(cur, a)
    return cur, acts + extra


# ---------------------------------------------------------------------------
# Memoized cost-to-go
# ---------------------------------------------------------------------------


class CostToGo:
    """V*: satisficing human cost-to-go toward a goal, memoized by the
    goal-relevant state digest."""

    def __init__(self, goal: GroundGoal, base: WorldState,
                 config: PlannerConfig = PlannerConfig()):
        self.goal = goal
        self.config = config
        self.base = base
        adapter = ConjunctiveGoalAdapter(goal)
        names = adapter.projection_names()
        uni = base.universe
        rel: set[str] = set()
        for name in names:
            rel.update(uni.instances_matching(name))
        self.relevant: frozenset[str] = frozenset(rel)
        self.cache: dict[tuple, Optional[int]] = {}
        self.failures = 0

    def _needs_open(self, state: WorldState, obj: str) -> bool:
        return state.universe.spec(obj).has("openable") and not state.has_flag(obj, "open")

    def digest(self, state: WorldState) -> tuple:
        """Goal-relevant projection of a state.

        Relevant objects carry their flags and a position key; holders that
        are not themselves relevant collapse to (location, openness) shape,
        since swapping equally-reachable anonymous holders cannot change the
        human's plan cost.
        """
        uni = state.universe
        items: list[tuple] = []
        for obj in sorted(self.relevant):
            p = state.pos.get(obj)
            if p is None:
                pos_key = state.held_by(obj)
            else:
                holder = p[1]
                if uni.spec(holder).cls == "location":
                    pos_key = ("L", holder, self._needs_open(state, holder))
                elif holder in self.relevant:
                    pos_key = ("R", p[0], holder)
                else:
                    hp = state.pos.get(holder)
                    if hp is None:  # inside a receptacle someone is carrying
                        pos_key = ("H", state.held_by(holder),
                                   self._needs_open(state, holder))
                    else:
                        pos_key = ("X", hp[1], self._needs_open(state, hp[1]),
                                   self._needs_open(state, holder))
            fl = state.flags.get(obj)
            items.append((obj, pos_key, tuple(sorted(fl)) if fl else ()))
        h_hold = state.holding.get(HUMAN)
        hold_key = h_hold if (h_hold is None or h_hold in self.relevant) else JUNK
        items.append(("@human", state.agent_at[HUMAN], hold_key))
        return tuple(items)

    def value(self, state: WorldState) -> Optional[int]:
        """Plan cost from ``state`` to the goal; None when planning fails."""
        key = self.digest(state)
        if key in self.cache:
            return self.cache[key]
        try:
            v = plan_for_goal(state, self.goal, HUMAN, self.config).total_cost
        except PlanError:
            v = None
            self.failures += 1
        self.cache[key] = v
        return v


@dataclass
class UtilityTable:
    """Per-grounding landing values and the derived per-meaning utilities."""

    v0: int
    bring: dict[str, Optional[int]]
    move: dict[tuple[str, str], Optional[int]]
    change: dict[tuple[str, str], Optional[int]]

    def landing_value(self, mg: GroundedSubgoal) -> Optional[int]:
        if mg.quest_type == "bring-me":
            return self.bring.get(mg.obj)
        if mg.quest_type == "move-to":
            return self.move.get((mg.obj, mg.target))
        return self.change.get((mg.obj, mg.verb))

    def mean_landing(self, A: GroundingSet) -> float:
        """Mean landing cost-to-go over A; failed landings count as v0."""
        total = 0.0
        n = 0
        for mg in A.members():
            v = self.landing_value(mg)
            total += self.v0 if v is None else v
            n += 1
        if n == 0:
            raise ValueError("empty grounding set")
        return total / n

    def utility(self, A: GroundingSet) -> float:
        return self.v0 - self.mean_landing(A)

    def useful_keys(self, quest_type: str, verb: Optional[str] = None) -> frozenset:
        """A(G) restricted to one quest type, as grounding keys: object ids
        (bring-me), (object, target) pairs (move-to), or (object, verb) pairs
        (change-state); members strictly reduce the human's cost-to-go."""
        if quest_type == "bring-me":
            return frozenset(o for o, v in self.bring.items() if v is not None and v < self.v0)
        if quest_type == "change-state":
            return frozenset((o, vb) for (o, vb), v in self.change.items()
                             if (verb is None or vb == verb) and v is not None and v < self.v0)
        return frozenset(p for p, v in self.move.items() if v is not None and v < self.v0)


def compute_utility_table(state: WorldState, goal: GroundGoal, quest_types,
                          config: PlannerConfig = PlannerConfig()) -> tuple[UtilityTable, CostToGo]:
    """Landing values for every grounded subgoal of the requested types.

    Pairs that provably leave the goal-relevant digest untouched (irrelevant
    object moved with no watched side effect) short-circuit to v0.
    """
    from .quests import position_capable_ids, verb_applicable

    ctg = CostToGo(goal, state, config)
    v0 = ctg.value(state)
    if v0 is None:
        raise NoPlanFound(f"{goal.name}: no plan from the quest state")
    uni = state.universe
    # relevant objects plus their holder chains: anything else can move
    # around without the goal-relevant digest noticing
    watched: set[str] = set(ctg.relevant)
    for obj in ctg.relevant:
        cur = state.pos.get(obj)
        depth = 0
        while cur is not None and depth < 3:
            watched.add(cur[1])
            cur = state.pos.get(cur[1])
            depth += 1

    def opens_of(obj: str) -> set[str]:
        """Containers the robot would open to reach/fill ``obj``."""
        out: set[str] = set()
        p = state.pos.get(obj)
        chain = [obj]
        if p is not None:
            chain.append(p[1])
            pp = state.pos.get(p[1])
            if pp is not None:
                chain.append(pp[1])
        for o in chain:
            if uni.spec(o).has("openable") and not state.has_flag(o, "open"):
                out.add(o)
        return out

    bring: dict[str, Optional[int]] = {}
    move: dict[tuple[str, str], Optional[int]] = {}
    change: dict[tuple[str, str], Optional[int]] = {}

    def landing_value(mg: GroundedSubgoal) -> Optional[int]:
        try:
            landing, _ = unroll_subgoal(state, mg, config)
        except (PlanError, world.WorldError):
            return None
        return ctg.value(landing)

    if "bring-me" in quest_types:
        for obj in uni.movables:
            bring[obj] = landing_value(GroundedSubgoal("bring-me", obj))
    if "move-to" in quest_types:
        targets = position_capable_ids(state)
        tgt_open_cost = {t: opens_of(t) for t in targets}
        for obj in uni.movables:
            obj_is_rec = uni.spec(obj).cls == "receptacle"
            obj_watched = obj in watched or bool(opens_of(obj) & watched) \
                or state.holding.get(HUMAN) == obj
            for tgt in targets:
                if tgt == obj:
                    continue
                if obj_is_rec and uni.spec(tgt).cls != "location":
                    move[(obj, tgt)] = None  # unreachable: receptacles rest at locations
                    continue
                if not obj_watched and tgt not in watched and not (tgt_open_cost[tgt] & watched):
                    move[(obj, tgt)] = v0
                    continue
                move[(obj, tgt)] = landing_value(GroundedSubgoal("move-to", obj, target=tgt))
    if "change-state" in quest_types:
        for obj in uni.movables:
            cat = uni.category(obj)
            for verb in sorted(VERB_EFFECTS):
                if verb_applicable(cat, verb):
                    change[(obj, verb)] = landing_value(
                        GroundedSubgoal("change-state", obj, verb=verb))

    return UtilityTable(v0=v0, bring=bring, move=move, change=change), ctg
