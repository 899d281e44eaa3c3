"""Forward search planning: greedy best-first with a delete-relaxation-style
heuristic over a projected sub-universe.

Search runs on a compact integer encoding of the state restricted to objects
that matter for the goal (goal-category instances, their holders, required
tools, every location, and anything held). Returned plans reference real
object ids, so they replay through the full world model; callers re-validate
them there.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

from . import catalog, world
from .catalog import CATALOG, CLEAN_TOOLS, COOL_LOCATIONS, HEAT_LOCATIONS, SLICE_TOOLS, SOAK_LOCATIONS
from .goals import Conjunct, GroundGoal
from .world import GroundedAction, HUMAN, ROBOT, WorldState

HELD_HUMAN = -2
HELD_ROBOT = -3

FLAG_BITS = {name: 1 << i for i, name in enumerate(catalog.ATTRIBUTES)}


class PlanError(Exception):
    pass


class NoPlanFound(PlanError):
    pass


class RelaxedUnreachable(PlanError):
    """The goal is unsatisfiable even ignoring delete effects."""


@dataclass(frozen=True)
class PlannerConfig:
    node_budget: int = 60000
    heuristic: str = "ff-relaxed"  # or "conjunct-count"


@dataclass(frozen=True)
class Plan:
    actions: tuple[GroundedAction, ...]
    total_cost: int

    def __len__(self) -> int:
        return len(self.actions)


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------


class Projection:
    """Static data for a planning sub-universe: specs indexed by position."""

    def __init__(self, state: WorldState, ids: tuple[str, ...]):
        self.universe = state.universe
        self.ids = ids
        self.idx = {o: i for i, o in enumerate(ids)}
        n = len(ids)
        specs = [state.universe.spec(o) for o in ids]
        self.category = [s.name for s in specs]
        self.is_loc = [s.cls == "location" for s in specs]
        self.is_rec = [s.cls == "receptacle" for s in specs]
        self.movable = [s.cls != "location" for s in specs]
        self.openable = [s.has("openable") for s in specs]
        self.has_inside = [s.has("has-inside") for s in specs]
        self.has_ontop = [s.has("has-ontop") for s in specs]
        self.toggleable = [s.has("toggleable") for s in specs]
        self.cookable = [s.has("cookable") for s in specs]
        self.freezable = [s.has("freezable") for s in specs]
        self.sliceable = [s.has("sliceable") for s in specs]
        self.soakable = [s.has("soakable") for s in specs]
        self.knife = [s.name in SLICE_TOOLS for s in specs]
        self.cleantool = [s.name in CLEAN_TOOLS for s in specs]
        self.heatloc = [s.name in HEAT_LOCATIONS for s in specs]
        self.coolloc = [s.name in COOL_LOCATIONS for s in specs]
        self.soakloc = [s.name in SOAK_LOCATIONS for s in specs]
        self.locs = [i for i in range(n) if self.is_loc[i]]
        self.movs = [i for i in range(n) if self.movable[i]]

    def encode(self, state: WorldState) -> tuple:
        pos: list[int] = []
        flags: list[int] = []
        for i, o in enumerate(self.ids):
            fl = 0
            for a in state.flags.get(o, ()):
                fl |= FLAG_BITS[a]
            flags.append(fl)
            if not self.movable[i]:
                pos.append(-1)
                continue
            p = state.pos.get(o)
            if p is not None:
                pos.append(self.idx[p[1]])
            elif state.holding.get(HUMAN) == o:
                pos.append(HELD_HUMAN)
            elif state.holding.get(ROBOT) == o:
                pos.append(HELD_ROBOT)
            else:
                raise PlanError(f"{o}: neither placed nor held")
        h_hold = state.holding.get(HUMAN)
        r_hold = state.holding.get(ROBOT)
        return (
            self.idx[state.agent_at[HUMAN]],
            self.idx[state.agent_at[ROBOT]],
            self.idx[h_hold] if h_hold in self.idx else (-1 if h_hold is None else -9),
            self.idx[r_hold] if r_hold in self.idx else (-1 if r_hold is None else -9),
            tuple(pos),
            tuple(flags),
        )

    def loc_of(self, st: tuple, i: int) -> int:
        """Location index an object rests at; agent location if held."""
        pos = st[4]
        cur = i
        for _ in range(4):
            if self.is_loc[cur]:
                return cur
            p = pos[cur]
            if p == HELD_HUMAN:
                return st[0]
            if p == HELD_ROBOT:
                return st[1]
            cur = p
        raise PlanError("position chain too deep")

    def open_bit(self, st: tuple, i: int) -> bool:
        return bool(st[5][i] & 1) or not self.openable[i]

    def chain_open_cost(self, st: tuple, i: int) -> int:
        """Closed openable containers between an object and free space."""
        pos = st[4]
        cost = 0
        cur = pos[i]
        for _ in range(3):
            if cur in (HELD_HUMAN, HELD_ROBOT):
                return cost
            if not self.open_bit(st, cur):
                cost += 1
            if self.is_loc[cur]:
                return cost
            cur = pos[cur]
        return cost


def build_projection(state: WorldState, names: set[str], extra_ids: set[str]) -> Projection:
    """Project onto instances of ``names`` plus ``extra_ids``, their holders,
    every location, and whatever the agents hold."""
    uni = state.universe
    ids: set[str] = set(uni.locations)
    for name in names:
        ids.update(uni.instances_matching(name))
    ids.update(o for o in extra_ids if o in uni)
    for agent in (HUMAN, ROBOT):
        held = state.holding.get(agent)
        if held:
            ids.add(held)
    # holders of everything included (two levels suffice: obj -> rec -> loc)
    for _ in range(2):
        for o in list(ids):
            p = state.pos.get(o)
            if p:
                ids.add(p[1])
    return Projection(state, tuple(sorted(ids)))


# ---------------------------------------------------------------------------
# Successor generation (mirrors world.valid_actions for one agent, meta
# actions excluded)
# ---------------------------------------------------------------------------


def successors(P: Projection, st: tuple, agent: str):
    """Yield (action_key, successor_state) deterministically."""
    human = agent == HUMAN
    at = st[0] if human else st[1]
    held = st[2] if human else st[3]
    held_mark = HELD_HUMAN if human else HELD_ROBOT
    pos = st[4]
    flags = st[5]
    n = len(pos)

    def mk(new_pos=None, new_flags=None, new_at=None, new_hold=None, other_hold=None):
        h_at, r_at, h_hold, r_hold = st[0], st[1], st[2], st[3]
        if new_at is not None:
            if human:
                h_at = new_at
            else:
                r_at = new_at
        if new_hold is not None:
            if human:
                h_hold = new_hold
            else:
                r_hold = new_hold
        if other_hold is not None:
            if human:
                r_hold = other_hold
            else:
                h_hold = other_hold
        return (h_at, r_at, h_hold, r_hold,
                st[4] if new_pos is None else tuple(new_pos),
                st[5] if new_flags is None else tuple(new_flags))

    def set_pos(i, v):
        p = list(pos)
        p[i] = v
        return p

    def set_flag(i, bit, on):
        f = list(flags)
        f[i] = (f[i] | bit) if on else (f[i] & ~bit)
        return f

    loc_open = P.open_bit(st, at)
    direct = [i for i in range(n) if pos[i] == at]
    recs_here = [i for i in direct if P.is_rec[i]]

    # reachable = objects the agent could touch at this location
    reachable = list(direct) if loc_open else []
    open_recs = []
    for r in recs_here:
        if P.open_bit(st, r) and loc_open:
            open_recs.append(r)
    for r in open_recs:
        reachable.extend(i for i in range(n) if pos[i] == r)

    if not human:
        # human interaction
        if held >= 0 and st[2] == -1 and st[0] == at:
            yield ("bring-to-human", (held,)), mk(new_pos=set_pos(held, HELD_HUMAN),
                                                  new_hold=-1, other_hold=held)
        if held == -1 and st[2] >= 0 and st[0] == at:
            o = st[2]
            yield ("take-from-human", (o,)), mk(new_pos=set_pos(o, HELD_ROBOT),
                                                new_hold=o, other_hold=-1)

    if held == -1 and loc_open:
        for i in direct:
            yield ("pick-up-at-loc", (i, at)), mk(new_pos=set_pos(i, held_mark), new_hold=i)
    if held == -1:
        for r in open_recs:
            for i in range(n):
                if pos[i] == r:
                    yield ("pick-up-from-rec-at-loc", (i, r, at)), mk(
                        new_pos=set_pos(i, held_mark), new_hold=i)

    if held >= 0:
        if P.has_inside[at] and loc_open:
            yield ("put-inside-loc", (held, at)), mk(new_pos=set_pos(held, at), new_hold=-1)
        if P.has_ontop[at]:
            yield ("put-ontop-loc", (held, at)), mk(new_pos=set_pos(held, at), new_hold=-1)
        if not P.is_rec[held]:
            for r in recs_here:
                if r == held or (pos[r] == at and not loc_open):
                    continue
                if P.has_inside[r] and P.open_bit(st, r) and loc_open:
                    yield ("put-inside-rec-at-loc", (held, r, at)), mk(
                        new_pos=set_pos(held, r), new_hold=-1)
                if P.has_ontop[r] and loc_open:
                    yield ("put-ontop-rec-at-loc", (held, r, at)), mk(
                        new_pos=set_pos(held, r), new_hold=-1)

    if P.openable[at]:
        if flags[at] & 1:
            yield ("close-loc", (at,)), mk(new_flags=set_flag(at, 1, False))
        else:
            yield ("open-loc", (at,)), mk(new_flags=set_flag(at, 1, True))
    for r in recs_here:
        if not P.openable[r] or not loc_open:
            continue
        if flags[r] & 1:
            yield ("close-rec-at-loc", (r, at)), mk(new_flags=set_flag(r, 1, False))
        else:
            yield ("open-rec-at-loc", (r, at)), mk(new_flags=set_flag(r, 1, True))

    tog = FLAG_BITS["toggled"]
    if P.toggleable[at]:
        if flags[at] & tog:
            yield ("toggle-off-loc", (at,)), mk(new_flags=set_flag(at, tog, False))
        else:
            yield ("toggle-on-loc", (at,)), mk(new_flags=set_flag(at, tog, True))
    for i in reachable:
        if P.toggleable[i]:
            if flags[i] & tog:
                yield ("toggle-off-obj-at-loc", (i, at)), mk(new_flags=set_flag(i, tog, False))
            else:
                yield ("toggle-on-obj-at-loc", (i, at)), mk(new_flags=set_flag(i, tog, True))

    ck, fz, sk = FLAG_BITS["cooked"], FLAG_BITS["frozen"], FLAG_BITS["soaked"]
    if P.heatloc[at]:
        for i in direct:
            if P.cookable[i] and not flags[i] & ck:
                f = set_flag(i, ck, True)
                f[i] &= ~fz
                yield ("heat-obj", (i, at)), mk(new_flags=f)
    if P.coolloc[at]:
        for i in direct:
            if P.freezable[i] and not flags[i] & fz:
                yield ("cool-obj", (i, at)), mk(new_flags=set_flag(i, fz, True))
    if P.soakloc[at]:
        for i in direct:
            if P.soakable[i] and not flags[i] & sk:
                yield ("soak-obj", (i, at)), mk(new_flags=set_flag(i, sk, True))

    sl = FLAG_BITS["sliced"]
    if held >= 0 and P.knife[held]:
        for i in reachable:
            if P.sliceable[i] and not flags[i] & sl:
                yield ("slice-obj", (i, held, at)), mk(new_flags=set_flag(i, sl, True))
    du, stn = FLAG_BITS["dusty"], FLAG_BITS["stained"]
    if held >= 0 and P.cleantool[held]:
        for i in reachable:
            if flags[i] & (du | stn):
                f = list(flags)
                f[i] &= ~(du | stn)
                yield ("clean-obj-at-loc", (i, held, at)), mk(new_flags=f)
        if flags[at] & (du | stn):
            f = list(flags)
            f[at] &= ~(du | stn)
            yield ("clean-loc", (held, at)), mk(new_flags=f)

    for loc in P.locs:
        if loc != at:
            yield ("move", (at, loc)), mk(new_at=loc)


def decode_action(P: Projection, agent: str, key: tuple) -> GroundedAction:
    schema, args = key
    return GroundedAction(schema=schema, agent=agent, args=tuple(P.ids[a] for a in args))


# ---------------------------------------------------------------------------
# Goal adapters
# ---------------------------------------------------------------------------


class CompiledConjunct:
    """One goal conjunct bound to projection indices."""

    def __init__(self, P: Projection, c: Conjunct):
        self.quant = c.quant
        self.rel = c.rel
        self.xs = [P.idx[o] for o in P.universe.instances_matching(c.test)]
        self.y_ref = c.y_ref
        self.y_opts: Optional[list[int]] = None
        if c.y_test:
            self.y_opts = [P.idx[o] for o in P.universe.instances_matching(c.y_test)]
        self.outer: Optional[list[int]] = None
        if c.outer_test:
            self.outer = [P.idx[o] for o in P.universe.instances_matching(c.outer_test)]
        self.x_flags = [(FLAG_BITS[a], v) for a, v in c.x_flags]
        self.y_flags = [(FLAG_BITS[a], v) for a, v in c.y_flags]

    def _x_ok(self, st: tuple, x: int, y: Optional[int]) -> bool:
        if y is not None and st[4][x] != y:
            return False
        fl = st[5][x]
        for bit, v in self.x_flags:
            if bool(fl & bit) != v:
                return False
        return True

    def _y_ok(self, st: tuple, y: int) -> bool:
        fl = st[5][y]
        for bit, v in self.y_flags:
            if bool(fl & bit) != v:
                return False
        return True

    def holds(self, st: tuple, env: dict[str, int]) -> bool:
        if self.quant == "forall_exists":
            if not self.xs:
                return False
            pos = st[4]
            for y in self.outer:
                if not any(pos[x] == y for x in self.xs):
                    return False
            return True
        ys: list[Optional[int]]
        if self.y_ref is not None:
            ys = [env[self.y_ref]]
        elif self.y_opts is not None:
            ys = list(self.y_opts)
        else:
            ys = [None]
        if self.quant == "forall":
            for y in ys:
                if all(self._x_ok(st, x, y) and (y is None or not self.xs or self._y_ok(st, y))
                       for x in self.xs):
                    return True
            return False
        for y in ys:
            if any(self._x_ok(st, x, y) and (y is None or self._y_ok(st, y)) for x in self.xs):
                return True
        return False


class AgentCtx:
    """The planning agent's view of a state: location, held index, held mark."""

    __slots__ = ("loc", "held", "mark")

    def __init__(self, st: tuple, agent_is_human: bool):
        self.loc = st[0] if agent_is_human else st[1]
        self.held = st[2] if agent_is_human else st[3]
        self.mark = HELD_HUMAN if agent_is_human else HELD_ROBOT


def _pick_estimate(P: Projection, st: tuple, x: int, ctx: AgentCtx) -> int:
    """Relaxed cost for the agent to come to hold x (0 when already held).

    Deliberately ignores the hands-full put-down step: charging it per atom
    would penalize picking and stall greedy search on plateaus.
    """
    pos = st[4]
    if pos[x] == ctx.mark:
        return 0
    xloc = P.loc_of(st, x)
    cost = 1 if xloc != ctx.loc else 0
    if pos[x] in (HELD_HUMAN, HELD_ROBOT):
        return cost + 1  # take from the other agent
    return cost + P.chain_open_cost(st, x) + 1


_BIT_NAME = {v: k for k, v in FLAG_BITS.items()}

_APPLIANCE_FLAGS = ("cooked", "frozen", "soaked")


def _tool_fetch(P: Projection, st: tuple, ctx: AgentCtx, knife: bool) -> int:
    """Cheapest way to get a knife or cleaning tool into hand (0 when held)."""
    pred = P.knife if knife else P.cleantool
    if ctx.held >= 0 and pred[ctx.held]:
        return 0
    tools = [i for i in P.movs if pred[i]]
    if not tools:
        return 99
    return min(_pick_estimate(P, st, t, ctx) for t in tools)


def _object_estimate(P: Projection, st: tuple, x: int, y: Optional[int],
                     x_flags, ctx: AgentCtx) -> int:
    """Relaxed cost to give object x its required flags and final position.

    Walks one itinerary (fetch once, visit appliances, apply tool verbs,
    place at the target) instead of summing independent per-atom costs, so
    the estimate decreases monotonically along sensible plans.
    """
    fl = st[5][x]
    need = [(bit, v) for bit, v in x_flags if bool(fl & bit) != v]
    need_place = y is not None and st[4][x] != y
    if not need and not need_place:
        return 0

    cost = 0
    vheld = st[4][x] == ctx.mark
    vloc = ctx.loc if vheld else P.loc_of(st, x)
    fetched = vheld
    displaced = vheld
    chain = 0 if vheld else P.chain_open_cost(st, x)

    in_place_flags: list[tuple[int, bool]] = []
    for bit, v in need:
        name = _BIT_NAME[bit]
        if name in _APPLIANCE_FLAGS and v:
            apps = [i for i in P.locs if (P.heatloc[i] if name == "cooked" else
                                          P.coolloc[i] if name == "frozen" else P.soakloc[i])]
            if not apps:
                return 99
            app = apps[0] if vloc not in apps else vloc
            at_app_direct = (not vheld) and not displaced and st[4][x] == app
            if not at_app_direct:
                if not vheld:
                    cost += (chain if not fetched else 0) + 1  # open chain + pick
                    fetched = True
                if vloc != app:
                    cost += 1
                if not P.open_bit(st, app):
                    cost += 1
                cost += 1  # put at the appliance
                vheld = False
                vloc = app
                displaced = True
            cost += 1  # the verb itself
        else:
            in_place_flags.append((bit, v))

    cleaned = False
    for bit, v in in_place_flags:
        name = _BIT_NAME[bit]
        if name == "sliced":
            cost += _tool_fetch(P, st, ctx, knife=True) + 1
            if vloc != ctx.loc:
                cost += 1
        elif name in ("dusty", "stained"):
            if cleaned:
                continue  # one clean action clears both
            cleaned = True
            cost += _tool_fetch(P, st, ctx, knife=False) + 1
            if vloc != ctx.loc:
                cost += 1
        else:  # open / toggled and their negations
            cost += 1
            if vloc != ctx.loc and not vheld:
                cost += 1

    if y is not None and (st[4][x] != y or displaced):
        if not vheld:
            cost += (chain if not fetched else 0) + 1
            fetched = True
        yloc = P.loc_of(st, y)
        if vloc != yloc:
            cost += 1
        if not P.open_bit(st, y):
            cost += 1
        if not P.is_loc[y] and not P.open_bit(st, yloc):
            cost += 1
        cost += 1  # put
    return cost


class ConjunctiveGoalAdapter:
    """A ground goal compiled for the planner: bindings over shared vars plus
    per-conjunct checks and relaxed cost estimates."""

    def __init__(self, goal: GroundGoal):
        self.goal = goal

    # names that must be in the projection
    def projection_names(self) -> set[str]:
        names: set[str] = set()
        needs_knife = needs_clean = False
        for c in self.goal.resolved_conjuncts():
            names.add(c.test)
            if c.y_test:
                names.add(c.y_test)
            if c.outer_test:
                names.add(c.outer_test)
            for a, v in c.x_flags + c.y_flags:
                if a == "sliced" and v:
                    needs_knife = True
                if a in ("dusty", "stained") and not v:
                    needs_clean = True
        for _, t in self.goal.resolved_shared():
            names.add(t)
        if needs_knife:
            names.update(SLICE_TOOLS)
        if needs_clean:
            names.update(CLEAN_TOOLS)
        return names

    def compile(self, P: Projection, agent: str):
        shared = self.goal.resolved_shared()
        var_names = [v for v, _ in shared]
        domains = [[P.idx[o] for o in P.universe.instances_matching(t)] for _, t in shared]
        conjs = [CompiledConjunct(P, c) for c in self.goal.resolved_conjuncts()]
        bindings: list[dict[str, int]] = []
        for combo in product(*domains) if domains else [()]:
            if len(set(combo)) == len(combo):
                bindings.append(dict(zip(var_names, combo)))
        if not bindings:
            raise RelaxedUnreachable(f"{self.goal.name}: no feasible binding for shared objects")
        knives = any(P.knife[i] for i in P.movs)
        cleaners = any(P.cleantool[i] for i in P.movs)
        for c in conjs:
            if c.quant == "forall_exists" and (not c.xs or len(c.xs) < len(c.outer)):
                raise RelaxedUnreachable(f"{self.goal.name}: too few fillers for every holder")
            if c.quant == "exists" and not c.xs:
                raise RelaxedUnreachable(f"{self.goal.name}: nothing satisfies an exists conjunct")
            if c.y_opts is not None and not c.y_opts:
                raise RelaxedUnreachable(f"{self.goal.name}: no instance for a target category")
            if c.xs:
                for bit, v in c.x_flags + c.y_flags:
                    if bit == FLAG_BITS["sliced"] and v and not knives:
                        raise RelaxedUnreachable(f"{self.goal.name}: no knife in the scene")
                    if bit in (FLAG_BITS["dusty"], FLAG_BITS["stained"]) and not v and not cleaners:
                        raise RelaxedUnreachable(f"{self.goal.name}: no cleaning tool in the scene")

        agent_is_human = agent == HUMAN

        def holds(st: tuple) -> bool:
            return any(all(c.holds(st, env) for c in conjs) for env in bindings)

        def heuristic(st: tuple) -> int:
            ctx = AgentCtx(st, agent_is_human)
            best = None
            for env in bindings:
                total = 0
                for c in conjs:
                    if c.holds(st, env):
                        continue
                    total += _conjunct_estimate(P, st, c, env, ctx)
                if best is None or total < best:
                    best = total
                    if best == 0:
                        break
            return best if best is not None else 0

        def count_unsat(st: tuple) -> int:
            return min(
                sum(0 if c.holds(st, env) else 1 for c in conjs) for env in bindings
            )

        return holds, heuristic, count_unsat


def _conjunct_estimate(P: Projection, st: tuple, c: CompiledConjunct,
                       env: dict[str, int], ctx: AgentCtx) -> int:
    def atom_cost(x: int, y: Optional[int]) -> int:
        return _object_estimate(P, st, x, y, c.x_flags, ctx)

    def y_cost(y: int) -> int:
        return _object_estimate(P, st, y, None, c.y_flags, ctx)

    if c.quant == "forall_exists":
        total = 0
        pos = st[4]
        for y in c.outer:
            if not any(pos[x] == y for x in c.xs):
                total += min((atom_cost(x, y) for x in c.xs), default=99)
        return total

    if c.y_ref is not None:
        ys: list[Optional[int]] = [env[c.y_ref]]
    elif c.y_opts is not None:
        ys = list(c.y_opts)
    else:
        ys = [None]

    def for_y(y: Optional[int]) -> int:
        if c.quant == "forall":
            total = sum(atom_cost(x, y) for x in c.xs if not c._x_ok(st, x, y))
            if c.xs and y is not None:
                total += y_cost(y)
            return total
        cands = [atom_cost(x, y) + (y_cost(y) if y is not None else 0) for x in c.xs]
        return min(cands) if cands else 99

    return min((for_y(y) for y in ys), default=99)


class ConditionGoalAdapter:
    """Adapter for simple subgoal conditions.

    kinds: ('human-holding', x) | ('pos', x, rel, y) | ('flag', x, attr, want)
    """

    def __init__(self, kind: tuple):
        self.kind = kind

    def projection_names(self) -> set[str]:
        k = self.kind
        names: set[str] = set()
        if k[0] == "flag":
            if k[2] == "sliced" and k[3]:
                names.update(SLICE_TOOLS)
            if k[2] in ("dusty", "stained") and not k[3]:
                names.update(CLEAN_TOOLS)
        return names

    def projection_ids(self) -> set[str]:
        k = self.kind
        ids = {k[1]}
        if k[0] == "pos":
            ids.add(k[3])
        return ids

    def compile(self, P: Projection, agent: str):
        k = self.kind
        agent_is_human = agent == HUMAN
        uni = P.universe

        if k[0] == "pos":
            xs = uni.spec(k[1])
            ys = uni.spec(k[3])
            if xs.cls == "receptacle" and ys.cls != "location":
                raise RelaxedUnreachable("receptacles may only rest at locations")
            if ys.cls not in ("location", "receptacle"):
                raise RelaxedUnreachable(f"{k[3]} cannot hold objects")
            need = "has-inside" if k[2] == "in" else "has-ontop"
            if not ys.has(need):
                raise RelaxedUnreachable(f"{k[3]} lacks {need}")
        if k[0] == "flag":
            spec = uni.spec(k[1])
            if not spec.has(catalog.ATTRIBUTE_META[k[2]]):
                raise RelaxedUnreachable(f"{k[1]} does not support {k[2]}")
            if k[2] == "sliced" and k[3] and not any(
                    uni.instances_matching(t) for t in SLICE_TOOLS):
                raise RelaxedUnreachable("no knife in the scene")
            if k[2] in ("dusty", "stained") and not k[3] and not any(
                    uni.instances_matching(t) for t in CLEAN_TOOLS):
                raise RelaxedUnreachable("no cleaning tool in the scene")

        if k[0] == "human-holding":
            x = P.idx[k[1]]

            def holds(st: tuple) -> bool:
                return st[2] == x

            def heuristic(st: tuple) -> int:
                if st[2] == x:
                    return 0
                ctx = AgentCtx(st, agent_is_human)
                cost = _pick_estimate(P, st, x, ctx)
                xloc = ctx.loc if st[4][x] == ctx.mark else P.loc_of(st, x)
                if xloc != st[0]:
                    cost += 1
                if st[2] >= 0:
                    cost += 2  # free the human's hands first
                return cost + 1

        elif k[0] == "pos":
            x, rel, y = P.idx[k[1]], k[2], P.idx[k[3]]

            def holds(st: tuple) -> bool:
                return st[4][x] == y

            def heuristic(st: tuple) -> int:
                return _object_estimate(P, st, x, y, (), AgentCtx(st, agent_is_human))

        elif k[0] == "flag":
            x, attr, want = P.idx[k[1]], k[2], k[3]
            bit = FLAG_BITS[attr]

            def holds(st: tuple) -> bool:
                return bool(st[5][x] & bit) == want

            def heuristic(st: tuple) -> int:
                return _object_estimate(P, st, x, None, ((bit, want),),
                                        AgentCtx(st, agent_is_human))

        else:
            raise PlanError(f"unknown condition kind {k!r}")

        def count_unsat(st: tuple) -> int:
            return 0 if holds(st) else 1

        return holds, heuristic, count_unsat


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def plan(state: WorldState, adapter, agent: str,
         config: PlannerConfig = PlannerConfig()) -> Plan:
    """Greedy best-first search; returns a plan or raises.

    Deterministic: candidates are ordered by heuristic value, then insertion.
    """
    extra = adapter.projection_ids() if hasattr(adapter, "projection_ids") else set()
    P = build_projection(state, adapter.projection_names(), extra)
    start = P.encode(state)
    holds, heuristic, count_unsat = adapter.compile(P, agent)
    h_fn = heuristic if config.heuristic == "ff-relaxed" else count_unsat

    if holds(start):
        return Plan(actions=(), total_cost=0)

    came: dict[tuple, tuple[tuple, tuple]] = {}
    seen = {start}
    counter = 0
    frontier: list[tuple[int, int, tuple]] = [(h_fn(start), counter, start)]
    expansions = 0

    while frontier:
        _, _, st = heapq.heappop(frontier)
        expansions += 1
        if expansions > config.node_budget:
            raise NoPlanFound(f"node budget exhausted ({config.node_budget})")
        for key, nxt in successors(P, st, agent):
            if nxt in seen:
                continue
            seen.add(nxt)
            came[nxt] = (st, key)
            if holds(nxt):
                actions = []
                cur = nxt
                while cur != start:
                    prev, k = came[cur]
                    actions.append(decode_action(P, agent, k))
                    cur = prev
                actions.reverse()
                return Plan(actions=tuple(actions), total_cost=len(actions))
            counter += 1
            heapq.heappush(frontier, (h_fn(nxt), counter, nxt))

    raise NoPlanFound("search space exhausted")


def check_relaxed_feasibility(state: WorldState, goal: GroundGoal) -> None:
    """Fail fast on goals unsatisfiable even ignoring deletes.

    Covers: empty shared domains, missing exists/target instances, fill
    capacity (every-holder conjuncts and exists conjuncts with distinct
    targets both consume exclusive instances), conflicting forall targets,
    and missing tools for slice/clean effects.
    """
    uni = state.universe
    conjs = goal.resolved_conjuncts()
    shared = goal.resolved_shared()

    by_test: dict[str, int] = {}
    for _, t in shared:
        by_test[t] = by_test.get(t, 0) + 1
    for t, k in by_test.items():
        if len(uni.instances_matching(t)) < k:
            raise RelaxedUnreachable(f"{goal.name}: needs {k} distinct {t}, scene has fewer")

    knives = bool(uni.instances_matching("knife") or uni.instances_matching("carving knife"))
    cleaners = any(uni.instances_matching(c) for c in CLEAN_TOOLS)

    fe_demand: dict[str, int] = {}
    exists_targets: dict[str, set] = {}
    forall_targets: dict[str, set] = {}
    for c in conjs:
        n_x = len(uni.instances_matching(c.test))
        for attr, v in c.x_flags + c.y_flags:
            if attr == "sliced" and v and n_x and not knives:
                raise RelaxedUnreachable(f"{goal.name}: no knife in the scene")
            if attr in ("dusty", "stained") and not v and not cleaners:
                raise RelaxedUnreachable(f"{goal.name}: no cleaning tool in the scene")
        if c.quant == "forall_exists":
            outer = len(uni.instances_matching(c.outer_test))
            fe_demand[c.test] = fe_demand.get(c.test, 0) + outer
            if n_x == 0:
                raise RelaxedUnreachable(f"{goal.name}: no {c.test} to distribute")
            continue
        if c.y_test and not uni.instances_matching(c.y_test):
            raise RelaxedUnreachable(f"{goal.name}: no instance of target {c.y_test}")
        target = c.y_ref if c.y_ref else (("cat", c.y_test) if c.y_test else None)
        if c.quant == "exists":
            if n_x == 0:
                raise RelaxedUnreachable(f"{goal.name}: no instance of {c.test}")
            if c.rel and target is not None:
                exists_targets.setdefault(c.test, set()).add(target)
        elif c.rel and target is not None and n_x:
            forall_targets.setdefault(c.test, set()).add(target)

    for test, demand in fe_demand.items():
        if len(uni.instances_matching(test)) < demand:
            raise RelaxedUnreachable(f"{goal.name}: {test} cannot fill {demand} holders")
    for test, targets in exists_targets.items():
        if len(uni.instances_matching(test)) < len(targets):
            raise RelaxedUnreachable(
                f"{goal.name}: {test} needed at {len(targets)} distinct targets")
    for test, targets in forall_targets.items():
        if len(targets) > 1:
            raise RelaxedUnreachable(f"{goal.name}: {test} pinned to conflicting targets")


def plan_for_goal(state: WorldState, goal: GroundGoal, agent: str = HUMAN,
                  config: PlannerConfig = PlannerConfig()) -> Plan:
    check_relaxed_feasibility(state, goal)
    return plan(state, ConjunctiveGoalAdapter(goal), agent, config)


class SequentialSegmentAdapter:
    """Goal adapter for one conjunct while keeping earlier ones intact.

    Holds when conjuncts[0..idx] all hold under the fixed shared binding.
    """

    def __init__(self, goal: GroundGoal, idx: int, env_names: dict[str, str]):
        self.goal = goal
        self.idx = idx
        self.env_names = env_names

    def projection_names(self) -> set[str]:
        names: set[str] = set()
        needs_knife = needs_clean = False
        conjs = self.goal.resolved_conjuncts()
        for c in conjs[: self.idx + 1]:
            names.add(c.test)
            if c.y_test:
                names.add(c.y_test)
            if c.outer_test:
                names.add(c.outer_test)
            for a, v in c.x_flags + c.y_flags:
                if a == "sliced" and v:
                    needs_knife = True
                if a in ("dusty", "stained") and not v:
                    needs_clean = True
        if needs_knife:
            names.update(SLICE_TOOLS)
        if needs_clean:
            names.update(CLEAN_TOOLS)
        return names

    def projection_ids(self) -> set[str]:
        return set(self.env_names.values())

    def compile(self, P: Projection, agent: str):
        conjs = [CompiledConjunct(P, c) for c in self.goal.resolved_conjuncts()[: self.idx + 1]]
        env = {v: P.idx[o] for v, o in self.env_names.items()}
        agent_is_human = agent == HUMAN

        def holds(st: tuple) -> bool:
            return all(c.holds(st, env) for c in conjs)

        def heuristic(st: tuple) -> int:
            ctx = AgentCtx(st, agent_is_human)
            return sum(
                _conjunct_estimate(P, st, c, env, ctx)
                for c in conjs if not c.holds(st, env)
            )

        def count_unsat(st: tuple) -> int:
            return sum(0 if c.holds(st, env) else 1 for c in conjs)

        return holds, heuristic, count_unsat


def choose_binding(state: WorldState, goal: GroundGoal) -> dict[str, str]:
    """Fix the shared existential binding for sequential trajectory planning:
    most conjuncts already satisfied, then lowest relaxed cost, then first."""
    adapter = ConjunctiveGoalAdapter(goal)
    P = build_projection(state, adapter.projection_names(), set())
    st = P.encode(state)
    shared = goal.resolved_shared()
    var_names = [v for v, _ in shared]
    domains = [[P.idx[o] for o in P.universe.instances_matching(t)] for _, t in shared]
    conjs = [CompiledConjunct(P, c) for c in goal.resolved_conjuncts()]
    best = None
    ctx = AgentCtx(st, True)
    for combo in product(*domains) if domains else [()]:
        if len(set(combo)) != len(combo):
            continue
        env = dict(zip(var_names, combo))
        sat = sum(1 for c in conjs if c.holds(st, env))
        est = sum(_conjunct_estimate(P, st, c, env, ctx) for c in conjs if not c.holds(st, env))
        key = (-sat, est, combo)
        if best is None or key < best[0]:
            best = (key, env)
    if best is None:
        raise RelaxedUnreachable(f"{goal.name}: no feasible binding for shared objects")
    return {v: P.ids[i] for v, i in best[1].items()}


@dataclass(frozen=True)
class SegmentedPlan:
    plan: Plan
    # conjunct index pursued by each action of the plan
    conjunct_of_step: tuple[int, ...]
    binding: dict[str, str]


def _protected_open(goal: GroundGoal, uni) -> set[str]:
    """Objects whose open flag the goal wants true; tidying never closes them."""
    protected: set[str] = set()
    for c in goal.resolved_conjuncts():
        tests = []
        if any(a == "open" and v for a, v in c.x_flags):
            tests.append(c.test)
        if any(a == "open" and v for a, v in c.y_flags) and c.y_test:
            tests.append(c.y_test)
        for t in tests:
            protected.update(uni.instances_matching(t))
    return protected


def _needs_open(state: WorldState, action: GroundedAction) -> set[str]:
    """Openable containers this action requires to be open."""
    uni = state.universe
    need: set[str] = set()

    def openable(o: str) -> bool:
        return uni.spec(o).has("openable")

    sch = action.schema
    if sch == "pick-up-at-loc" or sch == "put-inside-loc":
        if openable(action.args[1]):
            need.add(action.args[1])
    elif sch in ("pick-up-from-rec-at-loc", "put-inside-rec-at-loc"):
        rec, loc = action.args[1], action.args[2]
        if openable(rec):
            need.add(rec)
        rp = state.pos.get(rec)
        if rp and rp[0] == "in" and openable(loc):
            need.add(loc)
    elif sch in ("open-rec-at-loc", "close-rec-at-loc", "put-ontop-rec-at-loc"):
        rec, loc = action.args[0], action.args[1]
        if sch == "put-ontop-rec-at-loc":
            rec, loc = action.args[1], action.args[2]
        rp = state.pos.get(rec)
        if rp and rp[0] == "in" and openable(loc):
            need.add(loc)
    elif sch in ("slice-obj", "clean-obj-at-loc", "toggle-on-obj-at-loc", "toggle-off-obj-at-loc"):
        obj = action.args[0]
        p = state.pos.get(obj)
        if p is not None:
            if openable(p[1]):
                need.add(p[1])
            pp = state.pos.get(p[1])
            if pp is not None and pp[0] == "in" and openable(pp[1]):
                need.add(pp[1])
    return need


def tidy_segment(state: WorldState, actions, agent: str,
                 protect: set[str]) -> tuple[list[GroundedAction], WorldState]:
    """Insert close actions so the agent shuts what it opened before walking
    away, except containers a later step of this segment still needs.
    """
    # pre-pass: last step index at which each container must be open
    last_need: dict[str, int] = {}
    probe = state
    for i, a in enumerate(actions):
        for obj in _needs_open(probe, a):
            last_need[obj] = i
        probe = world.apply(probe, a)

    out: list[GroundedAction] = []
    cur = state
    opened: list[str] = []

    def close_done(step: int):
        nonlocal cur
        at = cur.agent_at[agent]
        keep: list[str] = []
        for obj in sorted(opened, key=lambda o: (cur.universe.spec(o).cls == "location", o)):
            if obj in protect or not cur.has_flag(obj, "open"):
                continue
            if last_need.get(obj, -1) >= step:
                keep.append(obj)
                continue
            if obj == at:
                act = GroundedAction("close-loc", agent, (obj,))
            elif cur.pos.get(obj, (None, None))[1] == at:
                act = GroundedAction("close-rec-at-loc", agent, (obj, at))
            else:
                continue
            if world.applicable(cur, act):
                out.append(act)
                cur = world.apply(cur, act)
        opened[:] = keep

    for i, a in enumerate(actions):
        if a.schema == "move":
            close_done(i)
        out.append(a)
        cur = world.apply(cur, a)
        if a.schema in ("open-loc", "open-rec-at-loc"):
            opened.append(a.args[0])
        elif a.schema in ("close-loc", "close-rec-at-loc") and a.args[0] in opened:
            opened.remove(a.args[0])
    close_done(len(actions))
    return out, cur


def plan_sequential(state: WorldState, goal: GroundGoal, agent: str = HUMAN,
                    config: PlannerConfig = PlannerConfig(),
                    tidy: bool = True) -> SegmentedPlan:
    """Trajectory-style planning: satisfy goal conjuncts one at a time in
    template order under one fixed shared binding. With ``tidy``, the agent
    closes the containers it opened before leaving a location.
    """
    check_relaxed_feasibility(state, goal)
    env_names = choose_binding(state, goal)
    protect = _protected_open(goal, state.universe) if tidy else set()
    cur = state
    actions: list[GroundedAction] = []
    conjunct_of_step: list[int] = []
    n_conj = len(goal.resolved_conjuncts())
    for idx in range(n_conj):
        adapter = SequentialSegmentAdapter(goal, idx, env_names)
        seg_actions = plan(cur, adapter, agent, config).actions
        if tidy:
            seg_actions, cur = tidy_segment(cur, seg_actions, agent, protect)
        else:
            cur = replay(cur, seg_actions)
        actions.extend(seg_actions)
        conjunct_of_step.extend([idx] * len(seg_actions))
    if not goal.holds(cur):
        raise NoPlanFound(f"{goal.name}: sequential plan left the goal unsatisfied")
    return SegmentedPlan(
        plan=Plan(actions=tuple(actions), total_cost=len(actions)),
        conjunct_of_step=tuple(conjunct_of_step),
        binding=env_names,
    )


def cost_to_go(state: WorldState, goal: GroundGoal, agent: str = HUMAN,
               config: PlannerConfig = PlannerConfig()) -> int:
    """Satisficing cost-to-go: the cost of the found plan (0 when satisfied)."""
    return plan_for_goal(state, goal, agent, config).total_cost


def replay(state: WorldState, actions) -> WorldState:
    """Execute actions through the full world model (validation path)."""
    cur = state
    for a in actions:
        cur = world.apply(cur, a)
    return cur


class NoPredictableCut(PlanError):
    pass


def truncate(plan_: Plan, rng, mode: str) -> int:
    """Pick the truncation step T.

    v1-uniform: T uniform in [1, len-1]. v2-predictable: T additionally
    requires that some action before T manipulates an object of the same
    category as the next object manipulated at or after T. Raises
    ``NoPredictableCut`` when no T qualifies.
    """
    n = len(plan_.actions)
    if n < 2:
        raise PlanError("plan too short to truncate")
    if mode == "v1-uniform":
        return rng.randrange(1, n)
    if mode != "v2-predictable":
        raise PlanError(f"unknown truncation mode {mode!r}")

    manipulated = [manipulated_object(a) for a in plan_.actions]
    valid: list[int] = []
    for t in range(1, n):
        nxt = next((manipulated[j] for j in range(t, n) if manipulated[j] is not None), None)
        if nxt is None:
            continue
        nxt_cat = nxt[1]
        if any(m is not None and m[1] == nxt_cat for m in manipulated[:t]):
            valid.append(t)
    if not valid:
        raise NoPredictableCut("no truncation point admits a predictable next object")
    return valid[rng.randrange(len(valid))]


def manipulated_object(action: GroundedAction) -> Optional[tuple[str, str]]:
    """(object id, category) the action manipulates, if any."""
    sch = action.schema
    if sch in ("move", "examine", "inventory", "clean-loc",
               "open-loc", "close-loc", "toggle-on-loc", "toggle-off-loc"):
        return None
    obj = action.args[0]
    # ids carry the category ("tea_bag#1"); location ids are bare names
    return obj, obj.rsplit("#", 1)[0].replace("_", " ")
