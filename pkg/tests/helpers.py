"""Shared test scaffolding: hand-built scenes and brute-force oracles."""

from __future__ import annotations

from itertools import product

from homequest import catalog, logic, world
from homequest.catalog import CATALOG, LOCATION_CATEGORIES
from homequest.world import AGENTS, HUMAN, ObjectInstance, ROBOT, Universe, WorldState


def build_scene(movables: dict[str, dict] | None = None,
                human_at: str = "floor", robot_at: str = "floor",
                holding: dict[str, str] | None = None) -> WorldState:
    """A world with all 16 locations plus the given movables.

    movables: id -> {"pos": (rel, holder) | None, "flags": [...],
                     "size": ..., "color": ...}; category comes from the id.
    """
    movables = movables or {}
    objects = [ObjectInstance(id=c, category=c) for c in LOCATION_CATEGORIES]
    pos = {}
    flags = {}
    for oid, info in movables.items():
        cat = oid.rsplit("#", 1)[0].replace("_", " ")
        spec = CATALOG[cat]
        size = info.get("size", "small" if spec.has("has-size") else None)
        color = info.get("color", "red" if spec.has("has-color") else None)
        objects.append(ObjectInstance(id=oid, category=cat, size=size, color=color))
        if info.get("pos") is not None:
            pos[oid] = tuple(info["pos"])
        if info.get("flags"):
            flags[oid] = frozenset(info["flags"])
    holding = holding or {}
    state = WorldState(
        universe=Universe(objects),
        pos=pos,
        flags=flags,
        agent_at={HUMAN: human_at, ROBOT: robot_at},
        holding={a: holding.get(a) for a in AGENTS},
    )
    state.check_invariants()
    return state


def set_location_flags(state: WorldState, loc_flags: dict[str, list[str]]) -> WorldState:
    flags = dict(state.flags)
    for loc, fl in loc_flags.items():
        flags[loc] = frozenset(fl)
    out = WorldState(state.universe, dict(state.pos), flags,
                     dict(state.agent_at), dict(state.holding))
    out.check_invariants()
    return out


def brute_force_evaluate(state: WorldState, formula) -> bool:
    """Exhaustive-assignment FOL oracle: quantifiers loop over the whole
    universe with no shortcuts."""
    def ev(f, env):
        if isinstance(f, logic.Cat):
            obj = env[f.term] if f.term.startswith("?") else f.term
            return state.universe.category(obj) in catalog.categories_matching(f.name)
        if isinstance(f, logic.Flag):
            obj = env[f.term] if f.term.startswith("?") else f.term
            return f.attr in state.flags.get(obj, ())
        if isinstance(f, logic.In):
            a = env[f.a] if f.a.startswith("?") else f.a
            b = env[f.b] if f.b.startswith("?") else f.b
            return state.pos.get(a) == ("in", b)
        if isinstance(f, logic.On):
            a = env[f.a] if f.a.startswith("?") else f.a
            b = env[f.b] if f.b.startswith("?") else f.b
            return state.pos.get(a) == ("on", b)
        if isinstance(f, logic.Neq):
            a = env[f.a] if f.a.startswith("?") else f.a
            b = env[f.b] if f.b.startswith("?") else f.b
            return a != b
        if isinstance(f, logic.Not):
            return not ev(f.f, env)
        if isinstance(f, logic.And):
            return all(ev(p, env) for p in f.parts)
        if isinstance(f, logic.Implies):
            return (not ev(f.left, env)) or ev(f.right, env)
        if isinstance(f, logic.Forall):
            return all(ev(f.body, {**env, f.var: o}) for o in state.universe.ids)
        if isinstance(f, logic.Exists):
            return any(ev(f.body, {**env, f.var: o}) for o in state.universe.ids)
        raise TypeError(f)
    return ev(formula, {})


def uniform_cost_search(state: WorldState, goal_holds, agent: str,
                        limit: int = 200000):
    """Optimal-cost oracle over the full world model."""
    import heapq

    start = state
    frontier = [(0, 0, start)]
    best = {start.digest(): 0}
    counter = 0
    while frontier:
        cost, _, cur = heapq.heappop(frontier)
        if goal_holds(cur):
            return cost
        if cost > best.get(cur.digest(), 1e9):
            continue
        counter += 1
        if counter > limit:
            raise RuntimeError("UCS limit exceeded")
        for action in world.valid_actions(cur, agent):
            if action.schema in world.META_SCHEMAS:
                continue
            nxt = world.apply(cur, action)
            ncost = cost + 1
            key = nxt.digest()
            if ncost < best.get(key, 1e9):
                best[key] = ncost
                counter += 1
                heapq.heappush(frontier, (ncost, counter, nxt))
    return None
