"""Object-centric symbolic world: states, grounded actions, transition, costs.

States are immutable values; ``apply`` returns a fresh state and never mutates
its input. Only direct spatial relations are stored: an apple in a plate on a
table is recorded as ``in(apple, plate)`` and ``on(plate, table)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import catalog
from .catalog import CATALOG, CLEAN_TOOLS, COOL_LOCATIONS, HEAT_LOCATIONS, SLICE_TOOLS, SOAK_LOCATIONS

HUMAN = "human"
ROBOT = "robot"
AGENTS = (HUMAN, ROBOT)

# Schemas whose effects change nothing; they cost 0 and are handled by the
# text interface.
META_SCHEMAS = ("examine", "inventory")

# Robot-only schemas.
ROBOT_SCHEMAS = ("bring-to-human", "take-from-human")

SCHEMAS = (
    "move",
    "pick-up-at-loc",
    "pick-up-from-rec-at-loc",
    "put-inside-loc",
    "put-ontop-loc",
    "put-inside-rec-at-loc",
    "put-ontop-rec-at-loc",
    "open-loc",
    "close-loc",
    "open-rec-at-loc",
    "close-rec-at-loc",
    "toggle-on-loc",
    "toggle-off-loc",
    "toggle-on-obj-at-loc",
    "toggle-off-obj-at-loc",
    "heat-obj",
    "cool-obj",
    "soak-obj",
    "slice-obj",
    "clean-obj-at-loc",
    "clean-loc",
    "bring-to-human",
    "take-from-human",
) + META_SCHEMAS


class WorldError(Exception):
    """Base error for world-model failures."""


class UnknownObjectError(WorldError):
    """An action referenced an id that does not exist in the state."""


class PreconditionError(WorldError):
    """An action was applied whose preconditions do not hold."""


@dataclass(frozen=True)
class ObjectInstance:
    id: str
    category: str
    size: Optional[str] = None
    color: Optional[str] = None

    @property
    def spec(self) -> catalog.CategorySpec:
        return CATALOG[self.category]


class Universe:
    """The immutable object roster of a scene (ids, categories, static attrs)."""

    def __init__(self, objects: Iterable[ObjectInstance]):
        self.objects: dict[str, ObjectInstance] = {}
        for obj in objects:
            if obj.id in self.objects:
                raise WorldError(f"duplicate object id {obj.id!r}")
            spec = CATALOG[obj.category]
            if (obj.size is not None) != spec.has("has-size"):
                raise WorldError(f"{obj.id}: size must be present iff category has-size")
            if (obj.color is not None) != spec.has("has-color"):
                raise WorldError(f"{obj.id}: color must be present iff category has-color")
            self.objects[obj.id] = obj
        self.ids: tuple[str, ...] = tuple(sorted(self.objects))
        self.locations: tuple[str, ...] = tuple(
            i for i in self.ids if CATALOG[self.objects[i].category].cls == "location"
        )
        self.movables: tuple[str, ...] = tuple(
            i for i in self.ids if CATALOG[self.objects[i].category].cls != "location"
        )
        self._by_category: dict[str, tuple[str, ...]] = {}
        for i in self.ids:
            self._by_category.setdefault(self.objects[i].category, ())
        for cat in list(self._by_category):
            self._by_category[cat] = tuple(i for i in self.ids if self.objects[i].category == cat)

    def __contains__(self, obj_id: str) -> bool:
        return obj_id in self.objects

    def get(self, obj_id: str) -> ObjectInstance:
        try:
            return self.objects[obj_id]
        except KeyError:
            raise UnknownObjectError(f"unknown object id {obj_id!r}") from None

    def category(self, obj_id: str) -> str:
        return self.get(obj_id).category

    def spec(self, obj_id: str) -> catalog.CategorySpec:
        return CATALOG[self.get(obj_id).category]

    def instances_of(self, category: str) -> tuple[str, ...]:
        return self._by_category.get(category, ())

    def instances_matching(self, name: str) -> tuple[str, ...]:
        cats = catalog.categories_matching(name)
        return tuple(i for i in self.ids if self.objects[i].category in cats)

    def location_of_category(self, category: str) -> str:
        inst = self.instances_of(category)
        if len(inst) != 1:
            raise WorldError(f"expected exactly one {category}, found {len(inst)}")
        return inst[0]

    def to_json_obj(self) -> dict:
        out = {}
        for i in self.ids:
            o = self.objects[i]
            rec: dict = {"category": o.category}
            if o.size is not None:
                rec["size"] = o.size
            if o.color is not None:
                rec["color"] = o.color
            out[i] = rec
        return out

    @classmethod
    def from_json_obj(cls, data: dict) -> "Universe":
        return cls(
            ObjectInstance(id=i, category=r["category"], size=r.get("size"), color=r.get("color"))
            for i, r in data.items()
        )


@dataclass(frozen=True)
class GroundedAction:
    """An action schema bound to concrete object ids; ``agent`` acts."""

    schema: str
    agent: str
    args: tuple[str, ...] = ()

    def key(self) -> tuple:
        return (self.schema, self.args)

    def to_list(self) -> list[str]:
        return [self.schema, self.agent, *self.args]

    @classmethod
    def from_list(cls, data: list[str]) -> "GroundedAction":
        return cls(schema=data[0], agent=data[1], args=tuple(data[2:]))

    def __str__(self) -> str:
        return f"{self.schema}({self.agent}{''.join(', ' + a for a in self.args)})"


class WorldState:
    """A world configuration over a fixed universe.

    ``pos`` maps movable ids to ``(rel, holder)`` with rel in {'in', 'on'};
    held objects are absent from ``pos``. ``flags`` stores only true booleans.
    """

    __slots__ = ("universe", "pos", "flags", "agent_at", "holding", "_digest")

    def __init__(
        self,
        universe: Universe,
        pos: dict[str, tuple[str, str]],
        flags: dict[str, frozenset[str]],
        agent_at: dict[str, str],
        holding: dict[str, Optional[str]],
    ):
        self.universe = universe
        self.pos = pos
        self.flags = flags
        self.agent_at = agent_at
        self.holding = holding
        self._digest: Optional[str] = None

    # -- accessors ---------------------------------------------------------

    def has_flag(self, obj_id: str, attr: str) -> bool:
        return attr in self.flags.get(obj_id, ())

    def holder_of(self, obj_id: str) -> Optional[tuple[str, str]]:
        return self.pos.get(obj_id)

    def held_by(self, obj_id: str) -> Optional[str]:
        for agent in AGENTS:
            if self.holding.get(agent) == obj_id:
                return agent
        return None

    def location_of(self, obj_id: str) -> Optional[str]:
        """The location id an object (transitively) rests at; None if held."""
        seen = 0
        cur = obj_id
        while True:
            if CATALOG[self.universe.category(cur)].cls == "location":
                return cur
            nxt = self.pos.get(cur)
            if nxt is None:
                return None
            cur = nxt[1]
            seen += 1
            if seen > 4:
                raise WorldError(f"position cycle at {obj_id!r}")

    def contents(self, holder_id: str) -> list[str]:
        return [o for o, (_, h) in self.pos.items() if h == holder_id]

    def is_open_if_openable(self, obj_id: str) -> bool:
        spec = self.universe.spec(obj_id)
        return (not spec.has("openable")) or self.has_flag(obj_id, "open")

    def accessible(self, agent: str, obj_id: str) -> bool:
        """Whether ``agent`` can reach ``obj_id`` from its current location.

        Reachable means: held by the agent, directly at the agent's location,
        or in/on a receptacle resting at that location, with every openable
        container on the path open.
        """
        if self.holding.get(agent) == obj_id:
            return True
        at = self.agent_at[agent]
        p = self.pos.get(obj_id)
        if p is None:
            return False
        _, holder = p
        if holder == at:
            return self.is_open_if_openable(holder)
        hp = self.pos.get(holder)
        if hp is None or hp[1] != at:
            return False
        return self.is_open_if_openable(holder) and self.is_open_if_openable(at)

    # -- serialization -----------------------------------------------------

    def to_json_obj(self, include_objects: bool = True) -> dict:
        out: dict = {
            "agents": {
                a: {"at": self.agent_at[a], "holding": self.holding.get(a)} for a in AGENTS
            },
            "flags": {o: sorted(fl) for o, fl in sorted(self.flags.items()) if fl},
            "positions": {o: list(self.pos[o]) for o in sorted(self.pos)},
        }
        if include_objects:
            out["objects"] = self.universe.to_json_obj()
        return out

    def to_json(self, include_objects: bool = True) -> str:
        return json.dumps(self.to_json_obj(include_objects), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        if self._digest is None:
            self._digest = self.to_json(include_objects=False)
        return self._digest

    @classmethod
    def from_json_obj(cls, data: dict, universe: Optional[Universe] = None) -> "WorldState":
        uni = universe or Universe.from_json_obj(data["objects"])
        return cls(
            universe=uni,
            pos={o: (r[0], r[1]) for o, r in data["positions"].items()},
            flags={o: frozenset(fl) for o, fl in data["flags"].items()},
            agent_at={a: rec["at"] for a, rec in data["agents"].items()},
            holding={a: rec["holding"] for a, rec in data["agents"].items()},
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldState) and self.digest() == other.digest()

    def __hash__(self) -> int:
        return hash(self.digest())

    # -- invariant check (used by tests and the generator) ------------------

    def check_invariants(self) -> None:
        held = [o for a in AGENTS if (o := self.holding.get(a)) is not None]
        if len(held) != len(set(held)):
            raise WorldError("two agents hold the same object")
        for obj in self.universe.movables:
            placed = obj in self.pos
            if placed == (obj in held):
                raise WorldError(f"{obj}: must be either placed or held, exclusively")
        for obj, (rel, holder) in self.pos.items():
            ospec = self.universe.spec(obj)
            hspec = self.universe.spec(holder)
            if not ospec.movable:
                raise WorldError(f"{obj}: locations cannot be positioned")
            if ospec.cls == "receptacle" and hspec.cls != "location":
                raise WorldError(f"{obj}: receptacles may only rest at locations")
            if hspec.cls not in ("location", "receptacle"):
                raise WorldError(f"{obj}: holder {holder} cannot hold objects")
            need = "has-inside" if rel == "in" else "has-ontop"
            if not hspec.has(need):
                raise WorldError(f"{obj}: holder {holder} lacks {need}")
        for obj, fl in self.flags.items():
            spec = self.universe.spec(obj)
            for attr in fl:
                if not spec.has(catalog.ATTRIBUTE_META[attr]):
                    raise WorldError(f"{obj}: flag {attr} not permitted for {spec.name}")
        for agent in AGENTS:
            at = self.agent_at[agent]
            if self.universe.spec(at).cls != "location":
                raise WorldError(f"{agent} must stand at a location")


# ---------------------------------------------------------------------------
# Preconditions, effects, enumeration
# ---------------------------------------------------------------------------


def _check(state: WorldState, action: GroundedAction) -> Optional[str]:
    """Return None if applicable, else a human-readable failed condition."""
    uni = state.universe
    ag = action.agent
    if ag not in AGENTS:
        return f"unknown agent {ag!r}"
    for arg in action.args:
        if arg not in uni:
            raise UnknownObjectError(f"unknown object id {arg!r}")
    sch = action.schema
    if sch in META_SCHEMAS:
        return None
    if sch in ROBOT_SCHEMAS and ag != ROBOT:
        return f"{sch} is robot-only"
    at = state.agent_at[ag]
    held = state.holding.get(ag)

    def cat(i: str) -> catalog.CategorySpec:
        return uni.spec(i)

    if sch == "move":
        frm, to = action.args
        if cat(frm).cls != "location" or cat(to).cls != "location":
            return "move endpoints must be locations"
        if frm != at:
            return f"agent is not at {frm}"
        if to == frm:
            return "cannot move to the current location"
        return None

    if sch == "pick-up-at-loc":
        obj, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if held is not None:
            return "hands are full"
        if state.pos.get(obj) is None or state.pos[obj][1] != loc:
            return f"{obj} is not directly at {loc}"
        if not state.is_open_if_openable(loc):
            return f"{loc} is closed"
        return None

    if sch == "pick-up-from-rec-at-loc":
        obj, rec, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if held is not None:
            return "hands are full"
        if state.pos.get(obj) is None or state.pos[obj][1] != rec:
            return f"{obj} is not in {rec}"
        rp = state.pos.get(rec)
        if rp is None or rp[1] != loc:
            return f"{rec} is not at {loc}"
        if not state.is_open_if_openable(rec):
            return f"{rec} is closed"
        if rp[0] == "in" and not state.is_open_if_openable(loc):
            return f"{loc} is closed"
        return None

    if sch in ("put-inside-loc", "put-ontop-loc"):
        obj, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if held != obj:
            return f"not holding {obj}"
        if cat(loc).cls != "location":
            return f"{loc} is not a location"
        need = "has-inside" if sch == "put-inside-loc" else "has-ontop"
        if not cat(loc).has(need):
            return f"{loc} lacks {need}"
        if sch == "put-inside-loc" and not state.is_open_if_openable(loc):
            return f"{loc} is closed"
        return None

    if sch in ("put-inside-rec-at-loc", "put-ontop-rec-at-loc"):
        obj, rec, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if held != obj:
            return f"not holding {obj}"
        if obj == rec:
            return "cannot put an object into itself"
        if cat(obj).cls == "receptacle":
            return "receptacles may only rest at locations"
        if cat(rec).cls != "receptacle":
            return f"{rec} is not a receptacle"
        rp = state.pos.get(rec)
        if rp is None or rp[1] != loc:
            return f"{rec} is not at {loc}"
        need = "has-inside" if sch == "put-inside-rec-at-loc" else "has-ontop"
        if not cat(rec).has(need):
            return f"{rec} lacks {need}"
        if sch == "put-inside-rec-at-loc" and not state.is_open_if_openable(rec):
            return f"{rec} is closed"
        if rp[0] == "in" and not state.is_open_if_openable(loc):
            return f"{loc} is closed"
        return None

    if sch in ("open-loc", "close-loc"):
        (loc,) = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if not cat(loc).has("openable"):
            return f"{loc} is not openable"
        is_open = state.has_flag(loc, "open")
        if sch == "open-loc" and is_open:
            return f"{loc} is already open"
        if sch == "close-loc" and not is_open:
            return f"{loc} is already closed"
        return None

    if sch in ("open-rec-at-loc", "close-rec-at-loc"):
        rec, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        rp = state.pos.get(rec)
        if rp is None or rp[1] != loc:
            return f"{rec} is not at {loc}"
        if not cat(rec).has("openable"):
            return f"{rec} is not openable"
        if rp[0] == "in" and not state.is_open_if_openable(loc):
            return f"{loc} is closed"
        is_open = state.has_flag(rec, "open")
        if sch == "open-rec-at-loc" and is_open:
            return f"{rec} is already open"
        if sch == "close-rec-at-loc" and not is_open:
            return f"{rec} is already closed"
        return None

    if sch in ("toggle-on-loc", "toggle-off-loc"):
        (loc,) = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if not cat(loc).has("toggleable"):
            return f"{loc} is not toggleable"
        on = state.has_flag(loc, "toggled")
        if sch == "toggle-on-loc" and on:
            return f"{loc} is already toggled on"
        if sch == "toggle-off-loc" and not on:
            return f"{loc} is already toggled off"
        return None

    if sch in ("toggle-on-obj-at-loc", "toggle-off-obj-at-loc"):
        obj, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if not cat(obj).has("toggleable"):
            return f"{obj} is not toggleable"
        if not state.accessible(ag, obj):
            return f"{obj} is not reachable"
        on = state.has_flag(obj, "toggled")
        if sch == "toggle-on-obj-at-loc" and on:
            return f"{obj} is already toggled on"
        if sch == "toggle-off-obj-at-loc" and not on:
            return f"{obj} is already toggled off"
        return None

    if sch == "heat-obj":
        obj, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if cat(loc).name not in HEAT_LOCATIONS:
            return "heating is only possible at a microwave, oven, or stove"
        if not cat(obj).has("cookable"):
            return f"{obj} is not cookable"
        if state.pos.get(obj) is None or state.pos[obj][1] != loc:
            return f"{obj} is not at {loc}"
        if state.has_flag(obj, "cooked"):
            return f"{obj} is already cooked"
        return None

    if sch == "cool-obj":
        obj, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if cat(loc).name not in COOL_LOCATIONS:
            return "cooling is only possible at a refrigerator"
        if not cat(obj).has("freezable"):
            return f"{obj} is not freezable"
        if state.pos.get(obj) is None or state.pos[obj][1] != loc:
            return f"{obj} is not at {loc}"
        if state.has_flag(obj, "frozen"):
            return f"{obj} is already frozen"
        return None

    if sch == "soak-obj":
        obj, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if cat(loc).name not in SOAK_LOCATIONS:
            return "soaking is only possible at a sink"
        if not cat(obj).has("soakable"):
            return f"{obj} is not soakable"
        if state.pos.get(obj) is None or state.pos[obj][1] != loc:
            return f"{obj} is not at {loc}"
        if state.has_flag(obj, "soaked"):
            return f"{obj} is already soaked"
        return None

    if sch == "slice-obj":
        obj, tool, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if cat(tool).name not in SLICE_TOOLS:
            return "slicing requires a knife"
        if held != tool:
            return f"not holding {tool}"
        if not cat(obj).has("sliceable"):
            return f"{obj} is not sliceable"
        if not state.accessible(ag, obj):
            return f"{obj} is not reachable"
        if state.has_flag(obj, "sliced"):
            return f"{obj} is already sliced"
        return None

    if sch == "clean-obj-at-loc":
        obj, tool, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if cat(tool).name not in CLEAN_TOOLS:
            return "cleaning requires a suitable cleaning tool"
        if held != tool:
            return f"not holding {tool}"
        if not state.accessible(ag, obj):
            return f"{obj} is not reachable"
        if not (state.has_flag(obj, "dusty") or state.has_flag(obj, "stained")):
            return f"{obj} is already clean"
        return None

    if sch == "clean-loc":
        tool, loc = action.args
        if loc != at:
            return f"agent is not at {loc}"
        if cat(tool).name not in CLEAN_TOOLS:
            return "cleaning requires a suitable cleaning tool"
        if held != tool:
            return f"not holding {tool}"
        if not (state.has_flag(loc, "dusty") or state.has_flag(loc, "stained")):
            return f"{loc} is already clean"
        return None

    if sch == "bring-to-human":
        (obj,) = action.args
        if state.agent_at[ROBOT] != state.agent_at[HUMAN]:
            return "robot is not at the human's location"
        if held != obj:
            return f"not holding {obj}"
        if state.holding.get(HUMAN) is not None:
            return "the human's hands are full"
        return None

    if sch == "take-from-human":
        (obj,) = action.args
        if state.agent_at[ROBOT] != state.agent_at[HUMAN]:
            return "robot is not at the human's location"
        if held is not None:
            return "hands are full"
        if state.holding.get(HUMAN) != obj:
            return f"the human is not holding {obj}"
        return None

    return f"unknown schema {sch!r}"


def applicable(state: WorldState, action: GroundedAction) -> bool:
    """True iff all preconditions hold. Unknown ids raise, they are not False."""
    return _check(state, action) is None


def explain_inapplicable(state: WorldState, action: GroundedAction) -> Optional[str]:
    return _check(state, action)


def _set_flag(flags: dict[str, frozenset[str]], obj: str, attr: str, value: bool) -> None:
    cur = flags.get(obj, frozenset())
    new = (cur | {attr}) if value else (cur - {attr})
    if new:
        flags[obj] = new
    else:
        flags.pop(obj, None)


def apply(state: WorldState, action: GroundedAction) -> WorldState:
    """Transition function: the outcome state of taking ``action``."""
    reason = _check(state, action)
    if reason is not None:
        raise PreconditionError(f"{action}: {reason}")
    sch = action.schema
    ag = action.agent
    pos = dict(state.pos)
    flags = dict(state.flags)
    agent_at = dict(state.agent_at)
    holding = dict(state.holding)

    if sch in META_SCHEMAS:
        return state
    elif sch == "move":
        agent_at[ag] = action.args[1]
    elif sch in ("pick-up-at-loc", "pick-up-from-rec-at-loc"):
        obj = action.args[0]
        del pos[obj]
        holding[ag] = obj
    elif sch in ("put-inside-loc", "put-inside-rec-at-loc"):
        obj = action.args[0]
        pos[obj] = ("in", action.args[1])
        holding[ag] = None
    elif sch in ("put-ontop-loc", "put-ontop-rec-at-loc"):
        obj = action.args[0]
        pos[obj] = ("on", action.args[1])
        holding[ag] = None
    elif sch in ("open-loc", "open-rec-at-loc"):
        _set_flag(flags, action.args[0], "open", True)
    elif sch in ("close-loc", "close-rec-at-loc"):
        _set_flag(flags, action.args[0], "open", False)
    elif sch in ("toggle-on-loc", "toggle-on-obj-at-loc"):
        _set_flag(flags, action.args[0], "toggled", True)
    elif sch in ("toggle-off-loc", "toggle-off-obj-at-loc"):
        _set_flag(flags, action.args[0], "toggled", False)
    elif sch == "heat-obj":
        _set_flag(flags, action.args[0], "cooked", True)
        _set_flag(flags, action.args[0], "frozen", False)
    elif sch == "cool-obj":
        _set_flag(flags, action.args[0], "frozen", True)
    elif sch == "soak-obj":
        _set_flag(flags, action.args[0], "soaked", True)
    elif sch == "slice-obj":
        _set_flag(flags, action.args[0], "sliced", True)
    elif sch == "clean-obj-at-loc":
        _set_flag(flags, action.args[0], "dusty", False)
        _set_flag(flags, action.args[0], "stained", False)
    elif sch == "clean-loc":
        _set_flag(flags, action.args[1], "dusty", False)
        _set_flag(flags, action.args[1], "stained", False)
    elif sch == "bring-to-human":
        holding[ROBOT] = None
        holding[HUMAN] = action.args[0]
    elif sch == "take-from-human":
        holding[HUMAN] = None
        holding[ROBOT] = action.args[0]

    return WorldState(state.universe, pos, flags, agent_at, holding)


def apply_all(state: WorldState, actions: Iterable[GroundedAction]) -> WorldState:
    for a in actions:
        state = apply(state, a)
    return state


def action_cost(state: WorldState, action: GroundedAction) -> int:
    """Unit cost for every action except the free examine/look and inventory."""
    return 0 if action.schema in META_SCHEMAS else 1


def valid_actions(state: WorldState, agent: str) -> list[GroundedAction]:
    """All applicable grounded actions for ``agent``.

    Deterministic order: schema name, then argument ids.
    """
    uni = state.universe
    at = state.agent_at[agent]
    held = state.holding.get(agent)
    out: list[GroundedAction] = []
    add = out.append

    def A(schema: str, *args: str) -> GroundedAction:
        return GroundedAction(schema=schema, agent=agent, args=args)

    # objects directly at the agent's location and inside receptacles here
    direct = sorted(state.contents(at))
    loc_open = state.is_open_if_openable(at)
    recs_here = [o for o in direct if uni.spec(o).cls == "receptacle"]

    if agent == ROBOT and state.agent_at[HUMAN] == at:
        if held is not None:
            if state.holding.get(HUMAN) is None:
                add(A("bring-to-human", held))
        else:
            h = state.holding.get(HUMAN)
            if h is not None:
                add(A("take-from-human", h))

    at_cat = uni.spec(at)

    if held is None and loc_open:
        for obj in direct:
            add(A("pick-up-at-loc", obj, at))
    if held is None:
        for rec in recs_here:
            rp = state.pos[rec]
            if not state.is_open_if_openable(rec):
                continue
            if rp[0] == "in" and not loc_open:
                continue
            for obj in sorted(state.contents(rec)):
                add(A("pick-up-from-rec-at-loc", obj, rec, at))

    if held is not None:
        if at_cat.has("has-inside") and loc_open:
            add(A("put-inside-loc", held, at))
        if at_cat.has("has-ontop"):
            add(A("put-ontop-loc", held, at))
        if uni.spec(held).cls != "receptacle":
            for rec in recs_here:
                if rec == held:
                    continue
                rp = state.pos[rec]
                if rp[0] == "in" and not loc_open:
                    continue
                rspec = uni.spec(rec)
                if rspec.has("has-inside") and state.is_open_if_openable(rec):
                    add(A("put-inside-rec-at-loc", held, rec, at))
                if rspec.has("has-ontop"):
                    add(A("put-ontop-rec-at-loc", held, rec, at))

    if at_cat.has("openable"):
        if state.has_flag(at, "open"):
            add(A("close-loc", at))
        else:
            add(A("open-loc", at))
    for rec in recs_here:
        if not uni.spec(rec).has("openable"):
            continue
        if state.pos[rec][0] == "in" and not loc_open:
            continue
        if state.has_flag(rec, "open"):
            add(A("close-rec-at-loc", rec, at))
        else:
            add(A("open-rec-at-loc", rec, at))

    if at_cat.has("toggleable"):
        if state.has_flag(at, "toggled"):
            add(A("toggle-off-loc", at))
        else:
            add(A("toggle-on-loc", at))

    reachable = [o for o in direct if loc_open]
    for rec in recs_here:
        rp = state.pos[rec]
        if not state.is_open_if_openable(rec):
            continue
        if rp[0] == "in" and not loc_open:
            continue
        reachable.extend(state.contents(rec))
    reachable = sorted(set(reachable))

    for obj in reachable:
        if uni.spec(obj).has("toggleable"):
            if state.has_flag(obj, "toggled"):
                add(A("toggle-off-obj-at-loc", obj, at))
            else:
                add(A("toggle-on-obj-at-loc", obj, at))

    if at_cat.name in HEAT_LOCATIONS:
        for obj in direct:
            if uni.spec(obj).has("cookable") and not state.has_flag(obj, "cooked"):
                add(A("heat-obj", obj, at))
    if at_cat.name in COOL_LOCATIONS:
        for obj in direct:
            if uni.spec(obj).has("freezable") and not state.has_flag(obj, "frozen"):
                add(A("cool-obj", obj, at))
    if at_cat.name in SOAK_LOCATIONS:
        for obj in direct:
            if uni.spec(obj).has("soakable") and not state.has_flag(obj, "soaked"):
                add(A("soak-obj", obj, at))

    if held is not None and uni.spec(held).name in SLICE_TOOLS:
        for obj in reachable:
            if uni.spec(obj).has("sliceable") and not state.has_flag(obj, "sliced"):
                add(A("slice-obj", obj, held, at))
    if held is not None and uni.spec(held).name in CLEAN_TOOLS:
        for obj in reachable:
            if state.has_flag(obj, "dusty") or state.has_flag(obj, "stained"):
                add(A("clean-obj-at-loc", obj, held, at))
        if state.has_flag(at, "dusty") or state.has_flag(at, "stained"):
            add(A("clean-loc", held, at))

    for loc in uni.locations:
        if loc != at:
            add(A("move", at, loc))

    add(A("examine"))
    add(A("inventory"))

    out.sort(key=lambda a: (a.schema, a.args))
    return out
