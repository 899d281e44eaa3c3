"""Command parsing for the interactive environment.

Commands follow the fixed grammar (move to / pick up / put into / open /
heat / ...), plus examine, look, and inventory. Objects are referenced by id
("apple#0"); a bare category name works only when the scene holds exactly
one instance. Unknown verbs read as "I can't understand."; known verbs with
bad references read as "You can't do that."
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .world import GroundedAction, ROBOT, WorldState

CANT_DO = "You can't do that."
CANT_UNDERSTAND = "I can't understand."


@dataclass(frozen=True)
class MetaAction:
    kind: str  # examine | inventory


@dataclass(frozen=True)
class ParseError(Exception):
    message: str


class _BadReference(Exception):
    pass


def _resolve(state: WorldState, words: list[str], want_location: bool = False) -> str:
    """Resolve words to an object id: exact id, or unique category name."""
    if not words:
        raise _BadReference
    name = " ".join(words)
    name = name.removeprefix("the ").removeprefix("a ").removeprefix("an ")
    uni = state.universe
    token = name.replace(" ", "_")
    if token in uni.objects:
        return token
    category = name.replace("_", " ")
    try:
        inst = uni.instances_of(category) or uni.instances_matching(category)
    except KeyError:
        raise _BadReference from None
    if want_location:
        inst = tuple(i for i in inst if uni.spec(i).cls == "location")
    if len(inst) == 1:
        return inst[0]
    raise _BadReference


def _split_on(tokens: list[str], keyword: str) -> Optional[tuple[list[str], list[str]]]:
    if keyword in tokens:
        i = tokens.index(keyword)
        return tokens[:i], tokens[i + 1:]
    return None


def parse_command(state: WorldState, command: str,
                  agent: str = ROBOT) -> Union[GroundedAction, MetaAction]:
    """Parse a text command against the current state.

    Raises ParseError with the appropriate message on failure.
    """
    raw = command.strip().lower().replace(",", " ").replace(".", " ")
    tokens = [t for t in raw.split() if t]
    if not tokens:
        raise ParseError(CANT_UNDERSTAND)
    at = state.agent_at[agent]
    uni = state.universe

    def resolve(words, want_location=False):
        try:
            return _resolve(state, words, want_location)
        except _BadReference:
            raise ParseError(CANT_DO) from None

    head = tokens[0]
    if head in ("examine", "look"):
        return MetaAction("examine")
    if head in ("inventory", "inv"):
        return MetaAction("inventory")

    if head == "move" or (head == "go" and len(tokens) > 1 and tokens[1] == "to"):
        rest = tokens[2:] if tokens[1:2] == ["to"] else tokens[1:]
        if not rest:
            raise ParseError(CANT_UNDERSTAND)
        dest = resolve(rest, want_location=True)
        return GroundedAction("move", agent, (at, dest))

    if tokens[:2] == ["pick", "up"]:
        rest = tokens[2:]
        split = _split_on(rest, "from")
        if split:
            obj = resolve(split[0])
            rec = resolve(split[1])
            return GroundedAction("pick-up-from-rec-at-loc", agent, (obj, rec, at))
        obj = resolve(rest)
        p = state.pos.get(obj)
        if p is not None and uni.spec(p[1]).cls == "receptacle":
            return GroundedAction("pick-up-from-rec-at-loc", agent, (obj, p[1], at))
        return GroundedAction("pick-up-at-loc", agent, (obj, at))

    if head == "put" or head == "place":
        rest = tokens[1:]
        for kw, kind in (("into", "in"), ("onto", "on"), ("in", "in"), ("on", "on")):
            split = _split_on(rest, kw)
            if split and split[0]:
                obj = resolve(split[0])
                dest = resolve(split[1])
                if uni.spec(dest).cls == "location":
                    schema = "put-inside-loc" if kind == "in" else "put-ontop-loc"
                    return GroundedAction(schema, agent, (obj, dest))
                schema = "put-inside-rec-at-loc" if kind == "in" else "put-ontop-rec-at-loc"
                return GroundedAction(schema, agent, (obj, dest, at))
        raise ParseError(CANT_UNDERSTAND)

    if head == "give":
        split = _split_on(tokens[1:], "to")
        words = split[0] if split else tokens[1:]
        obj = resolve(words)
        return GroundedAction("bring-to-human", agent, (obj,))

    if head == "take":
        split = _split_on(tokens[1:], "from")
        words = split[0] if split else tokens[1:]
        obj = resolve(words)
        return GroundedAction("take-from-human", agent, (obj,))

    if head in ("open", "close"):
        obj = resolve(tokens[1:])
        if uni.spec(obj).cls == "location":
            return GroundedAction(f"{head}-loc", agent, (obj,))
        return GroundedAction(f"{head}-rec-at-loc", agent, (obj, at))

    if head == "toggle" and len(tokens) >= 3 and tokens[1] in ("on", "off"):
        obj = resolve(tokens[2:])
        mode = tokens[1]
        if uni.spec(obj).cls == "location":
            return GroundedAction(f"toggle-{mode}-loc", agent, (obj,))
        return GroundedAction(f"toggle-{mode}-obj-at-loc", agent, (obj, at))

    if head in ("heat", "cool", "soak"):
        obj = resolve(tokens[1:])
        return GroundedAction(f"{head}-obj", agent, (obj, at))

    if head in ("slice", "clean"):
        split = _split_on(tokens[1:], "with")
        if not split or not split[0] or not split[1]:
            raise ParseError(CANT_UNDERSTAND)
        obj = resolve(split[0])
        tool = resolve(split[1])
        if head == "slice":
            return GroundedAction("slice-obj", agent, (obj, tool, at))
        if uni.spec(obj).cls == "location":
            return GroundedAction("clean-loc", agent, (tool, obj))
        return GroundedAction("clean-obj-at-loc", agent, (obj, tool, at))

    if head in ("ask", "question", "what", "which", "where"):
        # clarification questions are reserved but not implemented
        raise ParseError(CANT_UNDERSTAND)

    raise ParseError(CANT_UNDERSTAND)
