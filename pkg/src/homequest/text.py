"""Deterministic English rendering: quests, actions, observations.

Everything comes from fixed templates over a small lexicon. Object mentions
are "<adjectives> <id>" with ids carrying the category ("sliced apple#0",
"large red box#2"); locations go by bare category names.
"""

from __future__ import annotations

from typing import Optional

from . import catalog
from .quests import LiftedSubgoal, VERB_EFFECTS
from .world import GroundedAction, WorldState

# positive / negative surface forms of the dynamic attributes
ATTR_WORDS = {
    ("open", True): "open", ("open", False): "closed",
    ("cooked", True): "cooked", ("cooked", False): "uncooked",
    ("frozen", True): "frozen", ("frozen", False): "unfrozen",
    ("dusty", True): "dusty", ("dusty", False): "undusty",
    ("stained", True): "stained", ("stained", False): "unstained",
    ("sliced", True): "sliced", ("sliced", False): "unsliced",
    ("soaked", True): "soaked", ("soaked", False): "unsoaked",
    ("toggled", True): "toggled", ("toggled", False): "untoggled",
}

CHANGE_VERB_WORDS = {
    "heat": ("heat", "up"),
    "cool": ("cool", "down"),
    "soak": ("soak", ""),
    "slice": ("slice", "up"),
    "clean": ("clean", "up"),
    "open": ("open", ""),
    "close": ("close", ""),
    "toggle-on": ("toggle", "on"),
    "toggle-off": ("toggle", "off"),
}

BRING_VERBS = ("bring", "hand", "give")
POLITENESS = ("", "please", "can you")


def location_name(obj_id: str) -> str:
    return obj_id.replace("_", " ")


def describe_specifiers(m: LiftedSubgoal) -> str:
    """The four-part description: static attrs, dynamic attrs, category (or
    the pronoun 'one'), and current position."""
    statics = []
    dynamics = []
    for name, value in m.attributes:
        if name == "size":
            statics.append(str(value))
        elif name == "color":
            statics.append(str(value))
        else:
            dynamics.append(ATTR_WORDS[(name, bool(value))])
    statics.sort(key=lambda w: w not in catalog.SIZES)  # size before color
    noun = m.tier[1] if m.tier is not None else "one"
    parts = ["the"] + statics + sorted(dynamics) + [noun]
    text = " ".join(parts)
    if m.source is not None:
        rel = "in" if catalog.CATALOG[m.source].has("has-inside") else "on"
        text += f" {rel} the {m.source}"
    return text


def render_utterance(m: LiftedSubgoal, rng) -> str:
    """Template-filled English with sampled verb and politeness prefix."""
    has_spec = m.tier is not None or m.attributes or m.source is not None
    if m.quest_type == "bring-me":
        verb = BRING_VERBS[rng.randrange(len(BRING_VERBS))]
        core = f"{verb} me {describe_specifiers(m) if has_spec else 'that'}"
    elif m.quest_type == "move-to":
        if m.target is None:
            thing = describe_specifiers(m) if has_spec else "it"
            core = f"put {thing} over there"
        else:
            verb = ("put", "move")[rng.randrange(2)]
            thing = describe_specifiers(m) if has_spec else "it"
            core = f"{verb} {thing} to the {m.target}"
    else:
        verb, prep = CHANGE_VERB_WORDS[m.verb]
        if has_spec:
            core = " ".join(w for w in (verb, prep, describe_specifiers(m)) if w)
        else:
            core = " ".join(w for w in (verb, "it", prep) if w)
    prefix = POLITENESS[rng.randrange(len(POLITENESS))]
    sentence = f"{prefix} {core}".strip()
    mark = "?" if prefix == "can you" else "."
    return sentence[0].upper() + sentence[1:] + mark


def mention(state: WorldState, obj_id: str) -> str:
    """Adjectives plus id, e.g. 'large red dusty box#2'."""
    inst = state.universe.get(obj_id)
    words = []
    if inst.size:
        words.append(inst.size)
    if inst.color:
        words.append(inst.color)
    spec = inst.spec
    # closed is the default for openables and stays unmarked
    if spec.has("openable") and state.has_flag(obj_id, "open"):
        words.append("open")
    for attr in ("cooked", "frozen", "dusty", "stained", "sliced", "soaked", "toggled"):
        if state.has_flag(obj_id, attr):
            words.append(attr)
    words.append(obj_id if spec.cls != "location" else location_name(obj_id))
    return " ".join(words)


def render_action(action: GroundedAction, second_person: bool = True) -> str:
    """Observation line for an executed action (Table-style templates).

    ``second_person=False`` renders trajectory lines about the human.
    """
    a = action.args
    sch = action.schema

    def loc(i):
        return location_name(a[i])

    if second_person:
        s, e, the = "You", "", "the "
    else:
        # trajectory lines about the human read terser
        s, e, the = "Human", "s", ""
    if sch == "move":
        if second_person:
            return f"You move from the {loc(0)} to the {loc(1)}."
        return f"Human moves to {loc(1)}."
    if sch == "pick-up-at-loc":
        return f"{s} pick{e} up {the}{a[0]} at {the}{loc(1)}."
    if sch == "pick-up-from-rec-at-loc":
        return f"{s} pick{e} up {the}{a[0]} from {the}{a[1]} at {the}{loc(2)}."
    if sch == "put-inside-loc":
        return f"{s} put{e} {the}{a[0]} into {the}{loc(1)}."
    if sch == "put-ontop-loc":
        return f"{s} put{e} {the}{a[0]} onto {the}{loc(1)}."
    if sch == "put-inside-rec-at-loc":
        return f"{s} put{e} {the}{a[0]} into {the}{a[1]} at {the}{loc(2)}."
    if sch == "put-ontop-rec-at-loc":
        return f"{s} put{e} {the}{a[0]} onto {the}{a[1]} at {the}{loc(2)}."
    if sch in ("open-loc", "open-rec-at-loc"):
        name = loc(0) if sch == "open-loc" else a[0]
        return f"{s} open{e} {the}{name}."
    if sch in ("close-loc", "close-rec-at-loc"):
        name = loc(0) if sch == "close-loc" else a[0]
        return f"{s} close{e} {the}{name}."
    if sch in ("toggle-on-loc", "toggle-on-obj-at-loc"):
        name = location_name(a[0]) if sch == "toggle-on-loc" else a[0]
        return f"{s} toggle{e} the {name} on."
    if sch in ("toggle-off-loc", "toggle-off-obj-at-loc"):
        name = location_name(a[0]) if sch == "toggle-off-loc" else a[0]
        return f"{s} toggle{e} the {name} off."
    if sch == "heat-obj":
        return f"{s} heat{e} the {a[0]} up with the {loc(1)}."
    if sch == "cool-obj":
        return f"{s} cool{e} the {a[0]} down with the {loc(1)}."
    if sch == "soak-obj":
        return f"{s} make{e} the {a[0]} soaked with the {loc(1)}."
    if sch == "slice-obj":
        return f"{s} slice{e} up the {a[0]} with the {a[1]}."
    if sch == "clean-obj-at-loc":
        return f"{s} clean{e} up the {a[0]} with the {a[1]}."
    if sch == "clean-loc":
        return f"{s} clean{e} up the {loc(1)} with the {a[0]}."
    if sch == "bring-to-human":
        return f"{s} give{e} the {a[0]} to the human."
    if sch == "take-from-human":
        return f"{s} take{e} the {a[0]} from the human."
    if sch == "examine":
        return ""
    if sch == "inventory":
        return ""
    return f"{s} do{e} something."


def render_command(action: GroundedAction) -> str:
    """Canonical text command for an action; parses back to the action."""
    a = action.args
    sch = action.schema
    if sch == "move":
        return f"move to {location_name(a[1])}"
    if sch == "pick-up-at-loc":
        return f"pick up {a[0]}"
    if sch == "pick-up-from-rec-at-loc":
        return f"pick up {a[0]} from {a[1]}"
    if sch == "put-inside-loc":
        return f"put {a[0]} into {location_name(a[1])}"
    if sch == "put-ontop-loc":
        return f"put {a[0]} onto {location_name(a[1])}"
    if sch == "put-inside-rec-at-loc":
        return f"put {a[0]} into {a[1]}"
    if sch == "put-ontop-rec-at-loc":
        return f"put {a[0]} onto {a[1]}"
    if sch == "open-loc":
        return f"open {location_name(a[0])}"
    if sch == "open-rec-at-loc":
        return f"open {a[0]}"
    if sch == "close-loc":
        return f"close {location_name(a[0])}"
    if sch == "close-rec-at-loc":
        return f"close {a[0]}"
    if sch == "toggle-on-loc":
        return f"toggle on {location_name(a[0])}"
    if sch == "toggle-on-obj-at-loc":
        return f"toggle on {a[0]}"
    if sch == "toggle-off-loc":
        return f"toggle off {location_name(a[0])}"
    if sch == "toggle-off-obj-at-loc":
        return f"toggle off {a[0]}"
    if sch == "heat-obj":
        return f"heat {a[0]}"
    if sch == "cool-obj":
        return f"cool {a[0]}"
    if sch == "soak-obj":
        return f"soak {a[0]}"
    if sch == "slice-obj":
        return f"slice {a[0]} with {a[1]}"
    if sch == "clean-obj-at-loc":
        return f"clean {a[0]} with {a[1]}"
    if sch == "clean-loc":
        return f"clean {location_name(a[1])} with {a[0]}"
    if sch == "bring-to-human":
        return f"give {a[0]} to human"
    if sch == "take-from-human":
        return f"take {a[0]} from human"
    if sch == "examine":
        return "examine"
    if sch == "inventory":
        return "inventory"
    raise ValueError(f"no command form for {sch}")


def token_count(text: str) -> int:
    return len(text.split())


# template glue used across welcome/trajectory/quest/observation rendering
_GLUE_WORDS = """
welcome to the world in room there is now you are standing on floor human
agent has taken these actions towards a goal stops and says it your turn
move from pick up at put into onto open close toggle off heat cool down
soak make soaked with slice clean give take bring hand me that please can
one over of note nothing holding recall quest have accomplished run out
steps moves picks puts opens closes toggles heats cools makes slices cleans
gives takes do does something see nothing here i understand t
""".split()


def lexicon_words() -> list[str]:
    """Every word the renderer can emit (object ids reduce to their category
    words plus a numeric suffix)."""
    words = set(_GLUE_WORDS)
    for cat in catalog.CATALOG:
        words.update(cat.split())
    words.update(catalog.SIZES)
    words.update(catalog.COLORS)
    words.update(ATTR_WORDS.values())
    for verb, prep in CHANGE_VERB_WORDS.values():
        words.add(verb)
        if prep:
            words.add(prep)
    words.update(BRING_VERBS)
    words.update(w for p in POLITENESS for w in p.split())
    words.update(c for c in catalog.CLASSES)
    for sub in catalog.MOVABLE_SUBCLASSES:
        words.update(sub.split())
    return sorted(words)


def strip_ids(token: str) -> str:
    """Normalize a whitespace token for lexicon checks: drop punctuation and
    reduce ids to their category words."""
    token = token.strip('.,!?";:()').lower()
    if "#" in token:
        token = token.split("#", 1)[0]
    return token.replace("_", " ")
