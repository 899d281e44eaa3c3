"""Initial-state sampling.

Four steps: one instance of every location category; instance counts per
movable category (up to 3, at least one object in every subclass); positions
drawn category-uniform then instance-uniform from the valid-position table;
then attributes (fresh scenes have nothing open, sliced, or soaked; only the
refrigerator runs; things sitting at ovens, stoves, and microwaves arrive
cooked; refrigerated things arrive frozen; stainable/dustyable surfaces are
dirty with probability 1/3).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import catalog, rng as rngmod
from .catalog import CATALOG, HIERARCHY, LOCATION_CATEGORIES, MOVABLE_SUBCLASSES
from .world import AGENTS, HUMAN, ObjectInstance, ROBOT, Universe, WorldState


@dataclass(frozen=True)
class SceneConfig:
    rng_seed: int
    max_instances_per_category: int = 3
    stained_dusty_probability: float = 1 / 3

    def __post_init__(self):
        if not (0.0 <= self.stained_dusty_probability <= 1.0):
            raise ValueError("stained_dusty_probability must be within [0, 1]")
        if self.max_instances_per_category < 1:
            raise ValueError("max_instances_per_category must be >= 1")


def _count_instances(rng, categories: tuple[str, ...], max_n: int) -> dict[str, int]:
    """Instance counts for one subclass: uniform over 0..max_n per category;
    if the whole subclass came up empty, one category is redrawn from
    1..max_n so every subclass keeps at least one object.
    """
    counts = {cat: rng.randrange(0, max_n + 1) for cat in categories}
    if not any(counts.values()):
        counts[rngmod.pick(rng, categories)] = rng.randrange(1, max_n + 1)
    return counts


def sample_scene(config: SceneConfig) -> WorldState:
    seed = config.rng_seed
    max_n = config.max_instances_per_category

    # step 1: locations
    objects: list[ObjectInstance] = [
        ObjectInstance(id=cat, category=cat) for cat in LOCATION_CATEGORIES
    ]

    # step 2: movable instance counts, >=1 object per subclass
    rng_counts = rngmod.substream(seed, "counts")
    movable_ids: list[str] = []
    rng_static = rngmod.substream(seed, "static")
    for sub in MOVABLE_SUBCLASSES:
        cls = next(c for c in HIERARCHY if sub in HIERARCHY[c])
        counts = _count_instances(rng_counts, HIERARCHY[cls][sub], max_n)
        for cat in HIERARCHY[cls][sub]:
            spec = CATALOG[cat]
            for k in range(counts[cat]):
                oid = f"{cat.replace(' ', '_')}#{k}"
                size = rngmod.pick(rng_static, catalog.SIZES) if spec.has("has-size") else None
                color = rngmod.pick(rng_static, catalog.COLORS) if spec.has("has-color") else None
                objects.append(ObjectInstance(id=oid, category=cat, size=size, color=color))
                movable_ids.append(oid)

    universe = Universe(objects)

    # step 3: positions, receptacles first (they may hold other movables)
    rng_pos = rngmod.substream(seed, "positions")
    pos: dict[str, tuple[str, str]] = {}

    def place(obj_id: str) -> None:
        sub = universe.spec(obj_id).subclass
        entries = catalog.VALID_POSITIONS[sub]
        cats = sorted({c for name in entries for c in catalog.categories_matching(name)})
        present = [c for c in cats if universe.instances_of(c)]
        cat = rngmod.pick(rng_pos, present)
        # second stage: uniform over the instances of the drawn category
        holder = rngmod.pick(rng_pos, universe.instances_of(cat))
        rel = "in" if universe.spec(holder).has("has-inside") else "on"
        pos[obj_id] = (rel, holder)

    receptacles = [o for o in movable_ids if universe.spec(o).cls == "receptacle"]
    others = [o for o in movable_ids if universe.spec(o).cls != "receptacle"]
    for obj in receptacles:
        place(obj)
    for obj in others:
        place(obj)

    # step 4: attributes
    rng_attr = rngmod.substream(seed, "attributes")
    flags: dict[str, frozenset[str]] = {}

    def add_flag(obj_id: str, attr: str) -> None:
        flags[obj_id] = flags.get(obj_id, frozenset()) | {attr}

    fridge = universe.location_of_category("refrigerator")
    add_flag(fridge, "toggled")

    def resting_location(obj_id: str) -> str:
        holder = pos[obj_id][1]
        if universe.spec(holder).cls == "location":
            return holder
        return pos[holder][1]

    for obj in movable_ids:
        spec = universe.spec(obj)
        loc = resting_location(obj)
        loc_cat = universe.category(loc)
        if spec.has("cookable") and loc_cat in catalog.HEAT_LOCATIONS:
            add_flag(obj, "cooked")
        if spec.has("freezable") and loc_cat in catalog.COOL_LOCATIONS:
            add_flag(obj, "frozen")

    p_dirty = config.stained_dusty_probability
    for obj in universe.ids:
        spec = universe.spec(obj)
        if spec.has("stainable") and rng_attr.random() < p_dirty:
            add_flag(obj, "stained")
        if spec.has("dustyable") and rng_attr.random() < p_dirty:
            add_flag(obj, "dusty")

    floor = universe.location_of_category("floor")
    state = WorldState(
        universe=universe,
        pos=pos,
        flags=flags,
        agent_at={HUMAN: floor, ROBOT: floor},
        holding={a: None for a in AGENTS},
    )
    state.check_invariants()
    return state
