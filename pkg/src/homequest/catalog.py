"""Object catalog: the class/subclass/category hierarchy, meta-properties, and
valid initial positions.

Everything downstream (world model, scene sampling, quest specifiers, rendering)
resolves category facts through this module. The hierarchy is fixed: 5 classes,
16 location categories (one instance each in every scene), and 139 movable
categories grouped into 38 subclasses.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

CLASSES = ("location", "receptacle", "food", "tool", "thing")

SIZES = ("large", "small")
COLORS = ("red", "green", "blue")

# Dynamic boolean attributes and the meta-property gating each of them.
ATTRIBUTES = ("open", "cooked", "frozen", "dusty", "stained", "sliced", "soaked", "toggled")
ATTRIBUTE_META = {
    "open": "openable",
    "cooked": "cookable",
    "frozen": "freezable",
    "dusty": "dustyable",
    "stained": "stainable",
    "sliced": "sliceable",
    "soaked": "soakable",
    "toggled": "toggleable",
}

# class -> subclass -> categories
HIERARCHY: dict[str, dict[str, tuple[str, ...]]] = {
    "location": {
        "location-ontop": ("floor", "countertop", "sofa", "bed", "stove", "table", "shelf", "toilet"),
        "location-inside": ("cabinet", "bathtub", "microwave", "oven", "dishwasher", "refrigerator", "sink", "pool"),
    },
    "receptacle": {
        "furniture": ("highchair", "chair", "seat"),
        "vessel": ("bottle", "jar", "kettle", "caldron"),
        "tableware": ("bowl", "mug", "plate", "dish", "cup"),
        "utensil": ("saucepan", "pan", "casserole"),
        "bag": ("duffel bag", "sack", "backpack", "briefcase"),
        "bucket": ("bucket",),
        "tray": ("tray",),
        "basket": ("basket",),
        "box": ("box",),
        "package": ("package",),
        "ashcan": ("ashcan",),
        "xmas stocking": ("xmas stocking",),
        "xmas tree": ("xmas tree",),
    },
    "food": {
        "fruit": ("apple", "banana", "melon", "grape", "lemon", "orange", "peach",
                  "strawberry", "raspberry", "date", "olive", "chestnut"),
        "vegetable": ("carrot", "radish", "tomato", "broccoli", "mushroom", "onion", "lettuce", "pumpkin"),
        "drink": ("pop", "beer", "juice", "water", "milk"),
        "protein": ("beef", "chicken", "pork", "fish", "egg"),
        "flavorer": ("catsup", "sauce", "parsley", "tea bag", "suger", "vegetable oil"),
        "baked food": ("cracker", "bread", "cookie", "cake"),
        "snack": ("chip", "hamburger", "sandwich", "candy"),
        "prepared food": ("oatmeal", "sushi", "salad", "soup", "pasta"),
    },
    "tool": {
        "metal tool": ("carving knife", "hammer", "screwdriver", "scraper", "saw"),
        "electric equipment": ("printer", "scanner", "facsimile", "modem"),
        "electrical device": ("calculator", "headset", "earphone", "mouse", "alarm"),
        "toiletry": ("toothbrush", "perfume", "makeup"),
        "writing tool": ("highlighter", "marker", "pen", "pencil"),
        "piece of cloth": ("dishtowel", "hand towel", "rag"),
        "cleaning tool": ("scrub brush", "broom", "vacuum"),
        "cleansing": ("soap", "shampoo", "detergent", "toothpaste"),
        "cutlery": ("fork", "spoon", "knife"),
        "illumination tool": ("lamp", "candle"),
    },
    "thing": {
        "decoration": ("necklace", "bracelet", "jewelry", "bow", "wreath", "ribbon"),
        "paper product": ("hardback", "notebook", "book", "newspaper", "painting", "pad", "document"),
        "footwear": ("gym shoe", "sandal", "shoe", "sock"),
        "headwear": ("hat", "sunglass"),
        "clothing": ("shirt", "sweater", "underwear", "apparel"),
        "building materials": ("tile", "plywood"),
        "plaything": ("cube", "ball"),
    },
}

# Meta-property assignments. Entries may name a class, a subclass, or a single
# category; each expands to the categories beneath it.
META_PROPERTIES: dict[str, tuple[str, ...]] = {
    "has-inside": ("cabinet", "bathtub", "microwave", "oven", "dishwasher", "refrigerator", "sink", "pool",
                   "vessel", "tableware", "utensil", "bag", "basket", "box", "package", "ashcan",
                   "bucket", "xmas stocking"),
    "has-ontop": ("floor", "countertop", "sofa", "bed", "stove", "table", "shelf", "toilet",
                  "furniture", "tray", "xmas tree"),
    "has-size": ("tableware", "tray", "box", "package", "ashcan"),
    "has-color": ("furniture", "vessel", "bag", "basket", "box", "package"),
    "openable": ("cabinet", "microwave", "oven", "dishwasher", "refrigerator",
                 "vessel", "bag", "box", "package"),
    "toggleable": ("microwave", "oven", "dishwasher", "refrigerator", "stove", "sink", "electric equipment"),
    "cookable": ("food",),
    "freezable": ("food",),
    "sliceable": ("fruit", "vegetable", "protein"),
    "dustyable": ("location", "receptacle", "thing"),
    "stainable": ("location",),
    "soakable": ("piece of cloth", "clothing"),
}

# Valid initial positions per movable subclass. Entries name location
# categories or receptacle subclasses.
VALID_POSITIONS: dict[str, tuple[str, ...]] = {
    "furniture": ("floor",),
    "vessel": ("countertop", "table", "cabinet"),
    "tableware": ("countertop", "table", "cabinet", "dishwasher", "refrigerator", "sink"),
    "utensil": ("countertop", "table", "cabinet", "dishwasher", "refrigerator", "sink"),
    "bag": ("floor", "countertop", "table", "sofa", "bed"),
    "bucket": ("floor", "countertop", "table"),
    "tray": ("countertop", "table", "cabinet", "refrigerator"),
    "basket": ("floor", "countertop", "table", "shelf", "cabinet", "sofa", "bed"),
    "box": ("floor", "countertop", "table", "shelf", "cabinet", "sofa", "bed"),
    "package": ("floor", "countertop", "table", "shelf", "cabinet", "sofa", "bed"),
    "ashcan": ("floor",),
    "xmas tree": ("floor",),
    "xmas stocking": ("floor", "countertop", "table", "shelf", "cabinet", "sofa", "bed"),
    "fruit": ("table", "countertop", "refrigerator", "utensil"),
    "vegetable": ("table", "countertop", "refrigerator", "stove", "utensil"),
    "drink": ("table", "countertop", "refrigerator", "cabinet", "bag"),
    "protein": ("table", "countertop", "refrigerator", "stove", "utensil"),
    "flavorer": ("table", "countertop", "refrigerator", "cabinet", "bag"),
    "baked food": ("table", "countertop", "refrigerator", "oven", "tray"),
    "snack": ("table", "countertop", "refrigerator", "microwave", "tray"),
    "prepared food": ("table", "countertop", "refrigerator", "microwave", "tray"),
    "metal tool": ("countertop", "table", "cabinet", "shelf", "furniture"),
    "electric equipment": ("countertop", "table", "cabinet", "shelf", "furniture"),
    "electrical device": ("countertop", "table", "cabinet", "shelf", "furniture"),
    "toiletry": ("cabinet", "toilet", "bathtub", "sink", "pool", "bag"),
    "writing tool": ("countertop", "table", "cabinet", "shelf", "bag"),
    "piece of cloth": ("cabinet", "toilet", "bathtub", "sink", "pool", "bucket"),
    "cleaning tool": ("cabinet", "toilet", "bathtub", "sink", "pool", "bucket"),
    "cleansing": ("cabinet", "toilet", "bathtub", "sink", "pool", "bucket"),
    "cutlery": ("countertop", "table", "cabinet", "dishwasher", "refrigerator", "utensil"),
    "illumination tool": ("countertop", "table", "sofa", "bed", "shelf"),
    "decoration": ("cabinet", "sofa", "bed", "package"),
    "paper product": ("cabinet", "sofa", "bed", "package"),
    "footwear": ("cabinet", "floor"),
    "headwear": ("cabinet", "sofa", "bed", "package"),
    "clothing": ("cabinet", "sofa", "bed", "package"),
    "building materials": ("pool",),
    "plaything": ("cabinet", "sofa", "bed", "package"),
}

# Object categories that qualify as tools for the constrained actions.
SLICE_TOOLS = ("knife", "carving knife")
CLEAN_TOOLS = ("rag", "dishtowel", "hand towel", "scrub brush", "vacuum", "broom")
HEAT_LOCATIONS = ("microwave", "oven", "stove")
COOL_LOCATIONS = ("refrigerator",)
SOAK_LOCATIONS = ("sink",)


@dataclass(frozen=True)
class CategorySpec:
    """A category with its place in the hierarchy and its meta-properties."""

    name: str
    cls: str
    subclass: str
    meta: frozenset[str]

    def has(self, prop: str) -> bool:
        return prop in self.meta

    @property
    def movable(self) -> bool:
        return self.cls != "location"


def _expand(names: tuple[str, ...]) -> set[str]:
    """Expand class/subclass/category names into the set of category names."""
    out: set[str] = set()
    for name in names:
        if name in HIERARCHY:
            for cats in HIERARCHY[name].values():
                out.update(cats)
        else:
            matched = False
            for subs in HIERARCHY.values():
                if name in subs:
                    out.update(subs[name])
                    matched = True
            if not matched:
                out.add(name)
    return out


def _build_catalog() -> dict[str, CategorySpec]:
    expanded = {prop: _expand(names) for prop, names in META_PROPERTIES.items()}
    catalog: dict[str, CategorySpec] = {}
    for cls, subs in HIERARCHY.items():
        for sub, cats in subs.items():
            for cat in cats:
                meta = frozenset(prop for prop, members in expanded.items() if cat in members)
                catalog[cat] = CategorySpec(name=cat, cls=cls, subclass=sub, meta=meta)
    return catalog


CATALOG: dict[str, CategorySpec] = _build_catalog()

LOCATION_CATEGORIES: tuple[str, ...] = tuple(
    c for subs in HIERARCHY["location"].values() for c in subs
)
MOVABLE_CATEGORIES: tuple[str, ...] = tuple(
    c for c in CATALOG if CATALOG[c].cls != "location"
)
MOVABLE_SUBCLASSES: tuple[str, ...] = tuple(
    sub for cls in CLASSES if cls != "location" for sub in HIERARCHY[cls]
)

SUBCLASS_OF: dict[str, str] = {c: CATALOG[c].subclass for c in CATALOG}
CLASS_OF: dict[str, str] = {c: CATALOG[c].cls for c in CATALOG}


def spec(category: str) -> CategorySpec:
    try:
        return CATALOG[category]
    except KeyError:
        raise KeyError(f"unknown category: {category!r}") from None


@lru_cache(maxsize=None)
def categories_matching(name: str) -> frozenset[str]:
    """Categories denoted by a class, subclass, or category name.

    Accepts the singular form of 'building materials' used by some goal
    statements.
    """
    if name == "building material":
        name = "building materials"
    if name in CATALOG:
        return frozenset((name,))
    got = _expand((name,))
    got = {c for c in got if c in CATALOG}
    if not got:
        raise KeyError(f"unknown category group: {name!r}")
    return frozenset(got)


def tier_of(name: str) -> str:
    """Classify a name as 'class', 'subclass', or 'category'."""
    if name in CLASSES:
        return "class"
    if name in CATALOG and name in SUBCLASS_OF and SUBCLASS_OF[name] == name:
        # single-category subclasses (box, tray, ...) default to subclass tier
        return "subclass"
    if name in CATALOG:
        return "category"
    for subs in HIERARCHY.values():
        if name in subs:
            return "subclass"
    raise KeyError(f"unknown tier name: {name!r}")
