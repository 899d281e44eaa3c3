"""Build src/homequest/data/goal_templates.json from the compact table below.

Run from the repo root: python tools/build_goal_catalog.py
"""

import json
from pathlib import Path


def F(test, y=None, rel=None, xf=(), yf=(), ytest=None, quant="forall"):
    return {
        "quant": quant,
        "test": test,
        "y_ref": y,
        "y_test": ytest,
        "rel": rel,
        "x_flags": [list(t) for t in xf],
        "y_flags": [list(t) for t in yf],
    }


def E(test, y=None, rel=None, xf=(), yf=(), ytest=None):
    return F(test, y=y, rel=rel, xf=xf, yf=yf, ytest=ytest, quant="exists")


def FE(outer, test, rel):
    return {"quant": "forall_exists", "outer_test": outer, "test": test, "rel": rel}


def T(name, conjuncts, shared=(), v2=False):
    return {
        "name": name,
        "v2": v2,
        "shared": [{"var": v, "test": t} for v, t in shared],
        "conjuncts": conjuncts,
    }


TEMPLATES = [
    T("assembling gift baskets", [
        FE("basket", "?[illumination tool]", "in"),
        FE("basket", "?[snack]", "in"),
        FE("basket", "?[baked food]", "in"),
        FE("basket", "?[decoration]", "in"),
    ]),
    T("bottling fruit", [
        F("?[fruit]_1", y="y1", rel="in"),
        F("?[fruit]_2", y="y2", rel="in"),
    ], shared=[("y1", "jar"), ("y2", "jar")]),
    T("boxing books up for storage", [
        F("?[paper product]", ytest="box", rel="in"),
    ], v2=True),
    T("bringing in wood", [
        F("?[building materials]", ytest="floor", rel="on"),
    ], v2=True),
    T("brushing lint off clothing", [
        F("?[clothing]", ytest="bed", rel="on", xf=[("dusty", False)]),
    ]),
    T("chopping vegetables", [
        F("?[fruit]_1", ytest="?[tableware]", rel="in", xf=[("sliced", True)]),
        F("?[fruit]_2", ytest="?[tableware]", rel="in", xf=[("sliced", True)]),
        F("?[vegetable]_1", ytest="?[tableware]", rel="in", xf=[("sliced", True)]),
        F("?[vegetable]_2", ytest="?[tableware]", rel="in", xf=[("sliced", True)]),
    ]),
    T("cleaning bathrooms", [
        F("toilet", xf=[("stained", False)]),
        F("bathtub", xf=[("stained", False)]),
        F("sink", xf=[("stained", False)]),
        F("floor", xf=[("stained", False)]),
        E("rag", ytest="bucket", rel="in", xf=[("soaked", True)]),
    ]),
    T("cleaning bedrooms", [
        F("?[clothing]", ytest="cabinet", rel="in", yf=[("dusty", False)]),
        F("?[decoration]", ytest="cabinet", rel="in"),
        F("?[toiletry]", ytest="cabinet", rel="in"),
        F("?[paper product]", ytest="cabinet", rel="in"),
    ]),
    T("cleaning closet", [
        F("?[decoration]", ytest="cabinet", rel="in", yf=[("dusty", False)]),
        F("?[headwear]", ytest="shelf", rel="on", yf=[("dusty", False)]),
        F("?[footwear]", ytest="floor", rel="on", yf=[("dusty", False)]),
    ]),
    T("cleaning floors", [
        F("floor", xf=[("stained", False), ("dusty", False)]),
    ]),
    T("cleaning garage", [
        F("floor", xf=[("dusty", False)]),
        F("cabinet", xf=[("stained", False)]),
        F("cabinet", xf=[("dusty", False)]),
        F("?[paper product]", ytest="ashcan", rel="in"),
        F("?[vessel]", ytest="table", rel="on"),
    ]),
    T("cleaning high chair", [
        F("?[furniture]", xf=[("dusty", False)]),
    ]),
    T("cleaning kitchen cupboard", [
        F("cabinet", xf=[("dusty", False)]),
        F("?[tableware]_1", ytest="cabinet", rel="in"),
        F("?[tableware]_2", ytest="cabinet", rel="in"),
    ]),
    T("cleaning microwave oven", [
        F("microwave", xf=[("stained", False), ("dusty", False)]),
    ]),
    T("cleaning out drawers", [
        F("?[piece of cloth]", ytest="sink", rel="in"),
        F("?[tableware]", ytest="sink", rel="in"),
        F("?[cutlery]", ytest="sink", rel="in"),
    ]),
    T("cleaning oven", [
        F("oven", xf=[("stained", False)]),
        E("rag", xf=[("soaked", True)]),
    ]),
    T("cleaning shoes", [
        F("?[footwear]", ytest="floor", rel="on"),
        F("?[footwear]", ytest="floor", rel="on", xf=[("dusty", False)]),
    ]),
    T("cleaning stove", [
        F("stove", xf=[("stained", False), ("dusty", False)]),
        F("rag", xf=[("soaked", True)]),
        F("dishtowel", xf=[("soaked", True)]),
    ]),
    T("cleaning table after clearing", [
        F("table", xf=[("stained", False)]),
    ]),
    T("cleaning the pool", [
        F("pool", xf=[("stained", False)]),
        F("scrub brush", ytest="shelf", rel="on"),
        F("cleansing", ytest="floor", rel="on"),
    ]),
    T("cleaning toilet", [
        F("toilet", xf=[("stained", False)]),
        F("scrub brush", ytest="floor", rel="on"),
        F("cleansing", ytest="floor", rel="on"),
    ]),
    T("cleaning up after a meal", [
        F("table", xf=[("stained", False)]),
        F("floor", xf=[("stained", False)]),
        F("?[furniture]", xf=[("dusty", False)]),
        F("?[tableware]_1", xf=[("dusty", False)]),
        F("?[tableware]_2", xf=[("dusty", False)]),
        F("?[tableware]_3", xf=[("dusty", False)]),
        F("?[snack]", ytest="?[bag]", rel="in"),
    ]),
    T("cleaning up refrigerator", [
        F("rag", ytest="sink", rel="in"),
        F("cleansing", ytest="sink", rel="in"),
        F("tray", ytest="refrigerator", rel="in", xf=[("dusty", False)], yf=[("stained", False)]),
        F("?[tableware]", ytest="sink", rel="in", xf=[("dusty", False)]),
    ]),
    T("cleaning up the kitchen only", [
        F("?[vessel]", ytest="countertop", rel="on"),
        F("?[cleansing]", ytest="sink", rel="in"),
        F("?[flavorer]", ytest="cabinet", rel="in"),
        F("?[tableware]", ytest="cabinet", rel="in", xf=[("dusty", False)], yf=[("dusty", False)]),
        F("rag", ytest="sink", rel="in"),
        F("?[utensil]", ytest="refrigerator", rel="in"),
        F("?[fruit]", ytest="refrigerator", rel="in"),
    ]),
    T("clearing the table after dinner", [
        F("?[cutlery]_1", ytest="bucket", rel="in"),
        F("?[cutlery]_2", ytest="bucket", rel="in"),
        F("?[flavorer]", ytest="bucket", rel="in"),
    ], v2=True),
    T("collect misplaced items", [
        F("?[footwear]", ytest="table", rel="on"),
        F("?[decoration]", ytest="table", rel="on"),
        F("?[paper product]", ytest="table", rel="on"),
    ], v2=True),
    T("collecting aluminum cans", [
        F("?[drink]", ytest="ashcan", rel="in"),
    ], v2=True),
    T("filling a Christmas stocking", [
        FE("xmas stocking", "?[plaything]", "in"),
        FE("xmas stocking", "?[snack]", "in"),
        FE("xmas stocking", "?[writing tool]", "in"),
    ]),
    T("filling a Easter basket", [
        F("?[basket]", ytest="countertop", rel="on"),
        FE("basket", "?[protein]", "in"),
        FE("basket", "?[snack]", "in"),
        FE("basket", "?[paper product]", "in"),
        FE("basket", "?[plaything]", "in"),
        F("?[decoration]", ytest="basket", rel="in"),
    ]),
    T("installing a fax machine", [
        F("?[electric equipment]", ytest="table", rel="on", xf=[("toggled", True)]),
    ]),
    T("installing alarms", [
        FE("table", "?[electrical device]", "on"),
        FE("countertop", "?[electrical device]", "on"),
        FE("sofa", "?[electrical device]", "on"),
    ], v2=True),
    T("laying tile floors", [
        F("?[building materials]", ytest="floor", rel="on"),
    ], v2=True),
    T("loading the dishwasher", [
        F("?[tableware]_1", ytest="sink", rel="in"),
        F("?[tableware]_2", ytest="sink", rel="in"),
        F("?[vessel]", ytest="sink", rel="in"),
    ], v2=True),
    T("moving boxes to storage", [
        F("box", ytest="floor", rel="on"),
    ], v2=True),
    T("opening packages", [
        F("package", xf=[("open", True)]),
    ]),
    T("organizing boxes in garage", [
        F("box", ytest="floor", rel="on"),
        F("?[plaything]", y="y1", rel="in"),
        F("?[cutlery]", y="y2", rel="in"),
        F("?[cleansing]", y="y3", rel="in"),
    ], shared=[("y1", "box"), ("y2", "box"), ("y3", "box")], v2=True),
    T("organizing file cabinet", [
        F("?[writing tool]", ytest="table", rel="on"),
        F("?[paper product]", ytest="cabinet", rel="in"),
    ], v2=True),
    T("organizing school stuff", [
        E("?[paper product]", y="y1", rel="in"),
        E("?[writing tool]_1", y="y1", rel="in"),
        E("?[writing tool]_2", y="y1", rel="in"),
        E("?[electrical device]", y="y1", rel="in"),
    ], shared=[("y1", "backpack")]),
    T("packing adult's bag", [
        F("?[decoration]", y="y1", rel="in"),
        E("?[toiletry]_1", y="y1", rel="in"),
        E("?[toiletry]_2", y="y1", rel="in"),
        E("?[electrical device]", y="y1", rel="in"),
    ], shared=[("y1", "backpack")]),
    T("packing bags or suitcase", [
        F("?[clothing]", y="y1", rel="in"),
        E("?[toiletry]", y="y1", rel="in"),
        E("?[cleansing]_1", y="y1", rel="in"),
        E("?[cleansing]_2", y="y1", rel="in"),
        E("?[paper product]", y="y1", rel="in"),
    ], shared=[("y1", "briefcase")]),
    T("packing boxes for household move or trip", [
        F("?[cutlery]", y="y1", rel="in"),
        E("?[piece of cloth]", y="y1", rel="in"),
        F("book", y="y2", rel="in"),
        E("?[clothing]", y="y2", rel="in"),
    ], shared=[("y1", "box"), ("y2", "box")]),
    T("packing child's bag", [
        E("?[headwear]", y="y1", rel="in"),
        E("?[decoration]", y="y1", rel="in"),
        E("?[fruit]", y="y1", rel="in"),
        E("?[paper product]", y="y1", rel="in"),
        E("?[electrical device]", y="y1", rel="in"),
    ], shared=[("y1", "backpack")]),
    T("packing box for work", [
        E("?[fruit]", y="y1", rel="in"),
        E("?[drink]", y="y1", rel="in"),
        E("?[snack]_1", y="y1", rel="in"),
        E("?[snack]_2", y="y1", rel="in"),
    ], shared=[("y1", "box")]),
    T("packing lunches", [
        E("?[snack]_1", y="y1", rel="in"),
        E("?[snack]_1", y="y2", rel="in"),
        E("?[baked food]_1", y="y1", rel="in"),
        E("?[baked food]_1", y="y2", rel="in"),
        E("?[prepared food]", y="y1", rel="in"),
        E("?[snack]_2", y="y2", rel="in"),
        E("?[drink]_1", y="y1", rel="in"),
        E("?[drink]_2", y="y2", rel="in"),
        E("?[fruit]_1", y="y1", rel="in"),
        E("?[fruit]_2", y="y2", rel="in"),
    ], shared=[("y1", "box"), ("y2", "box")]),
    T("packing picnics", [
        E("?[snack]_1", y="y1", rel="in"),
        E("?[snack]_2", y="y1", rel="in"),
        E("?[fruit]_1", y="y2", rel="in"),
        E("?[fruit]_2", y="y2", rel="in"),
        E("?[fruit]_3", y="y2", rel="in"),
        E("?[drink]_1", y="y3", rel="in"),
        E("?[drink]_2", y="y3", rel="in"),
        E("?[drink]_3", y="y3", rel="in"),
    ], shared=[("y1", "box"), ("y2", "box"), ("y3", "box")]),
    T("picking up take out food", [
        F("?[prepared food]", ytest="box", rel="in"),
        F("?[snack]", ytest="box", rel="in"),
        F("?[box]", ytest="floor", rel="on", xf=[("open", True)]),
    ]),
    T("picking up trash", [
        F("?[paper product]", ytest="ashcan", rel="in"),
        F("?[drink]", ytest="ashcan", rel="in"),
    ], v2=True),
    T("polishing furniture", [
        F("table", xf=[("dusty", False)]),
        F("shelf", xf=[("dusty", False)]),
    ]),
    T("polishing shoes", [
        F("rag", ytest="sink", rel="in", xf=[("soaked", True)]),
        F("?[footwear]", xf=[("dusty", False)]),
    ]),
    T("polishing silver", [
        F("?[cutlery]", ytest="cabinet", rel="in", xf=[("dusty", False)]),
        F("rag", ytest="cabinet", rel="in"),
    ]),
    T("preparing food", [
        E("?[vegetable]_1", y="y1", rel="in"),
        E("?[vegetable]_1", y="y2", rel="in"),
        E("?[vegetable]_2", y="y1", rel="in"),
        E("?[vegetable]_2", y="y2", rel="in"),
        E("?[vegetable]_3", y="y1", rel="in", xf=[("sliced", True)]),
        E("?[vegetable]_3", y="y2", rel="in", xf=[("sliced", True)]),
        E("?[fruit]_1", y="y1", rel="in", xf=[("sliced", True)]),
        E("?[fruit]_1", y="y2", rel="in", xf=[("sliced", True)]),
    ], shared=[("y1", "plate"), ("y2", "plate")]),
    T("preserving food", [
        F("?[fruit]", ytest="?[vessel]", rel="in", xf=[("sliced", True), ("cooked", True)]),
        F("?[protein]", ytest="refrigerator", rel="in"),
    ]),
    T("putting away Christmas decorations", [
        F("?[decoration]_1", ytest="cabinet", rel="in"),
        F("?[decoration]_2", ytest="cabinet", rel="in"),
        F("?[decoration]_3", ytest="cabinet", rel="in"),
    ], v2=True),
    T("putting away Halloween decorations", [
        F("?[vegetable]", ytest="cabinet", rel="in"),
        F("?[illumination tool]", ytest="cabinet", rel="in"),
        F("?[vessel]", ytest="table", rel="on"),
    ], v2=True),
    T("putting away toys", [
        F("?[plaything]", ytest="box", rel="in", yf=[("open", False)]),
    ], v2=True),
    T("putting dishes away after cleaning", [
        F("?[tableware]", ytest="cabinet", rel="in"),
    ], v2=True),
    T("putting leftovers away", [
        F("?[prepared food]", ytest="refrigerator", rel="in"),
    ], v2=True),
    T("putting up Christmas decorations inside", [
        F("?[illumination tool]", ytest="table", rel="on"),
        F("?[decoration]_1", ytest="table", rel="on"),
        F("?[decoration]_2", ytest="table", rel="on"),
        F("?[decoration]_3", ytest="table", rel="on"),
    ], v2=True),
    T("re-shelving library books", [
        F("?[paper product]", ytest="shelf", rel="on"),
    ], v2=True),
    T("serving a meal", [
        F("dish", y="y1", rel="on"),
        F("bowl", y="y1", rel="on"),
        F("?[cutlery]_1", y="y1", rel="on"),
        F("?[cutlery]_2", y="y1", rel="on"),
        F("?[drink]", y="y1", rel="on"),
        E("?[protein]", y="y2", rel="in"),
        E("?[protein]", y="y2", rel="in"),
        E("?[prepared food]", y="y2", rel="in"),
        E("?[prepared food]", y="y3", rel="in"),
        E("?[baked food]", y="y2", rel="in"),
        E("?[baked food]", y="y3", rel="in"),
    ], shared=[("y1", "table"), ("y2", "dish"), ("y3", "dish")]),
    T("serving hors d'oeuvres", [
        F("tray", ytest="table", rel="on"),
        F("?[baked food]", ytest="table", rel="on"),
        F("?[vegetable]", ytest="table", rel="on"),
        F("?[prepared food]", ytest="table", rel="on"),
    ], v2=True),
    T("setting up candles", [
        FE("?[furniture]", "?[illumination tool]", "on"),
    ]),
    T("sorting books", [
        F("?[paper product]_1", ytest="shelf", rel="on"),
        F("?[paper product]_2", ytest="shelf", rel="on"),
    ], v2=True),
    T("storing food", [
        F("?[prepared food]", ytest="cabinet", rel="in"),
        F("?[snack]", ytest="cabinet", rel="in"),
        F("?[flavorer]_1", ytest="cabinet", rel="in"),
        F("?[flavorer]_2", ytest="cabinet", rel="in"),
    ], v2=True),
    T("storing the groceries", [
        F("?[fruit]", ytest="refrigerator", rel="in"),
        F("?[protein]", ytest="refrigerator", rel="in"),
        F("?[vegetable]_1", ytest="refrigerator", rel="in"),
        F("?[vegetable]_2", ytest="refrigerator", rel="in"),
    ], v2=True),
    T("thawing frozen food", [
        F("?[fruit]", ytest="sink", rel="in"),
        F("?[protein]", ytest="sink", rel="in"),
        F("?[vegetable]", ytest="sink", rel="in"),
    ], v2=True),
    T("throwing away leftovers", [
        F("?[snack]", ytest="ashcan", rel="in"),
    ], v2=True),
    T("washing dishes", [
        F("?[tableware]_1", xf=[("dusty", False)]),
        F("?[tableware]_2", xf=[("dusty", False)]),
        F("?[tableware]_3", xf=[("dusty", False)]),
    ]),
    T("washing pots and pans", [
        F("?[utensil]", ytest="cabinet", rel="in", xf=[("dusty", False)]),
        F("?[vessel]_1", ytest="cabinet", rel="in", xf=[("dusty", False)]),
        F("?[vessel]_2", ytest="cabinet", rel="in", xf=[("dusty", False)]),
    ]),
]


def main():
    out = Path(__file__).resolve().parents[1] / "src" / "homequest" / "data" / "goal_templates.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = {"version": 1, "templates": TEMPLATES}
    out.write_text(json.dumps(payload, indent=1) + "\n")
    v2 = [t["name"] for t in TEMPLATES if t["v2"]]
    print(f"wrote {out} with {len(TEMPLATES)} templates ({len(v2)} tagged v2)")


if __name__ == "__main__":
    main()
