"""World model: preconditions, effects, enumeration, costs."""

import statistics

import pytest

from homequest import world
from homequest.catalog import CATALOG, HIERARCHY, LOCATION_CATEGORIES, META_PROPERTIES
from homequest.scene import SceneConfig, sample_scene
from homequest.world import GroundedAction, HUMAN, ROBOT, UnknownObjectError

from .helpers import build_scene


def A(schema, agent, *args):
    return GroundedAction(schema, agent, tuple(args))


class TestCatalog:
    def test_total_category_count(self):
        assert len(CATALOG) == 155

    def test_sixteen_locations(self):
        assert len(LOCATION_CATEGORIES) == 16

    def test_every_food_cookable_and_freezable(self):
        for sub, cats in HIERARCHY["food"].items():
            for cat in cats:
                assert CATALOG[cat].has("cookable")
                assert CATALOG[cat].has("freezable")

    def test_meta_property_spot_checks(self):
        assert CATALOG["cabinet"].has("has-inside")
        assert CATALOG["tray"].has("has-ontop")
        assert CATALOG["box"].has("openable")
        assert CATALOG["box"].has("has-size")
        assert CATALOG["box"].has("has-color")
        assert CATALOG["stove"].has("toggleable")
        assert CATALOG["apple"].has("sliceable")
        assert not CATALOG["apple"].has("openable")
        assert CATALOG["rag"].has("soakable")
        assert CATALOG["shirt"].has("soakable")
        assert CATALOG["toilet"].has("stainable")
        assert not CATALOG["apple"].has("dustyable")
        assert CATALOG["cube"].has("dustyable")

    def test_inside_and_ontop_disjoint(self):
        inside = {c for c in CATALOG if CATALOG[c].has("has-inside")}
        ontop = {c for c in CATALOG if CATALOG[c].has("has-ontop")}
        assert not inside & ontop


class TestApplicable:
    def test_pick_from_closed_cabinet_is_false(self):
        s = build_scene({"apple#0": {"pos": ("in", "cabinet")}}, robot_at="cabinet")
        act = A("pick-up-at-loc", ROBOT, "apple#0", "cabinet")
        assert world.applicable(s, act) is False
        assert "closed" in world.explain_inapplicable(s, act)

    def test_identity_move_rejected(self):
        s = build_scene()
        assert world.applicable(s, A("move", ROBOT, "floor", "floor")) is False

    def test_slice_preconditions(self):
        s = build_scene(
            {"apple#0": {"pos": ("on", "table")}, "knife#0": {"pos": None}},
            human_at="table", holding={HUMAN: "knife#0"})
        act = A("slice-obj", HUMAN, "apple#0", "knife#0", "table")
        assert world.applicable(s, act) is True
        # hand-enumerated precondition list: each violation must fail
        away = build_scene(
            {"apple#0": {"pos": ("on", "table")}, "knife#0": {"pos": None}},
            human_at="floor", holding={HUMAN: "knife#0"})
        assert not world.applicable(away, A("slice-obj", HUMAN, "apple#0", "knife#0", "table"))
        no_tool = build_scene(
            {"apple#0": {"pos": ("on", "table")}, "knife#0": {"pos": ("on", "table")}},
            human_at="table")
        assert not world.applicable(no_tool, A("slice-obj", HUMAN, "apple#0", "knife#0", "table"))
        sliced = build_scene(
            {"apple#0": {"pos": ("on", "table"), "flags": ["sliced"]},
             "knife#0": {"pos": None}},
            human_at="table", holding={HUMAN: "knife#0"})
        assert not world.applicable(sliced, A("slice-obj", HUMAN, "apple#0", "knife#0", "table"))
        hammer = build_scene(
            {"apple#0": {"pos": ("on", "table")}, "hammer#0": {"pos": None}},
            human_at="table", holding={HUMAN: "hammer#0"})
        assert not world.applicable(hammer, A("slice-obj", HUMAN, "apple#0", "hammer#0", "table"))

    def test_unknown_object_raises_not_false(self):
        s = build_scene()
        with pytest.raises(UnknownObjectError):
            world.applicable(s, A("pick-up-at-loc", ROBOT, "ghost#9", "floor"))

    def test_heat_only_at_heat_locations(self):
        s = build_scene({"apple#0": {"pos": ("on", "table")}}, robot_at="table")
        assert not world.applicable(s, A("heat-obj", ROBOT, "apple#0", "table"))
        s2 = build_scene({"apple#0": {"pos": ("on", "stove")}}, robot_at="stove")
        assert world.applicable(s2, A("heat-obj", ROBOT, "apple#0", "stove"))

    def test_robot_only_schemas_reject_human(self):
        s = build_scene({"apple#0": {"pos": None}}, holding={HUMAN: "apple#0"})
        assert not world.applicable(s, A("take-from-human", HUMAN, "apple#0"))


class TestApply:
    def test_open_loc_single_effect(self):
        s = build_scene(robot_at="cabinet")
        s2 = world.apply(s, A("open-loc", ROBOT, "cabinet"))
        assert s2.has_flag("cabinet", "open")
        d1 = s.to_json_obj(include_objects=False)
        d2 = s2.to_json_obj(include_objects=False)
        d2["flags"].pop("cabinet")
        assert d1 == d2

    def test_pick_then_put_is_identity(self):
        s = build_scene({"apple#0": {"pos": ("on", "table")}}, robot_at="table")
        s2 = world.apply(s, A("pick-up-at-loc", ROBOT, "apple#0", "table"))
        s3 = world.apply(s2, A("put-ontop-loc", ROBOT, "apple#0", "table"))
        assert s3.digest() == s.digest()

    def test_slice_changes_only_the_flag(self):
        s = build_scene(
            {"apple#0": {"pos": ("on", "table")}, "knife#0": {"pos": None}},
            robot_at="table", holding={ROBOT: "knife#0"})
        s2 = world.apply(s, A("slice-obj", ROBOT, "apple#0", "knife#0", "table"))
        assert s2.has_flag("apple#0", "sliced")
        assert s2.pos["apple#0"] == s.pos["apple#0"]
        d1, d2 = s.to_json_obj(False), s2.to_json_obj(False)
        d2["flags"].pop("apple#0")
        assert d1 == d2

    def test_apply_is_deterministic_and_pure(self):
        s = build_scene({"apple#0": {"pos": ("on", "table")}}, robot_at="table")
        act = A("pick-up-at-loc", ROBOT, "apple#0", "table")
        before = s.to_json()
        a = world.apply(s, act)
        b = world.apply(s, act)
        assert a.to_json() == b.to_json()
        assert s.to_json() == before

    def test_inapplicable_apply_names_the_condition(self):
        s = build_scene({"apple#0": {"pos": ("in", "cabinet")}}, robot_at="cabinet")
        with pytest.raises(world.PreconditionError, match="closed"):
            world.apply(s, A("pick-up-at-loc", ROBOT, "apple#0", "cabinet"))


class TestValidActions:
    def test_empty_room_enumeration(self):
        s = build_scene()
        acts = world.valid_actions(s, ROBOT)
        moves = [a for a in acts if a.schema == "move"]
        assert len(moves) == 15
        schemas = {a.schema for a in acts}
        # floor is not openable/toggleable and holds nothing movable
        assert schemas <= {"move", "examine", "inventory"}
        assert len(acts) == 17

    def test_no_put_or_give_when_empty_handed(self):
        s = sample_scene(SceneConfig(rng_seed=5))
        acts = world.valid_actions(s, ROBOT)
        assert not [a for a in acts if a.schema.startswith("put")]
        assert not [a for a in acts if a.schema == "bring-to-human"]

    def test_typical_scene_magnitude(self):
        lengths = []
        for seed in range(40):
            s = sample_scene(SceneConfig(rng_seed=seed))
            lengths.append(len(world.valid_actions(s, ROBOT)))
        inside = sum(1 for n in lengths if 10 <= n <= 60)
        assert inside >= 0.9 * len(lengths), lengths
        assert 10 <= statistics.median(lengths) <= 60

    def test_every_enumerated_action_is_applicable(self):
        s = sample_scene(SceneConfig(rng_seed=3))
        for action in world.valid_actions(s, ROBOT):
            assert world.applicable(s, action), str(action)

    def test_deterministic_order(self):
        s = sample_scene(SceneConfig(rng_seed=4))
        a = world.valid_actions(s, ROBOT)
        b = world.valid_actions(s, ROBOT)
        assert a == b
        assert a == sorted(a, key=lambda x: (x.schema, x.args))


class TestCosts:
    def test_meta_actions_free_rest_unit(self):
        s = build_scene({"apple#0": {"pos": ("on", "table")}}, robot_at="table")
        assert world.action_cost(s, A("examine", ROBOT)) == 0
        assert world.action_cost(s, A("inventory", ROBOT)) == 0
        assert world.action_cost(s, A("move", ROBOT, "table", "floor")) == 1
        assert world.action_cost(s, A("pick-up-at-loc", ROBOT, "apple#0", "table")) == 1

    def test_cost_additivity(self):
        s = build_scene()
        total = 0
        cur = s
        locs = [l for l in s.universe.locations]
        for i in range(40):
            src = cur.agent_at[ROBOT]
            dst = locs[(locs.index(src) + 1) % len(locs)]
            act = A("move", ROBOT, src, dst)
            total += world.action_cost(cur, act)
            cur = world.apply(cur, act)
        assert total == 40


class TestInvariants:
    def test_position_uniqueness_after_random_walk(self):
        import random
        s = sample_scene(SceneConfig(rng_seed=9))
        rng = random.Random(1)
        cur = s
        for _ in range(60):
            acts = [a for a in world.valid_actions(cur, ROBOT)
                    if a.schema not in world.META_SCHEMAS]
            cur = world.apply(cur, acts[rng.randrange(len(acts))])
            cur.check_invariants()

    def test_closed_world_under_valid_actions(self):
        s = sample_scene(SceneConfig(rng_seed=10))
        for action in world.valid_actions(s, ROBOT):
            for arg in action.args:
                assert arg in s.universe
