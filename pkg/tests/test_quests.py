"""Lifted subgoals: matching, grounding sets, costs, relaxations."""

import random

import pytest

from homequest import quests
from homequest.quests import (
    GroundedSubgoal,
    LiftedSubgoal,
    enumerate_lattice,
    grounding_set,
    literal_meaning,
    matches,
    quest_cost,
)
from homequest.scene import SceneConfig, sample_scene

from .helpers import build_scene


def bring(**kw):
    return LiftedSubgoal(quest_type="bring-me", **kw)


class TestQuestCost:
    def test_cost_table_examples(self):
        assert quest_cost(bring()) == 0
        assert quest_cost(bring(tier=("class", "food"))) == 1
        assert quest_cost(bring(tier=("category", "apple"), source="table")) == 4
        move = LiftedSubgoal(
            quest_type="move-to", tier=("subclass", "box"),
            attributes=(("color", "red"), ("size", "large")), target="sofa")
        assert quest_cost(move) == 5
        assert quest_cost(LiftedSubgoal(quest_type="move-to")) == 0
        slice_none = LiftedSubgoal(quest_type="change-state", verb="slice")
        assert quest_cost(slice_none) == 0
        slice_full = LiftedSubgoal(
            quest_type="change-state", verb="slice", tier=("category", "apple"),
            attributes=(("frozen", False),), source="table")
        assert quest_cost(slice_full) == 5


class TestGroundingSets:
    def scene(self):
        return build_scene({
            "knife#0": {"pos": ("in", "sink")},
            "knife#1": {"pos": ("on", "table")},
            "apple#0": {"pos": ("on", "table")},
            "box#0": {"pos": ("on", "floor"), "size": "large", "color": "red"},
            "box#1": {"pos": ("on", "floor"), "size": "small", "color": "red"},
        })

    def test_empty_specifier_covers_every_movable(self):
        s = self.scene()
        gs = grounding_set(s, bring())
        assert gs.objs == frozenset(s.universe.movables)

    def test_category_plus_source_singleton(self):
        s = self.scene()
        gs = grounding_set(s, bring(tier=("category", "knife"), source="sink"))
        assert gs.objs == frozenset({"knife#0"})

    def test_matches_is_exhaustive_filter(self):
        rng = random.Random(0)
        s = sample_scene(SceneConfig(rng_seed=40))
        lattice = enumerate_lattice(s, "bring-me")
        for _ in range(200):
            i = rng.randrange(len(lattice))
            m = lattice.meanings[i]
            brute = frozenset(o for o in s.universe.movables if matches(s, o, m))
            assert lattice.objs[i] == brute

    def test_negative_attribute_requires_support(self):
        s = self.scene()
        gs = grounding_set(s, bring(attributes=(("sliced", False),)))
        # boxes are not sliceable, so "unsliced" excludes them
        assert gs.objs == frozenset({"apple#0"})

    def test_static_attributes(self):
        s = self.scene()
        gs = grounding_set(s, bring(attributes=(("size", "large"),)))
        assert gs.objs == frozenset({"box#0"})

    def test_move_to_pairs_exclude_self(self):
        s = self.scene()
        m = LiftedSubgoal(quest_type="move-to", tier=("subclass", "box"))
        gs = grounding_set(s, m)
        pairs = gs.pair_set()
        assert ("box#0", "box#1") in pairs
        assert ("box#0", "box#0") not in pairs

    def test_change_state_grounding_requires_verb_support(self):
        s = self.scene()
        m = LiftedSubgoal(quest_type="change-state", verb="slice")
        gs = grounding_set(s, m)
        assert gs.objs == frozenset({"apple#0"})


class TestLiteralMeaning:
    def test_reflexive(self):
        s = self.scene = TestGroundingSets().scene()
        m = bring(tier=("category", "knife"), source="sink")
        assert literal_meaning(m, m, s) == 1

    def test_empty_covers_specific(self):
        s = TestGroundingSets().scene()
        m = bring(tier=("category", "knife"), source="sink")
        assert literal_meaning(bring(), m, s) == 1
        assert literal_meaning(m, bring(), s) == 0

    def test_superset_specifier_zero_unless_grounding_equal(self):
        s = TestGroundingSets().scene()
        m = bring(tier=("category", "knife"))
        u_more = bring(tier=("category", "knife"), source="sink")
        assert literal_meaning(u_more, m, s) == 0
        # extensionally equal despite extra specifier
        m2 = bring(tier=("category", "apple"))
        u2 = bring(tier=("category", "apple"), source="table")
        assert literal_meaning(u2, m2, s) == 1

    def test_cross_type_and_cross_verb_zero(self):
        s = TestGroundingSets().scene()
        m = bring()
        u = LiftedSubgoal(quest_type="move-to")
        assert literal_meaning(u, m, s) == 0
        a = LiftedSubgoal(quest_type="change-state", verb="slice")
        b = LiftedSubgoal(quest_type="change-state", verb="heat")
        assert literal_meaning(a, b, s) == 0


class TestRelaxations:
    def test_contains_self_and_empty(self):
        m = bring(tier=("category", "knife"), attributes=(("dusty", True),), source="sink")
        rel = m.relaxations()
        assert m in rel
        assert bring() in rel
        assert len(rel) == 8  # 2^3 subsets of {tier, attr, source}

    def test_relaxations_never_cost_more(self):
        m = LiftedSubgoal(
            quest_type="move-to", tier=("subclass", "box"),
            attributes=(("color", "red"),), target="sofa")
        for u in m.relaxations():
            assert quest_cost(u) <= quest_cost(m)

    def test_empty_subgoal_relaxes_only_to_itself(self):
        m = bring()
        assert m.relaxations() == [m]


class TestGroundedSubgoal:
    def test_bring_me_holds(self):
        s = build_scene({"apple#0": {"pos": None}}, holding={"human": "apple#0"})
        assert GroundedSubgoal("bring-me", "apple#0").holds(s)
        assert not GroundedSubgoal("bring-me", "apple#0").holds(build_scene(
            {"apple#0": {"pos": ("on", "table")}}))

    def test_move_to_holds_direct_only(self):
        s = build_scene({
            "plate#0": {"pos": ("on", "table")},
            "apple#0": {"pos": ("in", "plate#0")},
        })
        assert GroundedSubgoal("move-to", "plate#0", target="table").holds(s)
        # apple is in the plate, not directly on the table
        assert not GroundedSubgoal("move-to", "apple#0", target="table").holds(s)

    def test_change_state_clean_requires_both_flags_clear(self):
        dirty = build_scene({"box#0": {"pos": ("on", "floor"), "flags": ["dusty"]}})
        assert not GroundedSubgoal("change-state", "box#0", verb="clean").holds(dirty)
        clean = build_scene({"box#0": {"pos": ("on", "floor")}})
        assert GroundedSubgoal("change-state", "box#0", verb="clean").holds(clean)


class TestLattice:
    def test_lattice_groundings_nonempty(self):
        s = sample_scene(SceneConfig(rng_seed=41))
        for qt in ("bring-me", "change-state"):
            lattice = enumerate_lattice(s, qt)
            assert len(lattice) > 0
            for i in range(0, len(lattice), max(1, len(lattice) // 50)):
                assert not lattice.grounding(i).is_empty()

    def test_serialization_round_trip(self):
        m = LiftedSubgoal(
            quest_type="move-to", tier=("subclass", "box"),
            attributes=(("color", "red"), ("open", False)), source="floor", target="sofa")
        m2 = LiftedSubgoal.from_json_obj(m.to_json_obj())
        assert m2 == m
