"""Planner: search correctness, oracles, truncation."""

import random

import pytest

from homequest import goals, planner, world
from homequest.planner import (
    ConditionGoalAdapter,
    ConjunctiveGoalAdapter,
    NoPredictableCut,
    Plan,
    PlannerConfig,
    build_projection,
    plan,
    plan_for_goal,
    plan_sequential,
    successors,
    truncate,
)
from homequest.scene import SceneConfig, sample_scene
from homequest.world import GroundedAction, HUMAN, ROBOT

from .helpers import build_scene, uniform_cost_search


class TestConditionPlans:
    def test_already_satisfied_goal_gives_empty_plan(self):
        s = build_scene({"apple#0": {"pos": None}}, holding={HUMAN: "apple#0"})
        p = plan(s, ConditionGoalAdapter(("human-holding", "apple#0")), ROBOT)
        assert len(p) == 0 and p.total_cost == 0

    def test_bring_me_matches_optimal_oracle(self):
        # knife in the sink, robot on the floor with the human
        s = build_scene({
            "knife#0": {"pos": ("in", "sink")},
            "apple#0": {"pos": ("on", "table")},
            "plate#0": {"pos": ("on", "table")},
            "rag#0": {"pos": ("in", "bucket#0")},
            "bucket#0": {"pos": ("on", "floor")},
        })
        p = plan(s, ConditionGoalAdapter(("human-holding", "knife#0")), ROBOT)
        final = planner.replay(s, p.actions)
        assert final.holding[HUMAN] == "knife#0"
        optimal = uniform_cost_search(
            s, lambda st: st.holding[HUMAN] == "knife#0", ROBOT)
        assert p.total_cost == optimal == 4  # move, pick, move, give

    def test_one_action_goal(self):
        s = build_scene(robot_at="cabinet")
        p = plan(s, ConditionGoalAdapter(("flag", "cabinet", "open", True)), ROBOT)
        assert p.total_cost == 1

    def test_unroll_like_plan_respects_held_object(self):
        # the human already holds something; delivering requires a swap
        s = build_scene(
            {"apple#0": {"pos": ("on", "table")}, "pen#0": {"pos": None}},
            holding={HUMAN: "pen#0"})
        p = plan(s, ConditionGoalAdapter(("human-holding", "apple#0")), ROBOT)
        final = planner.replay(s, p.actions)
        assert final.holding[HUMAN] == "apple#0"
        assert final.holding[ROBOT] is None or final.holding[ROBOT] != "pen#0"


class TestGoalPlans:
    def test_satisfied_goal_plans_empty(self):
        s = build_scene({"package#0": {"pos": ("on", "table"), "flags": ["open"]}})
        g = goals.GroundGoal(goals.template_by_name("opening packages"), ())
        assert plan_for_goal(s, g, HUMAN).total_cost == 0

    def test_plan_revalidates_through_world_core(self):
        for seed in (11, 12, 13):
            s = sample_scene(SceneConfig(rng_seed=seed))
            g = goals.sample_goal("v1", random.Random(seed))
            try:
                p = plan_for_goal(s, g, HUMAN)
            except planner.PlanError:
                continue
            final = planner.replay(s, p.actions)
            assert g.holds(final)
            final.check_invariants()

    def test_determinism(self):
        s = sample_scene(SceneConfig(rng_seed=15))
        g = goals.sample_goal("v1", random.Random(2))
        try:
            p1 = plan_for_goal(s, g, HUMAN)
            p2 = plan_for_goal(s, g, HUMAN)
        except planner.PlanError:
            pytest.skip("unplannable sample")
        assert p1.actions == p2.actions

    def test_heuristic_zero_exactly_on_goal_states(self):
        s = build_scene({
            "package#0": {"pos": ("on", "table")},
            "package#1": {"pos": ("on", "floor"), "flags": ["open"]},
        })
        g = goals.GroundGoal(goals.template_by_name("opening packages"), ())
        adapter = ConjunctiveGoalAdapter(g)
        P = build_projection(s, adapter.projection_names(), set())
        holds, h, _ = adapter.compile(P, HUMAN)
        st = P.encode(s)
        assert not holds(st) and h(st) > 0
        done = build_scene({
            "package#0": {"pos": ("on", "table"), "flags": ["open"]},
            "package#1": {"pos": ("on", "floor"), "flags": ["open"]},
        })
        st2 = P.encode(done)
        assert holds(st2) and h(st2) == 0

    def test_gbfs_within_factor_of_optimal_on_small_scenes(self):
        # a lighter copy of the acceptance criterion (full run lives there)
        checked = 0
        for seed in range(10):
            s, g = _small_instance(seed)
            if s is None:
                continue
            try:
                p = plan_for_goal(s, g, HUMAN)
            except planner.PlanError:
                continue
            opt = uniform_cost_search(s, lambda st: g.holds(st), HUMAN)
            assert opt is not None
            assert p.total_cost <= 1.5 * opt or p.total_cost <= opt + 1
            checked += 1
        assert checked >= 4


def _small_instance(seed):
    """A 6-object scene plus a compatible goal for oracle comparisons."""
    rng = random.Random(seed)
    movables = {}
    cats = ["apple", "banana", "book", "plate", "rag", "cube"]
    rng.shuffle(cats)
    for i, cat in enumerate(cats[:4]):
        holder = ("table", "cabinet", "floor", "sofa")[rng.randrange(4)]
        rel = "in" if holder == "cabinet" else "on"
        movables[f"{cat}#0"] = {"pos": (rel, holder)}
    movables["box#0"] = {"pos": ("on", "floor")}
    movables["knife#0"] = {"pos": ("on", "table")}
    s = build_scene(movables)
    candidates = [t for t in goals.templates("v1")
                  if t.name in ("boxing books up for storage", "moving boxes to storage",
                                 "opening packages", "putting away toys",
                                 "re-shelving library books", "throwing away leftovers")]
    t = candidates[rng.randrange(len(candidates))]
    try:
        g = goals.instantiate(t, rng)
        planner.check_relaxed_feasibility(s, g)
    except (goals.GoalError, planner.RelaxedUnreachable):
        return None, None
    return s, g


class TestSequential:
    def test_segments_cover_conjuncts_in_order(self):
        s = sample_scene(SceneConfig(rng_seed=16))
        g = goals.sample_goal("v1", random.Random(7))
        try:
            sp = plan_sequential(s, g, HUMAN)
        except planner.PlanError:
            pytest.skip("unplannable sample")
        assert list(sp.conjunct_of_step) == sorted(sp.conjunct_of_step)
        final = planner.replay(s, sp.plan.actions)
        assert g.holds(final)

    def test_tidy_closes_what_it_opened(self):
        found = False
        for seed in range(25):
            s = sample_scene(SceneConfig(rng_seed=seed))
            g = goals.sample_goal("v1", random.Random(seed + 100))
            try:
                sp = plan_sequential(s, g, HUMAN)
            except planner.PlanError:
                continue
            opens = [a for a in sp.plan.actions if a.schema.startswith("open")]
            closes = [a for a in sp.plan.actions if a.schema.startswith("close")]
            if opens:
                found = True
                protected = planner._protected_open(g, s.universe)
                final = planner.replay(s, sp.plan.actions)
                for a in opens:
                    obj = a.args[0]
                    if obj not in protected:
                        assert not final.has_flag(obj, "open"), (g.name, obj)
        assert found


class TestTruncate:
    def test_plan_of_two_forces_t_equal_one(self):
        p = Plan(actions=(GroundedAction("move", HUMAN, ("floor", "table")),
                          GroundedAction("pick-up-at-loc", HUMAN, ("apple#0", "table"))),
                 total_cost=2)
        assert truncate(p, random.Random(0), "v1-uniform") == 1

    def test_uniform_bounds(self):
        acts = tuple(GroundedAction("move", HUMAN, ("floor", "table")) for _ in range(10))
        p = Plan(actions=acts, total_cost=10)
        rng = random.Random(1)
        ts = {truncate(p, rng, "v1-uniform") for _ in range(300)}
        assert min(ts) == 1 and max(ts) == 9

    def test_predictable_mode_requires_category_repetition(self):
        acts = (
            GroundedAction("pick-up-at-loc", HUMAN, ("apple#0", "table")),
            GroundedAction("put-inside-loc", HUMAN, ("apple#0", "sink")),
            GroundedAction("pick-up-at-loc", HUMAN, ("apple#1", "table")),
            GroundedAction("put-inside-loc", HUMAN, ("apple#1", "sink")),
        )
        p = Plan(actions=acts, total_cost=4)
        rng = random.Random(2)
        for _ in range(50):
            t = truncate(p, rng, "v2-predictable")
            nxt = next(planner.manipulated_object(a) for a in acts[t:]
                       if planner.manipulated_object(a))
            cats_before = {planner.manipulated_object(a)[1] for a in acts[:t]
                           if planner.manipulated_object(a)}
            assert nxt[1] in cats_before

    def test_predictable_mode_can_fail(self):
        acts = (
            GroundedAction("pick-up-at-loc", HUMAN, ("apple#0", "table")),
            GroundedAction("put-inside-loc", HUMAN, ("banana#0", "sink")),
        )
        p = Plan(actions=acts, total_cost=2)
        with pytest.raises(NoPredictableCut):
            truncate(p, random.Random(0), "v2-predictable")


class TestTransitionParity:
    def test_planner_successors_match_world_model(self):
        """The compact search transition must mirror world-core exactly."""
        for seed in (31, 32):
            s = sample_scene(SceneConfig(rng_seed=seed, max_instances_per_category=1))
            names = {"fruit", "tableware", "cutlery", "piece of cloth", "box"}
            P = build_projection(s, names, set())
            sub_ids = set(P.ids)
            rng = random.Random(seed)
            cur_world = s
            for _ in range(40):
                st = P.encode(cur_world)
                fast = {}
                for key, nxt in successors(P, st, HUMAN):
                    schema, args = key
                    act = GroundedAction(schema, HUMAN, tuple(P.ids[a] for a in args))
                    fast[act] = nxt
                slow = [a for a in world.valid_actions(cur_world, HUMAN)
                        if a.schema not in world.META_SCHEMAS
                        and all(arg in sub_ids for arg in a.args)]
                assert set(fast) == set(slow), (
                    set(fast) ^ set(slow), cur_world.agent_at)
                action = slow[rng.randrange(len(slow))]
                nxt_world = world.apply(cur_world, action)
                assert P.encode(nxt_world) == fast[action]
                cur_world = nxt_world
