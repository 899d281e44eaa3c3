"""Generation pipeline: invariants, determinism, v2 restrictions."""

import json
from pathlib import Path

import pytest

from homequest import planner, world
from homequest.episode import EpisodeSpec
from homequest.generator import generate_dataset, generate_episode, load_manifest
from homequest.quests import grounding_set, literal_meaning, quest_cost
from homequest.rsa import RsaParams, build_quest_model, classify_hardness, rsa_chain
from homequest.utility import compute_utility_table


@pytest.fixture(scope="module")
def bundles():
    out = []
    for seed in range(6):
        out.append(generate_episode(seed, "v1"))
    return out


@pytest.fixture(scope="module")
def v2_bundles():
    return [generate_episode(seed, "v2") for seed in range(200, 206)]


class TestEpisodeInvariants:
    def test_subgoal_inside_utterance(self, bundles):
        for b in bundles:
            ep = b.episode
            s_t = world.apply_all(ep.initial_state(), ep.trajectory)
            am = grounding_set(s_t, ep.subgoal)
            au = grounding_set(s_t, ep.utterance)
            assert am.issubset(au)
            assert literal_meaning(ep.utterance, ep.subgoal, s_t) == 1
            assert quest_cost(ep.utterance) <= quest_cost(ep.subgoal)

    def test_trajectory_reproduces_digest(self, bundles):
        for b in bundles:
            ep = b.episode
            s_t = world.apply_all(ep.initial_state(), ep.trajectory)
            assert s_t.digest() == ep.quest_state_digest

    def test_expert_demo_succeeds(self, bundles):
        for b in bundles:
            ep = b.episode
            s_t = world.apply_all(ep.initial_state(), ep.trajectory)
            end = world.apply_all(s_t, ep.expert_demo)
            members = grounding_set(s_t, ep.subgoal).members()
            assert any(mg.holds(end) for mg in members)

    def test_subgoal_not_satisfied_at_quest_state(self, bundles):
        for b in bundles:
            ep = b.episode
            s_t = world.apply_all(ep.initial_state(), ep.trajectory)
            members = grounding_set(s_t, ep.subgoal).members()
            assert not any(mg.holds(s_t) for mg in members)

    def test_hardness_rederives(self, bundles):
        params = RsaParams()
        for b in bundles:
            ep = b.episode
            s_t = world.apply_all(ep.initial_state(), ep.trajectory)
            table, ctg = compute_utility_table(s_t, ep.goal, (ep.subgoal.quest_type,))
            model = build_quest_model(s_t, ep.goal, ep.subgoal.quest_type,
                                      params, (table, ctg))
            chain = rsa_chain(model, ep.subgoal, params)
            level = classify_hardness(model, ep.subgoal, ep.utterance, params, chain)
            assert level == ep.hardness

    def test_byte_identical_regeneration(self):
        a = generate_episode(42, "v1").episode.to_json()
        b = generate_episode(42, "v1").episode.to_json()
        assert a == b

    def test_serialization_round_trip(self, bundles):
        for b in bundles:
            ep = b.episode
            ep2 = EpisodeSpec.from_json_obj(json.loads(ep.to_json()))
            assert ep2.to_json() == ep.to_json()


class TestV2:
    def test_bring_me_only_with_annotation(self, v2_bundles):
        for b in v2_bundles:
            ep = b.episode
            assert ep.subgoal.quest_type == "bring-me"
            assert ep.utterance.quest_type == "bring-me"
            assert ep.subgoal_annotation is not None
            assert "formula" in ep.subgoal_annotation

    def test_predictability_audit(self, v2_bundles):
        """Some previously manipulated object shares a category with the
        queried objects."""
        for b in v2_bundles:
            ep = b.episode
            s_t = world.apply_all(ep.initial_state(), ep.trajectory)
            manipulated = set()
            for a in ep.trajectory:
                m = planner.manipulated_object(a)
                if m is not None:
                    manipulated.add(m[1])
            queried = {s_t.universe.category(o)
                       for o in grounding_set(s_t, ep.subgoal).objs}
            assert queried & manipulated, (queried, manipulated)

    def test_v2_templates_only(self, v2_bundles):
        from homequest.goals import templates
        v2_names = {t.name for t in templates("v2")}
        for b in v2_bundles:
            assert b.episode.goal.template.name in v2_names


class TestDataset:
    def test_generate_dataset_writes_manifest_and_files(self, tmp_path):
        summary = generate_dataset(4, "v1", tmp_path, seed=5)
        files = sorted(p.name for p in tmp_path.glob("episode_*.json"))
        assert len(files) == 4
        assert summary["episodes"] == 4
        assert summary["per_level"] == {"1": 1, "2": 1, "3": 1, "4": 1}
        manifest = load_manifest(tmp_path)
        assert len(manifest) == 4
        assert {r["path"] for r in manifest} == set(files)
        assert (tmp_path / "summary.json").exists()

    def test_level_targeting(self, tmp_path):
        generate_dataset(2, "v1", tmp_path, seed=9, target_level=4)
        for rec in load_manifest(tmp_path):
            assert rec["level"] == 4

    def test_split_ratio_validation(self, tmp_path):
        with pytest.raises(ValueError):
            generate_dataset(1, "v1", tmp_path, split_ratios=(0.5, 0.2, 0.2))
