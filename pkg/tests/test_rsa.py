"""The iterated speaker: fixture oracle, normalization, sampling."""

import json
import math
import random
from pathlib import Path

import numpy as np
import pytest

from homequest import rsa
from homequest.quests import GroundingSet, LiftedSubgoal, MeaningLattice
from homequest.rsa import RsaParams, rsa_chain
from homequest.utility import UtilityTable

from .helpers import build_scene

FIXTURE = json.loads((Path(__file__).parent / "data" / "rsa_fixture.json").read_text())


def fixture_model():
    """A quest model wired to the hand-computed 3-meaning lattice.

    Objects a/b/c are realized as knife#0 (tool, knife), hammer#0 (tool), and
    apple#0 (food): m0={category knife}, m1={class tool}, m2={} then ground
    exactly like the fixture's nested sets.
    """
    state = build_scene({
        "knife#0": {"pos": ("on", "table")},
        "hammer#0": {"pos": ("on", "table")},
        "apple#0": {"pos": ("on", "table")},
    })
    meanings = [
        LiftedSubgoal(quest_type="bring-me", tier=("category", "knife")),
        LiftedSubgoal(quest_type="bring-me", tier=("class", "tool")),
        LiftedSubgoal(quest_type="bring-me"),
    ]
    objs = [
        frozenset({"knife#0"}),
        frozenset({"knife#0", "hammer#0"}),
        frozenset({"knife#0", "hammer#0", "apple#0"}),
    ]
    lattice = MeaningLattice(
        quest_type="bring-me", meanings=meanings, objs=objs,
        targets=[frozenset()] * 3)
    v0 = 10
    # landing values chosen so utilities come out (4, 1, 0) as in the oracle
    bring = {"knife#0": 6, "hammer#0": 12, "apple#0": 12}
    table = UtilityTable(v0=v0, bring=bring, move={}, change={})
    model = rsa.QuestModel(state, lattice, table, ctg=None, params=RsaParams())
    return state, model, meanings


class TestFixture:
    def test_utilities_match_oracle(self):
        _, model, _ = fixture_model()
        assert np.allclose(model.utilities, FIXTURE["utilities"])

    def test_prior_matches_oracle(self):
        _, model, _ = fixture_model()
        assert np.allclose(model.prior, FIXTURE["prior"], atol=1e-12)

    def test_every_iteration_matches_within_1e9(self):
        _, model, meanings = fixture_model()
        params = RsaParams()
        # the fixture's utterance alternatives are the three descriptions
        chain = rsa_chain(model, meanings[0], params, keep_all=True,
                          utterances=list(meanings))
        for j in range(params.k + 1):
            got = chain.all_listener[j]
            want = np.array(FIXTURE["listener"][f"L{j}"])
            assert np.max(np.abs(got - want)) < 1e-9, f"L{j}"
        for j in range(1, params.k + 1):
            got = chain.all_speaker[j]
            want = np.array(FIXTURE["speaker"][f"S{j}"])
            assert np.max(np.abs(got - want)) < 1e-9, f"S{j}"

    def test_final_speaker_matches_oracle(self):
        _, model, meanings = fixture_model()
        params = RsaParams()
        chain = rsa_chain(model, meanings[0], params, utterances=list(meanings))
        utterances, probs = rsa.speaker_distribution(model, meanings[0], params, chain)
        want = [FIXTURE["speaker"]["S10"][u][0] for u in range(3)]
        assert np.allclose(probs, want, atol=1e-9)


class TestDistributionProperties:
    def test_rows_normalize_to_one(self):
        _, model, meanings = fixture_model()
        chain = rsa_chain(model, meanings[0], RsaParams(), keep_all=True,
                          utterances=list(meanings))
        for j, L in enumerate(chain.all_listener):
            sums = L.sum(axis=1)
            assert np.all(np.abs(sums - 1.0) < 1e-9), f"L{j}"
        for j, S in enumerate(chain.all_speaker):
            if S is None:
                continue
            sums = S.sum(axis=0)
            assert np.all(np.abs(sums - 1.0) < 1e-9), f"S{j}"

    def test_cost_only_speaker_odds(self):
        """One meaning, two utterances with costs 0 and 2: the log-listener
        terms cancel, so the speaker prefers the free utterance with odds
        exp(alpha * alpha' * 2) = e^4 at every level."""
        state = build_scene({"knife#0": {"pos": ("on", "table")}})
        meanings = [LiftedSubgoal(quest_type="bring-me",
                                  tier=("subclass", "cutlery"))]
        lattice = MeaningLattice("bring-me", meanings,
                                 [frozenset({"knife#0"})], [frozenset()])
        table = UtilityTable(v0=5, bring={"knife#0": 3}, move={}, change={})
        params = RsaParams()
        model = rsa.QuestModel(state, lattice, table, None, params)
        utterances, probs = rsa.speaker_distribution(model, meanings[0], params)
        costs = {u: rsa.quest_cost(u) for u in utterances}
        p_free = sum(p for u, p in zip(utterances, probs) if costs[u] == 0)
        p_two = sum(p for u, p in zip(utterances, probs) if costs[u] == 2)
        assert p_two > 0
        assert math.isclose(p_free / p_two, math.exp(4.0), rel_tol=1e-9)

    def test_boltzmann_ratio_example(self):
        """Two candidates with equal cost and utilities 5 vs 2 have prior
        probability ratio exp(beta1 * 3) = e^9."""
        state = build_scene({
            "knife#0": {"pos": ("on", "table")},
            "fork#0": {"pos": ("in", "sink")},
        })
        meanings = [
            LiftedSubgoal(quest_type="bring-me", tier=("category", "knife")),
            LiftedSubgoal(quest_type="bring-me", tier=("category", "fork")),
        ]
        lattice = MeaningLattice("bring-me", meanings,
                                 [frozenset({"knife#0"}), frozenset({"fork#0"})],
                                 [frozenset()] * 2)
        table = UtilityTable(v0=9, bring={"knife#0": 4, "fork#0": 7}, move={}, change={})
        model = rsa.QuestModel(state, lattice, table, None, RsaParams())
        ratio = model.prior[0] / model.prior[1]
        assert math.isclose(ratio, math.exp(9.0), rel_tol=1e-9)

    def test_empirical_sampling_matches_probabilities(self):
        _, model, _ = fixture_model()
        rng = random.Random(9)
        n = 100_000
        counts = [0, 0, 0]
        for _ in range(n):
            counts[model.sample_meaning(rng)] += 1
        for i in range(3):
            assert abs(counts[i] / n - model.prior[i]) < 0.01

    def test_sampled_utterance_always_covers_meaning(self):
        state, model, meanings = fixture_model()
        rng = random.Random(3)
        params = RsaParams()
        for m in meanings:
            for _ in range(40):
                u = rsa.sample_utterance(model, m, rng, params)
                assert rsa.grounding_set(state, m).issubset(rsa.grounding_set(state, u))

    def test_empty_meaning_utterance_is_itself(self):
        state, model, meanings = fixture_model()
        u = rsa.sample_utterance(model, meanings[2], random.Random(0), RsaParams())
        assert u == meanings[2]


class TestParams:
    def test_defaults_match_published_constants(self):
        p = RsaParams()
        assert (p.beta1, p.beta2, p.alpha, p.alpha_prime, p.k) == (3.0, 1.5, 2.0, 1.0, 10)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            RsaParams(beta1=0)
        with pytest.raises(ValueError):
            RsaParams(k=0)
