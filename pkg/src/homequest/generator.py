"""End-to-end episode generation.

Pipeline per episode: sample a scene and a goal, plan the human trajectory,
truncate it, sample a useful subgoal from the Boltzmann prior, speak it
through the iterated rational speaker, classify hardness, and attach an
expert demonstration. Rejection sampling (bounded retries on fresh
substreams) handles unplannable goals, degenerate quest states, and, when a
target hardness level is requested, level mismatches.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import logic, rng as rngmod, text, world
from .episode import EpisodeSpec
from .goals import GroundGoal, sample_goal
from .planner import (
    NoPredictableCut,
    PlanError,
    PlannerConfig,
    SegmentedPlan,
    manipulated_object,
    plan,
    plan_sequential,
    replay,
    truncate,
)
from .quests import GroundedSubgoal, LiftedSubgoal, grounding_set, quest_cost
from .rsa import QuestModel, RsaChain, RsaParams, build_quest_model, classify_hardness, rsa_chain, sample_utterance
from .utility import compute_utility_table, quest_macro, subgoal_condition
from .planner import ConditionGoalAdapter
from .world import HUMAN, ROBOT

log = logging.getLogger(__name__)

MIN_PLAN_LENGTH = 14
ATTEMPTS = 50
MEANING_DRAWS = 30
PAIR_DRAWS = 80
QUEST_TYPES_V1 = ("bring-me", "move-to", "change-state")


class GenerationError(Exception):
    pass


@dataclass
class EpisodeBundle:
    episode: EpisodeSpec
    quest_type: str
    plan_length: int
    truncation: int


def _derive_seed(seed: int, *labels) -> int:
    return rngmod.substream(seed, *labels).getrandbits(63)


def _next_subgoal_object(sp: SegmentedPlan, t: int) -> Optional[str]:
    for action in sp.plan.actions[t:]:
        m = manipulated_object(action)
        if m is not None:
            return m[0]
    return None


def _assign_split(seed: int, ratios: tuple[float, float, float]) -> str:
    r = rngmod.substream(seed, "split").random()
    if r < ratios[0]:
        return "train"
    if r < ratios[0] + ratios[1]:
        return "validation"
    return "test"


def expert_demo(state, m: LiftedSubgoal, config: PlannerConfig = PlannerConfig()):
    """Plan from the quest state to the cheapest grounding of the subgoal."""
    members = grounding_set(state, m).members()
    if not members:
        raise GenerationError("empty grounding set")
    ranked = []
    for mg in members:
        try:
            cost = len(quest_macro(state, mg))
        except Exception:
            continue
        ranked.append((cost, mg.obj, mg.target or "", mg.verb or "", mg))
    if not ranked:
        raise GenerationError("no achievable grounding for the demo")
    ranked.sort(key=lambda t: t[:4])
    mg = ranked[0][4]
    demo = plan(state, ConditionGoalAdapter(subgoal_condition(mg, state)), ROBOT, config)
    return demo.actions, mg


def generate_episode(seed: int, version: str = "v1",
                     target_level: Optional[int] = None,
                     params: RsaParams = RsaParams(),
                     split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
                     config: PlannerConfig = PlannerConfig()) -> EpisodeBundle:
    """Deterministic per (seed, version, target_level)."""
    if version not in ("v1", "v2"):
        raise ValueError(f"unknown version {version!r}")
    for attempt in range(ATTEMPTS):
        bundle = _attempt(seed, version, attempt, target_level, params, split_ratios, config)
        if bundle is not None:
            return bundle
    raise GenerationError(
        f"retry budget exhausted (seed={seed}, version={version}, level={target_level})")


def _attempt(seed, version, attempt, target_level, params, split_ratios, config):
    from .scene import SceneConfig, sample_scene

    scene_state = sample_scene(SceneConfig(rng_seed=_derive_seed(seed, "scene", attempt)))
    goal = sample_goal(version, rngmod.substream(seed, "goal", attempt))
    try:
        sp = plan_sequential(scene_state, goal, HUMAN, config)
    except PlanError:
        return None
    if len(sp.plan) < MIN_PLAN_LENGTH:
        return None

    rng_t = rngmod.substream(seed, "truncate", attempt)
    try:
        mode = "v2-predictable" if version == "v2" else "v1-uniform"
        t = truncate(sp.plan, rng_t, mode)
    except (NoPredictableCut, PlanError):
        return None
    s_t = replay(scene_state, sp.plan.actions[:t])
    if goal.holds(s_t):
        return None

    if version == "v2":
        quest_type = "bring-me"
        # the quest must be predictable: some queried object's category was
        # already manipulated before the cut
        seen_categories = {
            m[1] for m in (manipulated_object(a) for a in sp.plan.actions[:t])
            if m is not None}
    else:
        quest_type = QUEST_TYPES_V1[
            rngmod.substream(seed, "type", attempt).randrange(len(QUEST_TYPES_V1))]
        seen_categories = None

    try:
        table, ctg = compute_utility_table(s_t, goal, (quest_type,), config)
        model = build_quest_model(s_t, goal, quest_type, params, (table, ctg))
    except (PlanError, ValueError):
        return None

    rng_m = rngmod.substream(seed, "meaning", attempt)
    rng_u = rngmod.substream(seed, "utterance", attempt)
    chains: dict[LiftedSubgoal, RsaChain] = {}

    def chain_for(m: LiftedSubgoal) -> RsaChain:
        if m not in chains:
            chains[m] = rsa_chain(model, m, params)
        return chains[m]

    useful_keys = table.useful_keys(quest_type)

    def acceptable_meaning(m: LiftedSubgoal, idx: int) -> bool:
        if model.utility_of(idx) <= 0:
            return False
        gs = model.grounding(idx)
        # the human only quests for strictly useful subgoals
        if quest_type == "change-state":
            if not gs.pair_set() <= table.useful_keys(quest_type, m.verb):
                return False
        elif not gs.pair_set() <= useful_keys:
            return False
        if seen_categories is not None and not any(
                s_t.universe.category(o) in seen_categories for o in gs.objs):
            return False
        for mg in gs.members():
            if mg.holds(s_t):
                return False  # degenerate: already satisfied at the quest state
        return True

    found = None
    draws = PAIR_DRAWS if target_level is not None else MEANING_DRAWS
    for _ in range(draws):
        idx = model.sample_meaning(rng_m)
        m = model.meaning(idx)
        if not acceptable_meaning(m, idx):
            continue
        chain = chain_for(m)
        try:
            u = sample_utterance(model, m, rng_u, params, chain)
            level = classify_hardness(model, m, u, params, chain)
        except Exception:
            continue
        if target_level is not None and level != target_level:
            continue
        found = (m, u, level, chain)
        break
    if found is None:
        return None
    m, u, level, chain = found

    try:
        demo_actions, demo_mg = expert_demo(s_t, m, config)
    except (GenerationError, PlanError):
        return None

    annotation = None
    if version == "v2":
        cidx = sp.conjunct_of_step[t]
        annotation = {
            "conjunct_index": cidx,
            "formula": logic.render(goal.conjunct_formula(cidx)),
        }

    utterance_text = text.render_utterance(u, rngmod.substream(seed, "text", attempt))
    episode = EpisodeSpec(
        seed=seed,
        version=version,
        scene=scene_state.to_json_obj(),
        goal=goal,
        trajectory=tuple(sp.plan.actions[:t]),
        quest_state_digest=s_t.digest(),
        subgoal=m,
        utterance=u,
        utterance_text=utterance_text,
        hardness=level,
        split=_assign_split(seed, split_ratios),
        expert_demo=tuple(demo_actions),
        subgoal_annotation=annotation,
    )
    _validate(episode, s_t, model, params)
    return EpisodeBundle(episode=episode, quest_type=quest_type,
                         plan_length=len(sp.plan), truncation=t)


def _validate(ep: EpisodeSpec, s_t, model: QuestModel, params: RsaParams) -> None:
    am = grounding_set(s_t, ep.subgoal)
    au = grounding_set(s_t, ep.utterance)
    if not am.issubset(au):
        raise GenerationError("utterance does not cover the subgoal")
    if quest_cost(ep.utterance) > quest_cost(ep.subgoal):
        raise GenerationError("utterance costs more than the subgoal")
    cur = world.apply_all(ep.initial_state(), ep.trajectory)
    if cur.digest() != ep.quest_state_digest:
        raise GenerationError("trajectory does not reproduce the quest state")
    demo_end = world.apply_all(cur, ep.expert_demo)
    if not any(mg.holds(demo_end) for mg in am.members()):
        raise GenerationError("expert demo does not achieve the subgoal")


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


def _episode_task(args) -> tuple[int, Optional[dict], Optional[str]]:
    index, seed, version, target_level, out_dir = args
    try:
        bundle = generate_episode(seed, version, target_level)
    except GenerationError as exc:
        return index, None, str(exc)
    path = Path(out_dir) / f"episode_{index:06d}.json"
    path.write_text(bundle.episode.to_json())
    record = {
        "path": path.name,
        "level": bundle.episode.hardness,
        "type": bundle.quest_type,
        "split": bundle.episode.split,
        "seed": seed,
        "plan_length": bundle.plan_length,
        "trajectory_length": bundle.truncation,
    }
    return index, record, None


def generate_dataset(n: int, version: str, out_dir: Path | str, seed: int = 0,
                     split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
                     target_level: Optional[int] = None,
                     stratify: Optional[bool] = None,
                     workers: int = 1) -> dict:
    """Write n episode files plus manifest.jsonl and summary.json.

    v1 defaults to level-stratified generation (n/4 per level); v2 keeps the
    natural hardness distribution.
    """
    if abs(sum(split_ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if stratify is None:
        stratify = version == "v1" and target_level is None

    tasks = []
    for i in range(n):
        if target_level is not None:
            level = target_level
        elif stratify:
            level = (i % 4) + 1
        else:
            level = None
        tasks.append((i, _derive_seed(seed, "episode", i), version, level, str(out)))

    records: dict[int, dict] = {}
    failures: list[str] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, record, err in pool.map(_episode_task, tasks, chunksize=4):
                if record is None:
                    failures.append(f"episode_{index:06d}: {err}")
                else:
                    records[index] = record
    else:
        for task in tasks:
            index, record, err = _episode_task(task)
            if record is None:
                failures.append(f"episode_{index:06d}: {err}")
            else:
                records[index] = record

    manifest_path = out / "manifest.jsonl"
    with manifest_path.open("w") as fh:
        for i in sorted(records):
            fh.write(json.dumps(records[i], sort_keys=True) + "\n")

    summary = summarize_manifest(records.values())
    summary["requested"] = n
    summary["failures"] = failures
    (out / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    return summary


def summarize_manifest(records) -> dict:
    per_level: dict[str, int] = {}
    per_type: dict[str, int] = {}
    per_split: dict[str, int] = {}
    n = 0
    for rec in records:
        n += 1
        per_level[str(rec["level"])] = per_level.get(str(rec["level"]), 0) + 1
        per_type[rec["type"]] = per_type.get(rec["type"], 0) + 1
        per_split[rec["split"]] = per_split.get(rec["split"], 0) + 1
    return {
        "episodes": n,
        "per_level": dict(sorted(per_level.items())),
        "per_type": dict(sorted(per_type.items())),
        "per_split": dict(sorted(per_split.items())),
    }


def load_manifest(dataset_dir: Path | str) -> list[dict]:
    path = Path(dataset_dir) / "manifest.jsonl"
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
