"""Baseline agents and the evaluation harness.

Random picks a uniformly random world-changing action each step. Heuristic
(full observability only) grounds the utterance against the symbolic quest
state, prefers candidates whose category the human already manipulated, and
commits to a single guess: it emits one plan and stops, win or lose.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Optional

from . import rng as rngmod, text, world
from .env import EnvSession
from .episode import EpisodeSpec
from .planner import ConditionGoalAdapter, PlanError, PlannerConfig, manipulated_object, plan
from .quests import grounding_set
from .utility import quest_macro, subgoal_condition
from .world import ROBOT


class RandomAgent:
    """Uniform over valid world-changing actions (meta actions excluded)."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = None

    def begin(self, episode_seed: int):
        self._rng = rngmod.substream(self.seed, "random-agent", episode_seed)

    def act(self, session: EnvSession) -> str:
        actions = [a for a in world.valid_actions(session.state, ROBOT)
                   if a.schema not in world.META_SCHEMAS]
        choice = actions[self._rng.randrange(len(actions))]
        return text.render_command(choice)

    def run(self, session: EnvSession) -> None:
        session.reset()
        while not session.done:
            session.step(self.act(session))


class HeuristicAgent:
    """One-trial symbolic baseline with access to the quest's logical form.

    Groundings of the utterance are ranked by whether their object's category
    appears among the objects the human manipulated, then by plan cost, then
    by id; the agent executes the plan for the top candidate and stops.
    """

    def __init__(self, config: PlannerConfig = PlannerConfig()):
        self.config = config

    def solve(self, episode: EpisodeSpec) -> list[str]:
        state = episode.initial_state()
        state = world.apply_all(state, episode.trajectory)
        floor = state.universe.location_of_category("floor")
        agent_at = dict(state.agent_at)
        agent_at[ROBOT] = floor
        state = world.WorldState(state.universe, dict(state.pos), dict(state.flags),
                                 agent_at, dict(state.holding))

        manipulated = set()
        for action in episode.trajectory:
            m = manipulated_object(action)
            if m is not None:
                manipulated.add(m[1])

        members = grounding_set(state, episode.utterance).members()
        if not members:
            return []
        ranked = []
        for mg in members:
            cat = state.universe.category(mg.obj)
            repeated = 0 if cat in manipulated else 1
            try:
                cost = len(quest_macro(state, mg))
            except Exception:
                continue
            ranked.append((repeated, cost, mg.obj, mg.target or "", mg.verb or "", mg))
        if not ranked:
            return []
        ranked.sort(key=lambda t: t[:5])
        mg = ranked[0][5]
        try:
            p = plan(state, ConditionGoalAdapter(subgoal_condition(mg, state)),
                     ROBOT, self.config)
        except PlanError:
            return []
        return [text.render_command(a) for a in p.actions]

    def run(self, session: EnvSession) -> None:
        session.reset()
        for command in self.solve(session.episode):
            if session.done:
                break
            session.step(command)


@dataclass
class LevelReport:
    episodes: int = 0
    scores: list[float] = field(default_factory=list)
    successes: int = 0
    moves_on_success: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        n = self.episodes
        rate = 100.0 * self.successes / n if n else 0.0
        avg_moves = (statistics.mean(self.moves_on_success)
                     if self.moves_on_success else None)
        return {
            "episodes": n,
            "average_score": round(statistics.mean(self.scores), 2) if n else None,
            "success_rate": round(rate, 2),
            "average_moves": round(avg_moves, 2) if avg_moves is not None else "N/A",
        }


@dataclass
class EvalReport:
    agent: str
    mode: str
    per_level: dict[int, LevelReport]

    def as_dict(self) -> dict:
        return {
            "agent": self.agent,
            "mode": self.mode,
            "per_level": {str(k): v.as_dict() for k, v in sorted(self.per_level.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1, sort_keys=True)

    def format_table(self) -> str:
        lines = [f"{self.agent} ({self.mode} observability)",
                 f"{'level':>6} {'episodes':>9} {'avg score':>10} {'success':>9} {'moves':>7}"]
        for level, rep in sorted(self.per_level.items()):
            d = rep.as_dict()
            lines.append(
                f"{level:>6} {d['episodes']:>9} {d['average_score']:>10} "
                f"{str(d['success_rate']) + '%':>9} {d['average_moves']:>7}")
        return "\n".join(lines)


def evaluate(agent, episodes: list[EpisodeSpec], mode: str = "full",
             agent_name: Optional[str] = None) -> EvalReport:
    """Run each episode to completion and aggregate the three metrics."""
    if isinstance(agent, HeuristicAgent) and mode != "full":
        raise ValueError("the heuristic baseline requires full observability")
    per_level: dict[int, LevelReport] = {}
    for ep in episodes:
        session = EnvSession(ep, mode)
        if isinstance(agent, RandomAgent):
            agent.begin(ep.seed)
        agent.run(session)
        rep = per_level.setdefault(ep.hardness, LevelReport())
        rep.episodes += 1
        rep.scores.append(session.score())
        if session.success:
            rep.successes += 1
            rep.moves_on_success.append(session.steps_taken)
    name = agent_name or type(agent).__name__.removesuffix("Agent").lower()
    return EvalReport(agent=name, mode=mode, per_level=per_level)
